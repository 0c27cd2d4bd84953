//! Steering-scenario data: unnormalized assemblages on the trusted side and
//! no-signaling boxes, plus their generation from states and measurements.

use crate::error::{Error, Result};
use crate::linalg::{cr, dot_sigma, kron, mat2_to_dyn, C64};
use crate::state::{DensityMatrix, QubitBasis};
use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

const NS_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;
const ENTRY_TOL: f64 = 1e-12;

/// Unnormalized conditional states σ_{a|x} on the trusted (qubit) side.
///
/// Invariants: each σ_{a|x} is PSD, Σ_a σ_{a|x} is the same for every
/// setting x (no-signaling), and tr Σ_a σ_{a|x} = 1.
#[derive(Debug, Clone)]
pub struct Assemblage {
    members: Vec<Vec<Matrix2<C64>>>,
}

impl Assemblage {
    pub fn new(members: Vec<Vec<Matrix2<C64>>>) -> Result<Self> {
        let asm = Self { members };
        asm.validate()?;
        Ok(asm)
    }

    pub fn n_settings(&self) -> usize {
        self.members.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.members.first().map_or(0, |m| m.len())
    }

    /// σ_{a|x}.
    pub fn member(&self, x: usize, a: usize) -> &Matrix2<C64> {
        &self.members[x][a]
    }

    /// p(a|x) = tr σ_{a|x}.
    pub fn outcome_probability(&self, x: usize, a: usize) -> f64 {
        self.members[x][a].trace().re
    }

    /// Reduced state Σ_a σ_{a|x} of the trusted side.
    pub fn reduced_state(&self) -> Matrix2<C64> {
        let mut sum = Matrix2::zeros();
        for m in &self.members[0] {
            sum += m;
        }
        sum
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() || self.members.iter().any(|row| row.len() < 2) {
            return Err(Error::InvalidMeasurement(
                "assemblage needs at least one setting with two outcomes".into(),
            ));
        }
        for (x, row) in self.members.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                let eigs = crate::linalg::hermitian_eigenvalues(&mat2_to_dyn(m));
                if eigs[0] < -PSD_TOL {
                    return Err(Error::NotPsd {
                        min_eigenvalue: eigs[0],
                    });
                }
                let _ = (x, a);
            }
        }
        let first = self.reduced_state();
        let tr = first.trace().re;
        if (tr - 1.0).abs() > NS_TOL {
            return Err(Error::NotUnitTrace {
                deviation: (tr - 1.0).abs(),
                tolerance: NS_TOL,
            });
        }
        for row in self.members.iter().skip(1) {
            let mut sum = Matrix2::zeros();
            for m in row {
                sum += m;
            }
            let dev = (sum - first).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > NS_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "assemblage violates no-signaling: deviation {dev:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Largest deviation between the per-setting reduced states.
    pub fn no_signaling_deviation(&self) -> f64 {
        let first = self.reduced_state();
        self.members
            .iter()
            .map(|row| {
                let mut sum = Matrix2::zeros();
                for m in row {
                    sum += m;
                }
                (sum - first).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Joint conditional distribution p(ab|xy) with normalization and two-way
/// no-signaling invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingBox {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
    /// Probabilities indexed `p[x][y][a][b]`.
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl NoSignalingBox {
    pub fn from_fn(
        nx: usize,
        ny: usize,
        na: usize,
        nb: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let p = (0..nx)
            .map(|x| {
                (0..ny)
                    .map(|y| {
                        (0..na)
                            .map(|a| (0..nb).map(|b| f(x, y, a, b)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let b = Self { nx, ny, na, nb, p };
        b.validate()?;
        Ok(b)
    }

    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[x][y][a][b]
    }

    /// Alice marginal p(a|x), evaluated at y = 0 (y-independent by
    /// no-signaling).
    pub fn alice_marginal(&self, x: usize, a: usize) -> f64 {
        (0..self.nb).map(|b| self.p(x, 0, a, b)).sum()
    }

    /// Bob marginal p(b|y), evaluated at x = 0.
    pub fn bob_marginal(&self, y: usize, b: usize) -> f64 {
        (0..self.na).map(|a| self.p(0, y, a, b)).sum()
    }

    /// Correlator E(x, y) = Σ_ab (-1)^{a+b} p(ab|xy) for dichotomic outcomes.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let mut e = 0.0;
        for a in 0..self.na {
            for b in 0..self.nb {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                e += sign * self.p(x, y, a, b);
            }
        }
        e
    }

    /// Alice-outcome expectation A(x) = Σ_ab (-1)^a p(ab|xy).
    pub fn alice_expectation(&self, x: usize) -> f64 {
        (0..self.na)
            .map(|a| {
                let s = if a % 2 == 0 { 1.0 } else { -1.0 };
                s * self.alice_marginal(x, a)
            })
            .sum()
    }

    pub fn bob_expectation(&self, y: usize) -> f64 {
        (0..self.nb)
            .map(|b| {
                let s = if b % 2 == 0 { 1.0 } else { -1.0 };
                s * self.bob_marginal(y, b)
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        for x in 0..self.nx {
            for y in 0..self.ny {
                let mut total = 0.0;
                for a in 0..self.na {
                    for b in 0..self.nb {
                        let v = self.p(x, y, a, b);
                        if v < -ENTRY_TOL {
                            return Err(Error::DomainError(format!(
                                "negative probability p({a}{b}|{x}{y}) = {v:.3e}"
                            )));
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > NS_TOL {
                    return Err(Error::NotUnitTrace {
                        deviation: (total - 1.0).abs(),
                        tolerance: NS_TOL,
                    });
                }
            }
        }
        // Alice marginals independent of y; Bob marginals independent of x.
        for x in 0..self.nx {
            for a in 0..self.na {
                let m0: f64 = (0..self.nb).map(|b| self.p(x, 0, a, b)).sum();
                for y in 1..self.ny {
                    let m: f64 = (0..self.nb).map(|b| self.p(x, y, a, b)).sum();
                    if (m - m0).abs() > NS_TOL {
                        return Err(Error::DomainError(format!(
                            "signaling to Alice: p({a}|{x}) differs across y by {:.3e}",
                            (m - m0).abs()
                        )));
                    }
                }
            }
        }
        for y in 0..self.ny {
            for b in 0..self.nb {
                let m0: f64 = (0..self.na).map(|a| self.p(0, y, a, b)).sum();
                for x in 1..self.nx {
                    let m: f64 = (0..self.na).map(|a| self.p(x, y, a, b)).sum();
                    if (m - m0).abs() > NS_TOL {
                        return Err(Error::DomainError(format!(
                            "signaling to Bob: p({b}|{y}) differs across x by {:.3e}",
                            (m - m0).abs()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Entrywise maximum absolute difference.
    pub fn max_deviation(&self, other: &NoSignalingBox) -> f64 {
        let mut d = 0.0f64;
        for x in 0..self.nx {
            for y in 0..self.ny {
                for a in 0..self.na {
                    for b in 0..self.nb {
                        d = d.max((self.p(x, y, a, b) - other.p(x, y, a, b)).abs());
                    }
                }
            }
        }
        d
    }
}

/// σ_{a|x} = Tr_A[(M_{a|x} ⊗ 1) ρ] for projective qubit measurements given
/// by Bloch directions.
pub fn assemblage_from_state(
    rho: &DensityMatrix,
    measurements: &[QubitBasis],
) -> Result<Assemblage> {
    if !rho.is_two_qubit() {
        return Err(Error::WrongDimension {
            expected: "2x2 qubits".into(),
            got: format!("({}, {})", rho.dim_a(), rho.dim_b()),
        });
    }
    if measurements.is_empty() {
        return Err(Error::InvalidMeasurement("no measurement settings".into()));
    }
    let mut members = Vec::with_capacity(measurements.len());
    for basis in measurements {
        let mut row = Vec::with_capacity(2);
        for a in 0..2 {
            let m = mat2_to_dyn(&basis.projector(a));
            let op = kron(&m, &crate::linalg::mat2_to_dyn(&Matrix2::identity()));
            let product = op * rho.matrix();
            // Partial trace over A of (M⊗1)ρ.
            let mut sigma = Matrix2::zeros();
            for j in 0..2 {
                for l in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..2 {
                        s += product[(i * 2 + j, i * 2 + l)];
                    }
                    sigma[(j, l)] = s;
                }
            }
            // Symmetrize away the O(1e-16) non-Hermiticity from the product.
            let sigma = (sigma + sigma.adjoint()) * cr(0.5);
            row.push(sigma);
        }
        members.push(row);
    }
    Assemblage::new(members)
}

/// σ_{a|x} = Tr_A[(M_{a|x} ⊗ 1) ρ] for general POVM settings; each setting
/// is a list of elements that must sum to the identity.
pub fn assemblage_from_state_povm(
    rho: &DensityMatrix,
    measurements: &[Vec<crate::state::PovmElement>],
) -> Result<Assemblage> {
    if !rho.is_two_qubit() {
        return Err(Error::WrongDimension {
            expected: "2x2 qubits".into(),
            got: format!("({}, {})", rho.dim_a(), rho.dim_b()),
        });
    }
    let mut members = Vec::with_capacity(measurements.len());
    for setting in measurements {
        let mut completeness = Matrix2::<C64>::zeros();
        for element in setting {
            completeness += element.operator();
        }
        let dev = (completeness - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidMeasurement(format!(
                "POVM elements do not sum to identity (deviation {dev:.3e})"
            )));
        }
        let mut row = Vec::with_capacity(setting.len());
        for element in setting {
            let op = kron(
                &mat2_to_dyn(&element.operator()),
                &mat2_to_dyn(&Matrix2::identity()),
            );
            let product = op * rho.matrix();
            let mut sigma = Matrix2::zeros();
            for j in 0..2 {
                for l in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..2 {
                        s += product[(i * 2 + j, i * 2 + l)];
                    }
                    sigma[(j, l)] = s;
                }
            }
            row.push((sigma + sigma.adjoint()) * cr(0.5));
        }
        members.push(row);
    }
    Assemblage::new(members)
}

/// p(ab|xy) = Tr[(M_{a|x} ⊗ M_{b|y}) ρ].
pub fn box_from_state(
    rho: &DensityMatrix,
    alice: &[QubitBasis],
    bob: &[QubitBasis],
) -> Result<NoSignalingBox> {
    let assemblage = assemblage_from_state(rho, alice)?;
    box_from_assemblage(&assemblage, bob)
}

/// p(ab|xy) = Tr[Π_{b|y} σ_{a|x}].
pub fn box_from_assemblage(
    assemblage: &Assemblage,
    bob: &[QubitBasis],
) -> Result<NoSignalingBox> {
    if bob.is_empty() {
        return Err(Error::InvalidMeasurement("no Bob settings".into()));
    }
    NoSignalingBox::from_fn(assemblage.n_settings(), bob.len(), 2, 2, |x, y, a, b| {
        (mat2_to_dyn(&bob[y].projector(b)) * mat2_to_dyn(assemblage.member(x, a)))
            .trace()
            .re
    })
}

/// Canonical lift of a box to an assemblage for declared trusted projective
/// directions: components of the conditional Bloch vectors along the trusted
/// directions are fixed by the box, orthogonal components are set to zero.
///
/// A box admits a local-hidden-state model iff its zero-lift does, because
/// hidden-state components orthogonal to every trusted direction never enter
/// the box probabilities and dropping them preserves positivity.
pub fn lift_box_to_assemblage(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
) -> Result<Assemblage> {
    if boxed.nb != 2 {
        return Err(Error::UnsupportedScenario(
            "box lift requires dichotomic Bob outcomes".into(),
        ));
    }
    if trusted.len() != boxed.ny {
        return Err(Error::InvalidMeasurement(format!(
            "{} trusted directions for {} Bob settings",
            trusted.len(),
            boxed.ny
        )));
    }
    // Solve n_y · v_{a|x} = Σ_b (-1)^b p(ab|xy) in the least-squares sense;
    // for orthonormal trusted directions this is an exact component read-off.
    let ny = trusted.len();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(ny, ny);
    for i in 0..ny {
        for j in 0..ny {
            gram[(i, j)] = trusted[i].dot(&trusted[j]);
        }
    }
    let gram_pinv = gram.pseudo_inverse(1e-12).map_err(|e| {
        Error::InvalidMeasurement(format!("trusted directions are degenerate: {e}"))
    })?;
    let mut members = Vec::with_capacity(boxed.nx);
    for x in 0..boxed.nx {
        let mut row = Vec::with_capacity(2);
        for a in 0..2 {
            let w = boxed.alice_marginal(x, a);
            let comps: Vec<f64> = (0..ny)
                .map(|y| {
                    (0..2)
                        .map(|b| {
                            let s = if b == 0 { 1.0 } else { -1.0 };
                            s * boxed.p(x, y, a, b)
                        })
                        .sum()
                })
                .collect();
            let coeff = &gram_pinv * nalgebra::DVector::from_vec(comps);
            let mut v = Vector3::zeros();
            for (i, n) in trusted.iter().enumerate() {
                v += n * coeff[i];
            }
            let sigma = (Matrix2::identity() * cr(w) + dot_sigma(&v)) * cr(0.5);
            row.push(sigma);
        }
        members.push(row);
    }
    Assemblage::new(members)
}

/// Convenience: the σ₁/σ₂ pair of mutually unbiased trusted directions.
pub fn mub_pair() -> [Vector3<f64>; 2] {
    [Vector3::x(), Vector3::y()]
}

/// The σ₁/σ₂/σ₃ trusted triple.
pub fn mub_triple() -> [Vector3<f64>; 3] {
    [Vector3::x(), Vector3::y(), Vector3::z()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellDiagonalParams;
    use crate::catalog;
    use crate::state::{cq_state, random_density_matrix, seeded_rng, DensityMatrix};
    use approx::assert_relative_eq;

    fn xy_bases() -> Vec<QubitBasis> {
        vec![QubitBasis::x(), QubitBasis::y()]
    }

    #[test]
    fn maximally_mixed_assemblage_is_flat() {
        let rho = DensityMatrix::maximally_mixed(2, 2);
        let asm = assemblage_from_state(&rho, &xy_bases()).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                let m = asm.member(x, a);
                assert_relative_eq!(m[(0, 0)].re, 0.25, epsilon = 1e-12);
                assert_relative_eq!(m[(1, 1)].re, 0.25, epsilon = 1e-12);
                assert_relative_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bell_diagonal_assemblage_closed_form() {
        // Alice measuring σ_x on τ(c) steers to σ_{a|x} = ¼(1 + (-1)^a c_x σ_x).
        let c = nalgebra::Vector3::new(0.6, -0.4, 0.2);
        let rho = BellDiagonalParams::new(c).unwrap().compose().unwrap();
        let asm = assemblage_from_state(&rho, &xy_bases()).unwrap();
        for (x, cx) in [(0usize, 0.6), (1usize, -0.4)] {
            for a in 0..2 {
                let sign = if a == 0 { 1.0 } else { -1.0 };
                let expect = (Matrix2::identity()
                    + crate::linalg::dot_sigma(&(xy_bases()[x].bloch() * (sign * cx))))
                    * cr(0.25);
                let dev = (asm.member(x, a) - expect)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-12);
            }
        }
    }

    #[test]
    fn cq_state_assemblage_in_classical_basis() {
        // Measuring the classical basis on a CQ state gives σ_{a} = p_a ρ_a.
        let r0 = Vector3::new(0.2, 0.1, 0.5);
        let r1 = Vector3::new(-0.3, 0.0, 0.4);
        let rho = cq_state(&QubitBasis::z(), 0.3, [r0, r1]).unwrap();
        let asm = assemblage_from_state(&rho, &[QubitBasis::z()]).unwrap();
        let expect0 = (Matrix2::identity() + dot_sigma(&r0)) * cr(0.5 * 0.3);
        let dev = (asm.member(0, 0) - expect0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn generated_assemblages_satisfy_no_signaling() {
        let mut rng = seeded_rng(41);
        for _ in 0..50 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let asm = assemblage_from_state(
                &rho,
                &[QubitBasis::x(), QubitBasis::y(), QubitBasis::z()],
            )
            .unwrap();
            assert!(asm.no_signaling_deviation() <= 1e-10);
        }
    }

    #[test]
    fn box_invariants_hold_for_random_states() {
        let mut rng = seeded_rng(43);
        for _ in 0..50 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let b = box_from_state(&rho, &xy_bases(), &xy_bases()).unwrap();
            b.validate().unwrap();
        }
    }

    #[test]
    fn maximally_mixed_box_is_uniform() {
        let rho = DensityMatrix::maximally_mixed(2, 2);
        let b = box_from_state(&rho, &xy_bases(), &xy_bases()).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for bb in 0..2 {
                        assert_relative_eq!(b.p(x, y, a, bb), 0.25, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bell_diagonal_box_has_diagonal_correlators() {
        let c = nalgebra::Vector3::new(0.5, 0.3, 0.0);
        let rho = BellDiagonalParams::new(c).unwrap().compose().unwrap();
        let b = box_from_state(&rho, &xy_bases(), &xy_bases()).unwrap();
        assert_relative_eq!(b.correlator(0, 0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(b.correlator(1, 1), 0.3, epsilon = 1e-12);
        assert_relative_eq!(b.correlator(0, 1), 0.0, epsilon = 1e-12);
        assert_relative_eq!(b.correlator(1, 0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn werner_with_relabeled_mubs_reproduces_bb84_family() {
        // Werner(v) measured in σ₁/σ₂ on both sides, with Bob's outcome
        // flipped on the y = 0 setting, matches the BB84 box at V = v.
        let v = 0.55;
        let rho = catalog::werner(v);
        let raw = box_from_state(&rho, &xy_bases(), &xy_bases()).unwrap();
        let relabeled = NoSignalingBox::from_fn(2, 2, 2, 2, |x, y, a, b| {
            let flipped = if y == 0 { 1 - b } else { b };
            raw.p(x, y, a, flipped)
        })
        .unwrap();
        let expect = catalog::bb84_box(v);
        assert!(relabeled.max_deviation(&expect) < 1e-12);
    }

    #[test]
    fn signaling_boxes_are_rejected() {
        // Bob's marginal depends on Alice's setting: signaling.
        let err = NoSignalingBox::from_fn(2, 2, 2, 2, |x, _, a, b| {
            let bias = if x == 0 { 0.1 } else { 0.0 };
            match (a, b) {
                (0, 0) => 0.25 + bias,
                (0, 1) => 0.25 - bias,
                _ => 0.25,
            }
        });
        assert!(err.is_err());

        let err = NoSignalingBox::from_fn(2, 2, 2, 2, |_, _, a, b| match (a, b) {
            (0, 0) => -0.05,
            (0, 1) => 0.55,
            _ => 0.25,
        });
        assert!(matches!(err, Err(Error::DomainError(_))));
    }

    #[test]
    fn povm_assemblage_matches_projective_for_projector_pairs() {
        use crate::state::PovmElement;
        let mut rng = seeded_rng(47);
        let rho = random_density_matrix(&mut rng, 2, 2);
        let n = Vector3::new(0.4, -0.3, 0.87).normalize();
        let projective = assemblage_from_state(&rho, &[QubitBasis::new(n).unwrap()]).unwrap();
        let povm = assemblage_from_state_povm(
            &rho,
            &[vec![
                PovmElement::new(0.5, n).unwrap(),
                PovmElement::new(0.5, -n).unwrap(),
            ]],
        )
        .unwrap();
        for a in 0..2 {
            let dev = (projective.member(0, a) - povm.member(0, a))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn povm_assemblage_rejects_incomplete_settings() {
        use crate::state::PovmElement;
        let rho = DensityMatrix::maximally_mixed(2, 2);
        let err = assemblage_from_state_povm(
            &rho,
            &[vec![PovmElement::new(0.5, Vector3::x()).unwrap()]],
        );
        assert!(matches!(err, Err(Error::InvalidMeasurement(_))));
    }

    #[test]
    fn lift_recovers_bell_diagonal_assemblage() {
        let c = nalgebra::Vector3::new(0.5, 0.3, 0.1);
        let rho = BellDiagonalParams::new(c).unwrap().compose().unwrap();
        let asm = assemblage_from_state(&rho, &xy_bases()).unwrap();
        let b = box_from_assemblage(&asm, &xy_bases()).unwrap();
        let lifted = lift_box_to_assemblage(&b, &[Vector3::x(), Vector3::y()]).unwrap();
        // Conditional Bloch components along x and y agree; z-components are
        // zero both in the lift and in the original BD assemblage.
        for x in 0..2 {
            for a in 0..2 {
                let dev = (lifted.member(x, a) - asm.member(x, a))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-12);
            }
        }
    }
}
