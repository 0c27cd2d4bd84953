//! Closed-form analytics for the Bell-diagonal family
//! τ(c) = ¼(1⊗1 + Σ c_i σ_i⊗σ_i): eigenvalues, canonical ordering,
//! entanglement test, C₁/Q₂/Q₃, Schrödinger strengths, discord, and the
//! two-parameter subfamily τ(p, q).

use crate::error::{Error, Result};
use crate::state::{bell_state, binary_entropy, DensityMatrix, PauliRepresentation};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

/// Validity tolerance on the Bell-diagonal eigenvalues.
const EIGENVALUE_TOL: f64 = 1e-12;

/// Correlators (c₁, c₂, c₃) of a valid Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDiagonalParams {
    c: Vector3<f64>,
}

/// Closed-form profile of a canonicalized Bell-diagonal state.
#[derive(Debug, Clone, Serialize)]
pub struct BdProfile {
    /// Eigenvalues λ_ab indexed `[a][b]`.
    pub eigenvalues: [[f64; 2]; 2],
    pub entangled: bool,
    /// Classical correlation C₁ = 1 - h((1+|c₁|)/2), bits.
    pub c1: f64,
    /// Q₂ = 1 - h((1+|c₂|)/2), bits.
    pub q2: f64,
    /// Q₃ = 1 - h((1+|c₃|)/2), bits.
    pub q3: f64,
    /// SS₂ = |c₂|.
    pub ss2: f64,
    /// SS₃ = |c₃|.
    pub ss3: f64,
    /// Discord D = I - C₁ = Σ λ log₂(4λ) - C₁, bits.
    pub discord: f64,
    /// Steering-ellipsoid normalized volume |c₁ c₂ c₃|.
    pub qse_volume: f64,
}

/// Record of the local-unitary transformation applied by canonicalization:
/// the permutation sending old axis positions to new ones and the sign flips
/// applied after permuting (always an even number).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CanonicalTransform {
    pub permutation: [usize; 3],
    pub sign_flips: [bool; 3],
}

impl BellDiagonalParams {
    /// Validate correlators: all four eigenvalues
    /// λ_ab = ¼[1 + (-1)^a c₁ - (-1)^{a+b} c₂ + (-1)^b c₃] must be ≥ 0.
    pub fn new(c: Vector3<f64>) -> Result<Self> {
        let params = Self { c };
        let min = params
            .eigenvalues()
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &x| m.min(x));
        if min < -EIGENVALUE_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(params)
    }

    pub fn c(&self) -> Vector3<f64> {
        self.c
    }

    pub fn eigenvalue(&self, a: usize, b: usize) -> f64 {
        let sa = if a == 0 { 1.0 } else { -1.0 };
        let sb = if b == 0 { 1.0 } else { -1.0 };
        0.25 * (1.0 + sa * self.c[0] - sa * sb * self.c[1] + sb * self.c[2])
    }

    pub fn eigenvalues(&self) -> [[f64; 2]; 2] {
        [
            [self.eigenvalue(0, 0), self.eigenvalue(0, 1)],
            [self.eigenvalue(1, 0), self.eigenvalue(1, 1)],
        ]
    }

    /// Entangled iff the largest eigenvalue exceeds 1/2.
    pub fn is_entangled(&self) -> bool {
        self.eigenvalues()
            .iter()
            .flatten()
            .fold(f64::NEG_INFINITY, |m, &x| m.max(x))
            > 0.5
    }

    /// Density matrix ¼(1⊗1 + Σ c_i σ_i⊗σ_i).
    pub fn compose(&self) -> Result<DensityMatrix> {
        PauliRepresentation {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&self.c),
        }
        .compose()
    }

    /// Local-unitary canonical form |c₁| ≥ |c₂| ≥ |c₃|.
    ///
    /// The reachable transformations are axis permutations combined with an
    /// even number of sign flips, so |c| is sorted descending, the first two
    /// entries are made nonnegative, and the sign of the product c₁c₂c₃ (a
    /// local-unitary invariant) is carried by c₃. A zero entry absorbs any
    /// leftover sign.
    pub fn canonicalize(&self) -> (BellDiagonalParams, CanonicalTransform) {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| self.c[j].abs().partial_cmp(&self.c[i].abs()).unwrap());
        let permuted = Vector3::new(
            self.c[order[0]],
            self.c[order[1]],
            self.c[order[2]],
        );
        let mut flips = [false; 3];
        let mut result = permuted;
        for i in 0..2 {
            if result[i] < 0.0 {
                result[i] = -result[i];
                flips[i] = true;
                // Pair the flip with the last axis to keep the count even.
                result[2] = -result[2];
                flips[2] = !flips[2];
            }
        }
        (
            BellDiagonalParams { c: result },
            CanonicalTransform {
                permutation: order,
                sign_flips: flips,
            },
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.c[0].abs() + 1e-15 >= self.c[1].abs() && self.c[1].abs() + 1e-15 >= self.c[2].abs()
    }

    /// Closed-form measure profile. Requires canonical ordering.
    pub fn profile(&self) -> Result<BdProfile> {
        if !self.is_canonical() {
            return Err(Error::DomainError(format!(
                "profile requires canonical ordering |c1| >= |c2| >= |c3|, got {:?}",
                self.c
            )));
        }
        let h = |x: f64| binary_entropy(x).unwrap();
        let c1 = 1.0 - h((1.0 + self.c[0].abs()) / 2.0);
        let q2 = 1.0 - h((1.0 + self.c[1].abs()) / 2.0);
        let q3 = 1.0 - h((1.0 + self.c[2].abs()) / 2.0);
        // I = Σ λ log₂(4λ) = 2 + Σ λ log₂ λ, from maximally mixed marginals.
        let mut mutual = 0.0;
        for row in self.eigenvalues() {
            for lam in row {
                if lam > 0.0 {
                    mutual += lam * (4.0 * lam).log2();
                }
            }
        }
        let discord = (mutual - c1).max(0.0);
        Ok(BdProfile {
            eigenvalues: self.eigenvalues(),
            entangled: self.is_entangled(),
            c1,
            q2,
            q3,
            ss2: self.c[1].abs(),
            ss3: self.c[2].abs(),
            discord,
            qse_volume: (self.c[0] * self.c[1] * self.c[2]).abs(),
        })
    }
}

/// Two-parameter family
/// τ(p,q) = p β₀₀ + (q/2)(β₁₀ + β₁₁) + ((1-p-q)/4) Σ β_ab
/// for 0 ≤ q ≤ p, p + q ≤ 1.
///
/// Returns the correlators obtained by Pauli-decomposing the mixture, the
/// canonical closed-form profile, and the state itself.
pub fn two_param(p: f64, q: f64) -> Result<(BellDiagonalParams, BdProfile, DensityMatrix)> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || q > p || p + q > 1.0 + 1e-12 {
        return Err(Error::DomainError(format!(
            "two_param requires 0 <= q <= p and p + q <= 1, got p = {p}, q = {q}"
        )));
    }
    let lambda_uniform = (1.0 - p - q) / 4.0;
    let mut m = bell_state(0, 0).matrix() * crate::linalg::cr(p);
    m += bell_state(1, 0).matrix() * crate::linalg::cr(q / 2.0);
    m += bell_state(1, 1).matrix() * crate::linalg::cr(q / 2.0);
    for a in 0..2 {
        for b in 0..2 {
            m += bell_state(a, b).matrix() * crate::linalg::cr(lambda_uniform);
        }
    }
    let rho = DensityMatrix::from_matrix(m, 2, 2)?;
    let rep = rho.pauli_decompose()?;
    let params = BellDiagonalParams::new(rep.t.diagonal())?;
    let (canonical, _) = params.canonicalize();
    let profile = canonical.profile()?;
    // The mixture has correlators (p-q, -p, p): magnitudes {p, p, p-q}.
    debug_assert!((canonical.c()[0] - p).abs() < 1e-12);
    debug_assert!((canonical.c()[2].abs() - (p - q)).abs() < 1e-12);
    Ok((params, profile, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, CMatrix};
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn compose_trivial_cases() {
        let mm = BellDiagonalParams::new(Vector3::zeros())
            .unwrap()
            .compose()
            .unwrap();
        let diff = (mm.matrix() - CMatrix::identity(4, 4) * cr(0.25))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);

        let bell = BellDiagonalParams::new(Vector3::new(1.0, -1.0, 1.0))
            .unwrap()
            .compose()
            .unwrap();
        let diff = (bell.matrix() - bell_state(0, 0).matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn invalid_correlators_are_rejected() {
        // c = (1, 1, 1) has λ₁₁ = -1/2.
        assert!(matches!(
            BellDiagonalParams::new(Vector3::new(1.0, 1.0, 1.0)),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn canonicalize_sorts_and_preserves_orbit() {
        let (canon, _) = BellDiagonalParams::new(Vector3::new(0.1, 0.5, 0.3))
            .unwrap()
            .canonicalize();
        let c = canon.c();
        assert_relative_eq!(c[0].abs(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(c[1].abs(), 0.3, epsilon = 1e-15);
        assert_relative_eq!(c[2].abs(), 0.1, epsilon = 1e-15);
        // Product sign is a local-unitary invariant.
        assert_relative_eq!(c[0] * c[1] * c[2], 0.1 * 0.5 * 0.3, epsilon = 1e-15);

        let (canon, tf) = BellDiagonalParams::new(Vector3::new(0.5, 0.0, 0.5))
            .unwrap()
            .canonicalize();
        assert_relative_eq!(canon.c()[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(canon.c()[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(canon.c()[2], 0.0, epsilon = 1e-15);
        assert_eq!(tf.permutation, [0, 2, 1]);

        let (canon, tf) = BellDiagonalParams::new(Vector3::new(-1.0, -1.0, -1.0))
            .unwrap()
            .canonicalize();
        assert_relative_eq!(canon.c()[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(canon.c()[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(canon.c()[2], -1.0, epsilon = 1e-15);
        assert_eq!(tf.sign_flips.iter().filter(|&&f| f).count() % 2, 0);
    }

    #[test]
    fn canonical_form_stays_on_local_unitary_orbit() {
        // Even sign-flip count and permutation must preserve validity and the
        // eigenvalue multiset.
        let mut rng = crate::state::seeded_rng(23);
        let mut checked = 0;
        while checked < 200 {
            let c = Vector3::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let Ok(params) = BellDiagonalParams::new(c) else {
                continue;
            };
            checked += 1;
            let (canon, _) = params.canonicalize();
            let valid = BellDiagonalParams::new(canon.c());
            assert!(valid.is_ok(), "canonical form left the state set: {c:?}");
            let mut before: Vec<f64> = params.eigenvalues().iter().flatten().copied().collect();
            let mut after: Vec<f64> = canon.eigenvalues().iter().flatten().copied().collect();
            before.sort_by(|a, b| a.partial_cmp(b).unwrap());
            after.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (x, y) in before.iter().zip(after.iter()) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn profile_golden_values() {
        let third = 1.0 / 3.0;
        let p = BellDiagonalParams::new(Vector3::new(third, third, third))
            .unwrap()
            .profile()
            .unwrap();
        assert_relative_eq!(p.discord, third, epsilon = 1e-10);
        assert_relative_eq!(p.ss2, third, epsilon = 1e-15);
        assert_relative_eq!(p.ss3, third, epsilon = 1e-15);
        assert!(!p.entangled);

        let p = BellDiagonalParams::new(Vector3::new(0.5, 0.5, 0.0))
            .unwrap()
            .profile()
            .unwrap();
        assert_relative_eq!(p.discord, 0.3112781244591328, epsilon = 1e-10);
        assert_relative_eq!(p.ss2, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.ss3, 0.0, epsilon = 1e-15);

        let p = BellDiagonalParams::new(Vector3::zeros())
            .unwrap()
            .profile()
            .unwrap();
        assert_relative_eq!(p.c1 + p.q2 + p.q3 + p.discord + p.qse_volume, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn profile_requires_canonical_input() {
        let params = BellDiagonalParams::new(Vector3::new(0.1, 0.5, 0.3)).unwrap();
        assert!(params.profile().is_err());
    }

    #[test]
    fn discord_positive_iff_c2_nonzero() {
        let p = BellDiagonalParams::new(Vector3::new(0.7, 0.0, 0.0))
            .unwrap()
            .profile()
            .unwrap();
        assert!(p.discord.abs() < 1e-10);
        let p = BellDiagonalParams::new(Vector3::new(0.7, 0.05, 0.0))
            .unwrap()
            .profile()
            .unwrap();
        assert!(p.discord > 1e-6);
    }

    #[test]
    fn two_param_examples() {
        let (_, profile, _) = two_param(0.0, 0.0).unwrap();
        assert!(profile.c1.abs() < 1e-12 && profile.discord.abs() < 1e-12);

        let (_, profile, _) = two_param(0.4, 0.4).unwrap();
        assert_relative_eq!(profile.ss3, 0.0, epsilon = 1e-12);
        assert_relative_eq!(profile.ss2, 0.4, epsilon = 1e-12);
        assert!(profile.discord > 1e-6);

        let (_, profile, rho) = two_param(0.3, 0.1).unwrap();
        assert!(rho.is_separable_ppt().unwrap());
        assert_relative_eq!(profile.ss2, 0.3, epsilon = 1e-12);
        assert_relative_eq!(profile.ss3, 0.2, epsilon = 1e-12);

        assert!(two_param(0.2, 0.5).is_err());
    }

    #[test]
    fn two_param_eigenvalues_match_closed_form() {
        let (p, q) = (0.35, 0.15);
        let (params, _, _) = two_param(p, q).unwrap();
        let mut eigs: Vec<f64> = params.eigenvalues().iter().flatten().copied().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut expect = [
            (1.0 + 3.0 * p - q) / 4.0,
            (1.0 - p + q) / 4.0,
            (1.0 - p + q) / 4.0,
            (1.0 - p - q) / 4.0,
        ];
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (e, x) in eigs.iter().zip(expect.iter()) {
            assert_relative_eq!(e, x, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_param_c1_matches_closed_form() {
        for (p, q) in [(0.2, 0.1), (0.6, 0.2), (0.5, 0.5)] {
            let (_, profile, _) = two_param(p, q).unwrap();
            let expect = 1.0 - binary_entropy((1.0 + p) / 2.0).unwrap();
            assert_relative_eq!(profile.c1, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn monotone_link_between_q_and_ss() {
        // Q₂ = 1 - h((1+SS₂)/2) must be nondecreasing in SS₂.
        let f = |x: f64| 1.0 - binary_entropy((1.0 + x) / 2.0).unwrap();
        let mut prev = f(0.0);
        for i in 1..=100 {
            let x = i as f64 / 100.0;
            let cur = f(x);
            assert!(cur >= prev - 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn entanglement_flag_matches_ppt_on_random_correlators() {
        let mut rng = crate::state::seeded_rng(29);
        let mut checked = 0;
        while checked < 200 {
            let c = Vector3::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let Ok(params) = BellDiagonalParams::new(c) else {
                continue;
            };
            checked += 1;
            let rho = params.compose().unwrap();
            assert_eq!(params.is_entangled(), !rho.is_separable_ppt().unwrap());
        }
    }
}
