//! Bipartite quantum states: validation, Pauli/Bloch representations,
//! partial traces, entropies, and two-qubit entanglement checks.

use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, dot_sigma, hermitian_eigenvalues, hermiticity_deviation, kron, mat2_to_dyn, pauli,
    trace_product_re, CMatrix, C64,
};
use nalgebra::{Matrix2, Matrix3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-9;

/// Validated bipartite density matrix on C^dimA ⊗ C^dimB.
///
/// Invariants checked at construction: Hermitian to 1e-12, unit trace to
/// 1e-12, and positive semidefinite with minimum eigenvalue ≥ -1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate a raw matrix as a density operator with the given subsystem
    /// dimensions.
    pub fn from_matrix(entries: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = dim_a * dim_b;
        if entries.nrows() != d || entries.ncols() != d || d == 0 {
            return Err(Error::WrongDimension {
                expected: format!("{d}x{d}"),
                got: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        let herm_dev = hermiticity_deviation(&entries);
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation: herm_dev,
                tolerance: HERMITICITY_TOL,
            });
        }
        let tr = entries.trace();
        let tr_dev = (tr - cr(1.0)).norm();
        if tr_dev > TRACE_TOL {
            return Err(Error::NotUnitTrace {
                deviation: tr_dev,
                tolerance: TRACE_TOL,
            });
        }
        let min_eig = hermitian_eigenvalues(&entries)[0];
        if min_eig < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            mat: entries,
        })
    }

    /// Density matrix of a pure state vector, dims (dimA, dimB).
    pub fn from_pure(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = dim_a * dim_b;
        if psi.len() != d {
            return Err(Error::WrongDimension {
                expected: format!("{d}"),
                got: format!("{}", psi.len()),
            });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mat = CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / cr(norm * norm));
        Self::from_matrix(mat, dim_a, dim_b)
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            mat: CMatrix::identity(d, d) * cr(1.0 / d as f64),
        }
    }

    /// Tensor product of two single-party states given as raw matrices.
    pub fn product(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<Self> {
        Self::from_matrix(kron(rho_a, rho_b), rho_a.nrows(), rho_b.nrows())
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dim_a == 2 && self.dim_b == 2
    }

    fn require_two_qubit(&self) -> Result<()> {
        if !self.is_two_qubit() {
            return Err(Error::WrongDimension {
                expected: "2x2 qubits".into(),
                got: format!("dims ({}, {})", self.dim_a, self.dim_b),
            });
        }
        Ok(())
    }

    pub fn purity(&self) -> f64 {
        trace_product_re(&self.mat, &self.mat)
    }

    /// Reduced state of the subsystem that remains after tracing out `side`.
    pub fn partial_trace(&self, side: Side) -> DensityMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        match side {
            Side::A => {
                let mut out = CMatrix::zeros(db, db);
                for j in 0..db {
                    for l in 0..db {
                        let mut s = C64::new(0.0, 0.0);
                        for i in 0..da {
                            s += self.mat[(i * db + j, i * db + l)];
                        }
                        out[(j, l)] = s;
                    }
                }
                DensityMatrix {
                    dim_a: db,
                    dim_b: 1,
                    mat: out,
                }
            }
            Side::B => {
                let mut out = CMatrix::zeros(da, da);
                for i in 0..da {
                    for k in 0..da {
                        let mut s = C64::new(0.0, 0.0);
                        for j in 0..db {
                            s += self.mat[(i * db + j, k * db + j)];
                        }
                        out[(i, k)] = s;
                    }
                }
                DensityMatrix {
                    dim_a: da,
                    dim_b: 1,
                    mat: out,
                }
            }
        }
    }

    /// Swap the two subsystems: ρ_AB → ρ_BA. Requires dimA = dimB.
    pub fn swap_parties(&self) -> Result<DensityMatrix> {
        if self.dim_a != self.dim_b {
            return Err(Error::WrongDimension {
                expected: "equal subsystem dimensions".into(),
                got: format!("({}, {})", self.dim_a, self.dim_b),
            });
        }
        let d = self.dim_a;
        let n = d * d;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        out[(j * d + i, l * d + k)] = self.mat[(i * d + j, k * d + l)];
                    }
                }
            }
        }
        Ok(DensityMatrix {
            dim_a: d,
            dim_b: d,
            mat: out,
        })
    }

    /// Von Neumann entropy in bits. Eigenvalues in [-1e-9, 0) are clamped to
    /// zero before the logarithm.
    pub fn entropy(&self) -> f64 {
        von_neumann_entropy_of(&self.mat)
    }

    /// Quantum mutual information I = S(A) + S(B) - S(AB) in bits.
    pub fn mutual_information(&self) -> f64 {
        let sa = self.partial_trace(Side::B).entropy();
        let sb = self.partial_trace(Side::A).entropy();
        (sa + sb - self.entropy()).max(0.0)
    }

    /// Unmeasured conditional entropy S(B|A) = S(AB) - S(A) in bits.
    pub fn conditional_entropy_b_given_a(&self) -> f64 {
        self.entropy() - self.partial_trace(Side::B).entropy()
    }

    /// Bloch/spin-correlation representation of a two-qubit state.
    pub fn pauli_decompose(&self) -> Result<PauliRepresentation> {
        self.require_two_qubit()?;
        let mut a = Vector3::zeros();
        let mut b = Vector3::zeros();
        let mut t = Matrix3::zeros();
        let id = mat2_to_dyn(&pauli(0));
        for j in 0..3 {
            let sj = mat2_to_dyn(&pauli(j + 1));
            a[j] = trace_product_re(&self.mat, &kron(&sj, &id));
            b[j] = trace_product_re(&self.mat, &kron(&id, &sj));
            for k in 0..3 {
                let sk = mat2_to_dyn(&pauli(k + 1));
                t[(j, k)] = trace_product_re(&self.mat, &kron(&sj, &sk));
            }
        }
        Ok(PauliRepresentation { a, b, t })
    }

    /// Wootters concurrence of a two-qubit state, in [0, 1].
    pub fn concurrence(&self) -> Result<f64> {
        self.require_two_qubit()?;
        let sy = kron(&mat2_to_dyn(&pauli(2)), &mat2_to_dyn(&pauli(2)));
        let conj = CMatrix::from_fn(4, 4, |i, j| self.mat[(i, j)].conj());
        let rho_tilde = &sy * conj * &sy;
        let r = &self.mat * rho_tilde;
        // R = ρ ρ̃ has nonnegative eigenvalues; their square roots enter the
        // concurrence formula.
        // R = ρ ρ̃ is similar to the PSD matrix ρ^{1/2} ρ̃ ρ^{1/2}, so its
        // eigenvalues are real and nonnegative up to numerical noise.
        let mut lambdas: Vec<f64> = r
            .eigenvalues()
            .map(|ev| ev.iter().map(|x| x.re.max(0.0).sqrt()).collect())
            .unwrap_or_else(|| {
                hermitian_eigenvalues(&r)
                    .iter()
                    .map(|x| x.max(0.0).sqrt())
                    .collect()
            });
        lambdas.sort_by(|x, y| y.partial_cmp(x).unwrap());
        Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
    }

    /// Partial transpose on subsystem B.
    pub fn partial_transpose_b(&self) -> CMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        let n = da * db;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..da {
            for k in 0..da {
                for j in 0..db {
                    for l in 0..db {
                        out[(i * db + l, k * db + j)] = self.mat[(i * db + j, k * db + l)];
                    }
                }
            }
        }
        out
    }

    /// Exact separability test for two qubits: the partial transpose is
    /// positive semidefinite iff the state is separable.
    pub fn is_separable_ppt(&self) -> Result<bool> {
        self.require_two_qubit()?;
        let pt = self.partial_transpose_b();
        Ok(hermitian_eigenvalues(&pt)[0] >= -PSD_TOL)
    }
}

/// Which subsystem to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Bloch vectors a, b and 3×3 spin correlation matrix T of a two-qubit state:
/// ρ = ¼(1⊗1 + a·σ⊗1 + 1⊗b·σ + Σ T_jk σ_j⊗σ_k).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliRepresentation {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl PauliRepresentation {
    /// Reassemble the density matrix; errors if the parameters lie outside
    /// the state set.
    pub fn compose(&self) -> Result<DensityMatrix> {
        let id = mat2_to_dyn(&pauli(0));
        let mut m = kron(&id, &id);
        for j in 0..3 {
            let sj = mat2_to_dyn(&pauli(j + 1));
            m += kron(&sj, &id) * cr(self.a[j]);
            m += kron(&id, &sj) * cr(self.b[j]);
            for k in 0..3 {
                let sk = mat2_to_dyn(&pauli(k + 1));
                m += kron(&sj, &sk) * cr(self.t[(j, k)]);
            }
        }
        DensityMatrix::from_matrix(m * cr(0.25), 2, 2)
    }
}

/// Projective qubit measurement stored by its Bloch direction. The two
/// projectors are (1 ± n·σ)/2.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QubitBasis {
    bloch: Vector3<f64>,
}

impl QubitBasis {
    pub fn new(direction: Vector3<f64>) -> Result<Self> {
        let norm = direction.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasurement(format!(
                "Bloch direction must be unit length, |n| = {norm}"
            )));
        }
        Ok(Self {
            bloch: direction / norm,
        })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            bloch: crate::linalg::spherical_direction(theta, phi),
        }
    }

    pub fn x() -> Self {
        Self { bloch: Vector3::x() }
    }

    pub fn y() -> Self {
        Self { bloch: Vector3::y() }
    }

    pub fn z() -> Self {
        Self { bloch: Vector3::z() }
    }

    pub fn bloch(&self) -> Vector3<f64> {
        self.bloch
    }

    /// Projector for outcome 0 (+) or 1 (-).
    pub fn projector(&self, outcome: usize) -> Matrix2<C64> {
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        (Matrix2::identity() + dot_sigma(&self.bloch) * cr(sign)) * cr(0.5)
    }

    /// Two qubit bases are mutually unbiased iff their Bloch directions are
    /// orthogonal.
    pub fn is_mub_with(&self, other: &QubitBasis) -> bool {
        self.bloch.dot(&other.bloch).abs() < 1e-9
    }
}

/// One POVM element a0(1 + m·σ) with weight a0 ≥ 0 and |m| ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub weight: f64,
    pub direction: Vector3<f64>,
}

impl PovmElement {
    pub fn new(weight: f64, direction: Vector3<f64>) -> Result<Self> {
        if weight < 0.0 {
            return Err(Error::InvalidMeasurement(format!(
                "POVM weight must be nonnegative, got {weight}"
            )));
        }
        if direction.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidMeasurement(format!(
                "POVM direction must satisfy |m| <= 1, got {}",
                direction.norm()
            )));
        }
        Ok(Self { weight, direction })
    }

    pub fn operator(&self) -> Matrix2<C64> {
        (Matrix2::identity() + dot_sigma(&self.direction)) * cr(self.weight)
    }
}

/// Von Neumann entropy in bits of a raw Hermitian PSD matrix.
pub fn von_neumann_entropy_of(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .map(|&p| {
            let p = if p < 0.0 { 0.0 } else { p };
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum()
}

/// Binary entropy h(x) = -x log₂ x - (1-x) log₂(1-x) in bits, with
/// h(0) = h(1) = 0 by continuity.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::DomainError(format!(
            "binary_entropy argument {x} outside [0, 1]"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    Ok(h)
}

/// Entropy in bits of a qubit with Bloch vector norm r.
pub fn qubit_entropy_from_bloch(r: f64) -> f64 {
    binary_entropy(((1.0 + r.min(1.0)) / 2.0).clamp(0.0, 1.0)).unwrap()
}

/// Ginibre-ensemble random density matrix: ρ = GG†/tr(GG†) with G a complex
/// Gaussian matrix. Full rank with probability one.
pub fn random_density_matrix(rng: &mut ChaCha8Rng, dim_a: usize, dim_b: usize) -> DensityMatrix {
    let d = dim_a * dim_b;
    let g = CMatrix::from_fn(d, d, |_, _| {
        c(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        )
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::from_matrix(rho * cr(1.0 / tr), dim_a, dim_b)
        .expect("Ginibre construction is positive by design")
}

/// Seeded RNG used by all samplers.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point on the unit sphere.
pub fn random_unit_vector(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        );
        let n = v.norm();
        if n > 1e-6 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Two-qubit classical-quantum state Σ_i p_i |i⟩⟨i| ⊗ ρ_i with the classical
/// basis along `basis` and Bob states given by Bloch vectors.
pub fn cq_state(
    basis: &QubitBasis,
    p0: f64,
    bob_blochs: [Vector3<f64>; 2],
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::DomainError(format!("p0 = {p0} outside [0, 1]")));
    }
    for r in &bob_blochs {
        if r.norm() > 1.0 + 1e-12 {
            return Err(Error::DomainError(format!(
                "Bob Bloch vector norm {} exceeds 1",
                r.norm()
            )));
        }
    }
    let probs = [p0, 1.0 - p0];
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..2 {
        let pi = mat2_to_dyn(&basis.projector(i));
        let rho_i = (Matrix2::identity() + dot_sigma(&bob_blochs[i])) * cr(0.5);
        m += kron(&pi, &mat2_to_dyn(&rho_i)) * cr(probs[i]);
    }
    DensityMatrix::from_matrix(m, 2, 2)
}

/// The four Bell states |β_ab⟩ = (|0,b⟩ + (-1)^a |1,1⊕b⟩)/√2.
pub fn bell_state(a: usize, b: usize) -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if a == 0 { s } else { -s };
    let mut psi = [cr(0.0); 4];
    psi[b] = cr(s);
    psi[2 + (1 - b)] = cr(sign);
    DensityMatrix::from_pure(&psi, 2, 2).expect("Bell states are valid")
}

pub fn ket2(amp0: C64, amp1: C64) -> Matrix2<C64> {
    let n = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
    let a0 = amp0 / cr(n);
    let a1 = amp1 / cr(n);
    Matrix2::new(
        a0 * a0.conj(),
        a0 * a1.conj(),
        a1 * a0.conj(),
        a1 * a1.conj(),
    )
}

/// Pure qubit projector |θ,φ⟩⟨θ,φ| with |θ,φ⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
pub fn pure_qubit(theta: f64, phi: f64) -> Matrix2<C64> {
    let a0 = cr((theta / 2.0).cos());
    let a1 = c(0.0, phi).exp() * cr((theta / 2.0).sin());
    ket2(a0, a1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellDiagonalParams;
    use approx::assert_relative_eq;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::from_matrix(CMatrix::identity(4, 4) * cr(0.25), 2, 2).unwrap();
        assert_relative_eq!(rho.purity(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn bell_state_is_valid_and_pure() {
        let rho = bell_state(0, 0);
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        // diag(0.51, 0.5, 0, -0.01): Hermitian, unit trace, not PSD.
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = cr(0.51);
        m[(1, 1)] = cr(0.5);
        m[(3, 3)] = cr(-0.01);
        match DensityMatrix::from_matrix(m, 2, 2) {
            Err(Error::NotPsd { min_eigenvalue }) => {
                assert_relative_eq!(min_eigenvalue, -0.01, epsilon = 1e-12)
            }
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_bad_trace_are_rejected() {
        let mut m = CMatrix::identity(4, 4) * cr(0.25);
        m[(0, 1)] = cr(0.1);
        assert!(matches!(
            DensityMatrix::from_matrix(m, 2, 2),
            Err(Error::NotHermitian { .. })
        ));
        let m = CMatrix::identity(4, 4) * cr(0.3);
        assert!(matches!(
            DensityMatrix::from_matrix(m, 2, 2),
            Err(Error::NotUnitTrace { .. })
        ));
    }

    #[test]
    fn pauli_decompose_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(2, 2);
        let rep = rho.pauli_decompose().unwrap();
        assert!(rep.a.norm() < 1e-14 && rep.b.norm() < 1e-14 && rep.t.norm() < 1e-14);
    }

    #[test]
    fn pauli_decompose_bell_diagonal_gives_diagonal_t() {
        let c = Vector3::new(0.5, 0.3, 0.1);
        let rho = BellDiagonalParams::new(c).unwrap().compose().unwrap();
        let rep = rho.pauli_decompose().unwrap();
        assert!(rep.a.norm() < 1e-12 && rep.b.norm() < 1e-12);
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { c[j] } else { 0.0 };
                assert_relative_eq!(rep.t[(j, k)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pauli_decompose_of_rank3_marginal_state() {
        // ¼(1⊗1 + 0.4 σ₁⊗1 + 0.4(1⊗σ₁ - 1⊗σ₃) + 0.2 σ₃⊗σ₃)
        let rho = crate::catalog::get("giorgi_n3", &Default::default())
            .unwrap()
            .into_state()
            .unwrap();
        let rep = rho.pauli_decompose().unwrap();
        assert_relative_eq!(rep.a.x, 0.4, epsilon = 1e-12);
        assert_relative_eq!(rep.a.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(rep.b.x, 0.4, epsilon = 1e-12);
        assert_relative_eq!(rep.b.z, -0.4, epsilon = 1e-12);
        assert_relative_eq!(rep.t[(2, 2)], 0.2, epsilon = 1e-12);
        assert_relative_eq!(rep.t[(0, 0)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_compose_bell_projector() {
        // T = diag(1, -1, 1) with a = b = 0 is the |β00⟩ projector.
        let rep = PauliRepresentation {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)),
        };
        let rho = rep.compose().unwrap();
        assert!(max_abs_diff(rho.matrix(), bell_state(0, 0).matrix()) < 1e-14);
    }

    #[test]
    fn pauli_compose_rejects_nonstate_parameters() {
        let rep = PauliRepresentation {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0)),
        };
        assert!(matches!(rep.compose(), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn pauli_round_trip_on_random_states() {
        let mut rng = seeded_rng(7);
        for _ in 0..200 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let back = rho.pauli_decompose().unwrap().compose().unwrap();
            assert!(max_abs_diff(rho.matrix(), back.matrix()) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let rho = bell_state(0, 0);
        for side in [Side::A, Side::B] {
            let red = rho.partial_trace(side);
            assert!(max_abs_diff(red.matrix(), &(CMatrix::identity(2, 2) * cr(0.5))) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let sigma = mat2_to_dyn(&pure_qubit(0.7, 1.1));
        let tau = &(CMatrix::identity(2, 2) * cr(0.3))
            + &(mat2_to_dyn(&pure_qubit(2.0, 0.4)) * cr(0.4));
        let rho = DensityMatrix::product(&sigma, &tau).unwrap();
        assert!(max_abs_diff(rho.partial_trace(Side::B).matrix(), &sigma) < 1e-13);
        assert!(max_abs_diff(rho.partial_trace(Side::A).matrix(), &tau) < 1e-13);
    }

    #[test]
    fn partial_trace_of_rank2_separable_state() {
        // ½(|00⟩⟨00| + |+1⟩⟨+1|) reduces on B to 1/2.
        let rho = crate::catalog::get("rank2_1way", &Default::default())
            .unwrap()
            .into_state()
            .unwrap();
        let red = rho.partial_trace(Side::A);
        assert!(max_abs_diff(red.matrix(), &(CMatrix::identity(2, 2) * cr(0.5))) < 1e-13);
    }

    #[test]
    fn entropy_values() {
        assert_relative_eq!(bell_state(0, 0).entropy(), 0.0, epsilon = 1e-10);
        let mixed_qubit = DensityMatrix::from_matrix(CMatrix::identity(2, 2) * cr(0.5), 2, 1)
            .unwrap();
        assert_relative_eq!(mixed_qubit.entropy(), 1.0, epsilon = 1e-12);
        // h(3/4) = -(3/4)log2(3/4) - (1/4)log2(1/4)
        assert_relative_eq!(
            binary_entropy(0.75).unwrap(),
            0.8112781244591328,
            epsilon = 1e-12
        );
        assert_relative_eq!(binary_entropy(0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(binary_entropy(1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn mutual_information_values() {
        let product = DensityMatrix::product(
            &mat2_to_dyn(&pure_qubit(0.3, 0.0)),
            &(CMatrix::identity(2, 2) * cr(0.5)),
        )
        .unwrap();
        assert_relative_eq!(product.mutual_information(), 0.0, epsilon = 1e-10);
        assert_relative_eq!(bell_state(0, 0).mutual_information(), 2.0, epsilon = 1e-10);
        // Bell-diagonal c = (1/3, 1/3, 1/3) has eigenvalues (1/3, 1/3, 1/3, 0):
        // I = 2 - log2(3).
        let tau_prime = BellDiagonalParams::new(Vector3::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0))
            .unwrap()
            .compose()
            .unwrap();
        assert_relative_eq!(
            tau_prime.mutual_information(),
            2.0 - 3.0f64.log2(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn concurrence_values() {
        assert_relative_eq!(
            DensityMatrix::maximally_mixed(2, 2).concurrence().unwrap(),
            0.0,
            epsilon = 1e-10
        );
        assert_relative_eq!(bell_state(0, 0).concurrence().unwrap(), 1.0, epsilon = 1e-10);
        // Two-parameter Bell-diagonal τ(p, q): the Wootters formula evaluates
        // to max{0, (3p - q - 1)/2}; at p = 0.6, q = 0.2 this is 0.3.
        let (_, _, tau) = crate::bell::two_param(0.6, 0.2).unwrap();
        assert_relative_eq!(tau.concurrence().unwrap(), 0.3, epsilon = 1e-10);
    }

    #[test]
    fn ppt_separability() {
        // τ(0.4, 0.2): 3p - q = 1.0, the separability boundary.
        let (_, _, tau) = crate::bell::two_param(0.4, 0.2).unwrap();
        assert!(tau.is_separable_ppt().unwrap());
        assert!(!bell_state(0, 0).is_separable_ppt().unwrap());
        assert!(DensityMatrix::maximally_mixed(2, 2).is_separable_ppt().unwrap());
    }

    #[test]
    fn subadditivity_on_random_states() {
        let mut rng = seeded_rng(11);
        for _ in 0..1000 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let sa = rho.partial_trace(Side::B).entropy();
            let sb = rho.partial_trace(Side::A).entropy();
            assert!(rho.entropy() <= sa + sb + 1e-10);
        }
    }

    #[test]
    fn ppt_agrees_with_concurrence_on_random_states() {
        let mut rng = seeded_rng(13);
        for _ in 0..1000 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let sep = rho.is_separable_ppt().unwrap();
            let conc = rho.concurrence().unwrap();
            assert_eq!(sep, conc < 1e-7, "concurrence {conc} vs ppt {sep}");
        }
    }

    #[test]
    fn cq_state_is_valid() {
        let rho = cq_state(
            &QubitBasis::z(),
            0.5,
            [Vector3::new(0.3, 0.0, 0.1), Vector3::new(0.0, -0.6, 0.2)],
        )
        .unwrap();
        assert!(rho.is_two_qubit());
    }

    #[test]
    fn swap_parties_transposes_correlations() {
        let rho = crate::catalog::get("rank2_1way", &Default::default())
            .unwrap()
            .into_state()
            .unwrap();
        let rep = rho.pauli_decompose().unwrap();
        let swapped = rho.swap_parties().unwrap().pauli_decompose().unwrap();
        assert_relative_eq!((swapped.a - rep.b).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((swapped.b - rep.a).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((swapped.t - rep.t.transpose()).norm(), 0.0, epsilon = 1e-12);
    }
}
