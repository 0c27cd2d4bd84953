//! Information-theoretic correlation measures: Holevo quantity, classical
//! correlation C₁ with optimal-basis extraction, quantum discord, the
//! simultaneous-correlations-in-MUBs measures Q₂ and Q₃, correlation rank,
//! global-coherence and classical-quantum witnesses, and the hierarchy
//! classification of two-qubit states.
//!
//! All measures are computed from Alice to Bob; the reverse variants are
//! obtained by swapping subsystems before the call.

use crate::error::{Error, Result};
use crate::linalg::{
    basis_angle, canonical_direction, hermitian_basis, kron, mat2_to_dyn,
    orthonormal_complement, spherical_direction, trace_product_re,
};
use crate::optimize::nelder_mead_max;
use crate::state::{
    qubit_entropy_from_bloch, DensityMatrix, PauliRepresentation, QubitBasis, Side,
};
use nalgebra::{DMatrix, Vector3};
use serde::Serialize;

/// Search configuration for the basis optimizers.
#[derive(Debug, Clone)]
pub struct ScmubOptions {
    /// Coarse (θ, φ) grid step in degrees.
    pub grid_deg: f64,
    /// Function-value tolerance of the simplex refinement.
    pub refine_tol: f64,
    /// Bases within this many bits of the maximum count as optimal.
    pub eps_opt: f64,
    /// Optimal bases closer than this angle (degrees) merge into a cluster.
    pub cluster_deg: f64,
    /// Cap on retained clusters; degenerate continua (e.g. Werner states)
    /// would otherwise produce thousands of equivalent representatives.
    pub max_clusters: usize,
}

impl Default for ScmubOptions {
    fn default() -> Self {
        Self {
            grid_deg: 2.0,
            refine_tol: 1e-10,
            eps_opt: 1e-6,
            cluster_deg: 1.0,
            max_clusters: 64,
        }
    }
}

/// Result of maximizing the Holevo quantity over projective bases.
#[derive(Debug, Clone, Serialize)]
pub struct BasisOptimum {
    /// Optimal value in bits.
    pub value: f64,
    /// Cluster representatives of all bases within `eps_opt` of the maximum,
    /// as canonical Bloch directions.
    pub optimal_bases: Vec<QubitBasis>,
    pub eps_opt: f64,
    /// Set when the cluster cap was hit, indicating a degenerate continuum
    /// of optimal bases.
    pub continuum: bool,
}

/// Full measure profile of a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct ScmubProfile {
    pub c1: f64,
    pub q2: f64,
    pub q3: f64,
    pub c1_basis: Vector3<f64>,
    pub q2_basis: Vector3<f64>,
    pub q3_basis: Vector3<f64>,
    pub discord: f64,
    pub mutual_info: f64,
    pub correlation_rank: usize,
    pub global_coherence: bool,
    pub eps_opt: f64,
}

/// Fast Holevo-quantity evaluator for projective measurements on Alice's
/// qubit, precomputed from the Pauli representation.
pub struct ChiEvaluator {
    a: Vector3<f64>,
    b: Vector3<f64>,
    t_transpose: nalgebra::Matrix3<f64>,
    entropy_b: f64,
}

impl ChiEvaluator {
    pub fn new(rep: &PauliRepresentation) -> Self {
        Self {
            a: rep.a,
            b: rep.b,
            t_transpose: rep.t.transpose(),
            entropy_b: qubit_entropy_from_bloch(rep.b.norm()),
        }
    }

    /// χ(n) = S(ρ_B) - Σ_a p_a S(ρ_{B|a}) for Alice direction n.
    pub fn chi(&self, n: &Vector3<f64>) -> f64 {
        let an = self.a.dot(n);
        let tn = self.t_transpose * n;
        let mut conditional = 0.0;
        for sign in [1.0, -1.0] {
            let p = (1.0 + sign * an) / 2.0;
            if p < 1e-14 {
                continue;
            }
            let bloch = (self.b + tn * sign) / (2.0 * p);
            conditional += p * qubit_entropy_from_bloch(bloch.norm().min(1.0));
        }
        (self.entropy_b - conditional).max(0.0)
    }

    fn chi_angles(&self, theta: f64, phi: f64) -> f64 {
        self.chi(&spherical_direction(theta, phi))
    }
}

/// Holevo quantity χ(ρ | {Π_i^A}) in bits for a projective measurement on A.
///
/// Works for any Bob dimension; the measurement is a qubit basis on A.
pub fn holevo_quantity(rho: &DensityMatrix, basis: &QubitBasis) -> Result<f64> {
    if rho.dim_a() != 2 {
        return Err(Error::WrongDimension {
            expected: "qubit on side A".into(),
            got: format!("dimA = {}", rho.dim_a()),
        });
    }
    let db = rho.dim_b();
    let id_b = crate::linalg::CMatrix::identity(db, db);
    let entropy_b = rho.partial_trace(Side::A).entropy();
    let mut conditional = 0.0;
    for a in 0..2 {
        let proj = kron(&mat2_to_dyn(&basis.projector(a)), &id_b);
        let unnorm = proj * rho.matrix();
        // Partial trace over A of (Π⊗1)ρ.
        let mut sigma = crate::linalg::CMatrix::zeros(db, db);
        for j in 0..db {
            for l in 0..db {
                let mut s = crate::linalg::c(0.0, 0.0);
                for i in 0..2 {
                    s += unnorm[(i * db + j, i * db + l)];
                }
                sigma[(j, l)] = s;
            }
        }
        let p = sigma.trace().re;
        if p < 1e-14 {
            continue;
        }
        conditional += p * crate::state::von_neumann_entropy_of(&(sigma * crate::linalg::cr(1.0 / p)));
    }
    Ok((entropy_b - conditional).max(0.0))
}

fn cluster_directions(
    candidates: &mut Vec<(Vector3<f64>, f64)>,
    cluster_rad: f64,
    cap: usize,
) -> (Vec<(Vector3<f64>, f64)>, bool) {
    candidates.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
    let mut reps: Vec<(Vector3<f64>, f64)> = Vec::new();
    let mut capped = false;
    for (dir, val) in candidates.iter() {
        if reps.iter().any(|(r, _)| basis_angle(r, dir) < cluster_rad) {
            continue;
        }
        if reps.len() >= cap {
            capped = true;
            break;
        }
        reps.push((*dir, *val));
    }
    (reps, capped)
}

/// Classical correlation C₁ = max over projective bases of the Holevo
/// quantity, with the full set of optimal bases.
///
/// Optimizer: coarse (θ, φ) grid followed by simplex refinement of each
/// optimal cluster.
pub fn classical_correlation(rho: &DensityMatrix, opts: &ScmubOptions) -> Result<BasisOptimum> {
    let rep = rho.pauli_decompose()?;
    let chi = ChiEvaluator::new(&rep);
    Ok(optimal_bases_over_sphere(&chi, opts))
}

fn optimal_bases_over_sphere(chi: &ChiEvaluator, opts: &ScmubOptions) -> BasisOptimum {
    let step = opts.grid_deg.to_radians();
    let n_theta = (std::f64::consts::PI / step).ceil() as usize + 1;
    let n_phi = (2.0 * std::f64::consts::PI / step).ceil() as usize;

    let mut best = 0.0f64;
    let mut grid: Vec<(Vector3<f64>, f64)> = Vec::with_capacity(n_theta * n_phi);
    for it in 0..n_theta {
        let theta = (it as f64 * step).min(std::f64::consts::PI);
        for ip in 0..n_phi {
            let phi = ip as f64 * step;
            let v = chi.chi_angles(theta, phi);
            grid.push((spherical_direction(theta, phi), v));
            if v > best {
                best = v;
            }
        }
    }

    // Keep a generous band around the maximum before refinement: coarse-grid
    // values sit below the refined optimum by up to O(step²).
    let band = (best * 0.02 + 1e-4).max(opts.eps_opt);
    let mut candidates: Vec<(Vector3<f64>, f64)> =
        grid.into_iter().filter(|(_, v)| *v >= best - band).collect();
    let (reps, capped) =
        cluster_directions(&mut candidates, opts.cluster_deg.to_radians(), opts.max_clusters);

    // Refine every cluster representative.
    let mut refined: Vec<(Vector3<f64>, f64)> = reps
        .iter()
        .map(|(dir, _)| {
            let theta0 = dir.z.clamp(-1.0, 1.0).acos();
            let phi0 = dir.y.atan2(dir.x);
            let (x, v) = nelder_mead_max(
                &mut |p: &[f64]| chi.chi_angles(p[0], p[1]),
                &[theta0, phi0],
                step / 2.0,
                opts.refine_tol,
                400,
            );
            (spherical_direction(x[0], x[1]), v)
        })
        .collect();

    let value = refined
        .iter()
        .map(|(_, v)| *v)
        .fold(0.0f64, f64::max)
        .max(0.0);
    refined.retain(|(_, v)| *v >= value - opts.eps_opt);
    let (final_reps, capped2) =
        cluster_directions(&mut refined, opts.cluster_deg.to_radians(), opts.max_clusters);

    BasisOptimum {
        value,
        optimal_bases: final_reps
            .iter()
            .map(|(d, _)| QubitBasis::new(canonical_direction(&d.normalize())).unwrap())
            .collect(),
        eps_opt: opts.eps_opt,
        continuum: capped || capped2,
    }
}

/// Maximum of χ over the circle of directions orthogonal to `axis`.
fn maximize_on_orthogonal_circle(
    chi: &ChiEvaluator,
    axis: &Vector3<f64>,
    opts: &ScmubOptions,
) -> Vec<(Vector3<f64>, f64)> {
    let (u, v) = orthonormal_complement(axis);
    let dir = |alpha: f64| u * alpha.cos() + v * alpha.sin();
    // Antipodal directions label the same basis: half turn suffices.
    let steps = 180usize;
    let mut best = 0.0f64;
    let mut samples = Vec::with_capacity(steps);
    for i in 0..steps {
        let alpha = i as f64 * std::f64::consts::PI / steps as f64;
        let val = chi.chi(&dir(alpha));
        samples.push((alpha, val));
        if val > best {
            best = val;
        }
    }
    let band = (best * 0.02 + 1e-4).max(opts.eps_opt);
    let mut candidates: Vec<(f64, f64)> = samples
        .into_iter()
        .filter(|(_, v)| *v >= best - band)
        .collect();
    candidates.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());

    let cluster_rad = opts.cluster_deg.to_radians();
    let mut reps: Vec<(f64, f64)> = Vec::new();
    for (alpha, val) in candidates {
        let dup = reps.iter().any(|(a0, _)| {
            let d = (alpha - a0).abs() % std::f64::consts::PI;
            d.min(std::f64::consts::PI - d) < cluster_rad
        });
        if !dup && reps.len() < opts.max_clusters {
            reps.push((alpha, val));
        }
    }

    reps.iter()
        .map(|(alpha0, _)| {
            let (x, val) = nelder_mead_max(
                &mut |p: &[f64]| chi.chi(&dir(p[0])),
                &[*alpha0],
                (1.0f64).to_radians(),
                opts.refine_tol,
                200,
            );
            (dir(x[0]).normalize(), val)
        })
        .collect()
}

/// Quantum discord D = I - C₁, clamped at zero.
pub fn quantum_discord(rho: &DensityMatrix) -> Result<f64> {
    let opts = ScmubOptions::default();
    let c1 = classical_correlation(rho, &opts)?;
    Ok((rho.mutual_information() - c1.value).max(0.0))
}

/// Q₂ measure and its optimal basis direction.
pub fn scmub_q2(rho: &DensityMatrix) -> Result<(f64, QubitBasis)> {
    let profile = scmub_profile(rho)?;
    Ok((profile.q2, QubitBasis::new(profile.q2_basis)?))
}

/// Q₃ measure and its optimal basis direction.
pub fn scmub_q3(rho: &DensityMatrix) -> Result<(f64, QubitBasis)> {
    let profile = scmub_profile(rho)?;
    Ok((profile.q3, QubitBasis::new(profile.q3_basis)?))
}

/// Complete measure profile with default options.
pub fn scmub_profile(rho: &DensityMatrix) -> Result<ScmubProfile> {
    scmub_profile_with(rho, &ScmubOptions::default())
}

/// Complete measure profile: C₁ with optimal-basis clustering, Q₂ over the
/// MUB circles of every C₁ cluster (with the redefinition rule that retains
/// only C₁-bases attaining the Q₂ maximum), Q₃ on the forced third
/// direction, plus discord, mutual information, correlation rank, and the
/// global-coherence flag.
pub fn scmub_profile_with(rho: &DensityMatrix, opts: &ScmubOptions) -> Result<ScmubProfile> {
    let rep = rho.pauli_decompose()?;
    let chi = ChiEvaluator::new(&rep);
    let c1_opt = optimal_bases_over_sphere(&chi, opts);

    // Q₂: maximize over the orthogonal circle of every optimal C₁ direction.
    let mut q2 = 0.0f64;
    let mut pairs: Vec<(Vector3<f64>, Vector3<f64>, f64)> = Vec::new();
    for basis in &c1_opt.optimal_bases {
        let n1 = basis.bloch();
        for (n2, val) in maximize_on_orthogonal_circle(&chi, &n1, opts) {
            pairs.push((n1, n2, val));
            if val > q2 {
                q2 = val;
            }
        }
    }
    // C₁-bases are redefined as those whose circle attains the Q₂ maximum.
    pairs.retain(|(_, _, v)| *v >= q2 - opts.eps_opt);

    // Q₃: the third MUB direction is forced up to outcome swap.
    let mut q3 = 0.0f64;
    let mut best_pair = pairs
        .first()
        .map(|(n1, n2, _)| (*n1, *n2))
        .unwrap_or((Vector3::z(), Vector3::x()));
    for (n1, n2, _) in &pairs {
        let n3 = n1.cross(n2).normalize();
        let val = chi.chi(&n3);
        if val > q3 {
            q3 = val;
            best_pair = (*n1, *n2);
        }
    }
    let (n1, n2) = best_pair;
    let n3 = n1.cross(&n2).normalize();

    let mutual_info = rho.mutual_information();
    let discord = (mutual_info - c1_opt.value).max(0.0);
    let rank = correlation_rank(rho, None);
    let q2 = q2.min(c1_opt.value);
    let q3 = q3.min(q2);

    Ok(ScmubProfile {
        c1: c1_opt.value,
        q2,
        q3,
        c1_basis: canonical_direction(&n1),
        q2_basis: canonical_direction(&n2),
        q3_basis: canonical_direction(&n3),
        discord,
        mutual_info,
        correlation_rank: rank,
        global_coherence: rank > rho.dim_a().min(rho.dim_b()),
        eps_opt: opts.eps_opt,
    })
}

/// Correlation rank L_R: the number of product terms in the operator Schmidt
/// decomposition, computed as the rank of the correlation matrix
/// R_nm = tr[ρ (A_n ⊗ B_m)] in orthonormal Hermitian bases
/// {1/√d, generalized Gell-Mann/√...} per side. For qubits the basis is
/// {1/√2, σ_j/√2}.
pub fn correlation_rank(rho: &DensityMatrix, sv_tolerance: Option<f64>) -> usize {
    let tol = sv_tolerance.unwrap_or(1e-7);
    let ops_a = hermitian_basis(rho.dim_a());
    let ops_b = hermitian_basis(rho.dim_b());
    let mut r = DMatrix::<f64>::zeros(ops_a.len(), ops_b.len());
    for (n, an) in ops_a.iter().enumerate() {
        for (m, bm) in ops_b.iter().enumerate() {
            r[(n, m)] = trace_product_re(rho.matrix(), &kron(an, bm));
        }
    }
    let sv = r.svd(false, false).singular_values;
    let max_sv = sv.iter().copied().fold(0.0f64, f64::max);
    if max_sv <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max_sv).count()
}

/// Global coherence: discord that cannot be created locally; present iff
/// L_R exceeds the smaller subsystem dimension.
pub fn has_global_coherence(rho: &DensityMatrix) -> bool {
    correlation_rank(rho, None) > rho.dim_a().min(rho.dim_b())
}

/// Classical-quantum test: discord from A to B below `tol` (default 1e-6).
pub fn is_cq_state(rho: &DensityMatrix, tol: Option<f64>) -> Result<bool> {
    Ok(quantum_discord(rho)? <= tol.unwrap_or(1e-6))
}

/// Incoherence with respect to a product basis: all off-diagonal entries of
/// ρ expressed in that basis vanish (≤ 1e-10).
pub fn is_bipartite_incoherent(
    rho: &DensityMatrix,
    basis_a: &QubitBasis,
    basis_b: &QubitBasis,
) -> Result<bool> {
    if !rho.is_two_qubit() {
        return Err(Error::WrongDimension {
            expected: "2x2 qubits".into(),
            got: format!("({}, {})", rho.dim_a(), rho.dim_b()),
        });
    }
    let u = kron(&basis_unitary(basis_a), &basis_unitary(basis_b));
    let transformed = u.adjoint() * rho.matrix() * &u;
    let mut off = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                off = off.max(transformed[(i, j)].norm());
            }
        }
    }
    Ok(off <= 1e-10)
}

fn basis_unitary(basis: &QubitBasis) -> crate::linalg::CMatrix {
    let n = basis.bloch();
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = n.y.atan2(n.x);
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e_phi = crate::linalg::c(0.0, phi).exp();
    let mut u = crate::linalg::CMatrix::zeros(2, 2);
    u[(0, 0)] = crate::linalg::cr(ct);
    u[(1, 0)] = e_phi * crate::linalg::cr(st);
    u[(0, 1)] = crate::linalg::cr(-st);
    u[(1, 1)] = e_phi * crate::linalg::cr(ct);
    u
}

/// Hierarchy region of a two-qubit state.
///
/// I: no discord either way. II/III: one-way/two-way discordant without
/// global coherence. IV: global coherence (Q₂ > 0) with Q₃ = 0. V/VI:
/// simultaneous correlations in three MUBs (Q₃ > 0), split by separability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HierarchyRegion {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

/// Three-way taxonomy of discordant states by their SCMUB profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TaxonomyClass {
    /// No Q₂: cannot demonstrate 1SSDI steering.
    Class1,
    /// Q₂ > 0 with Q₃ = 0; sub-flagged by whether SS₂ > 0.
    Class2,
    /// Q₂ > 0 and Q₃ > 0.
    Class3,
}

/// Hierarchy classification output.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub region: HierarchyRegion,
    pub taxonomy_class: TaxonomyClass,
    pub discord_forward: f64,
    pub discord_backward: f64,
    pub q2: f64,
    pub q3: f64,
    pub correlation_rank: usize,
    pub global_coherence: bool,
    /// Present when a Schrödinger-strength value was supplied to sub-flag
    /// class 2.
    pub ss2_positive: Option<bool>,
}

/// Discord tolerance used by the classifier.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Classify a two-qubit state into its hierarchy region and taxonomy class.
///
/// `ss2` optionally supplies a Schrödinger-strength value (from the steering
/// solvers) used only to sub-flag class 2.
pub fn classify_hierarchy(rho: &DensityMatrix, ss2: Option<f64>) -> Result<Classification> {
    let profile = scmub_profile(rho)?;
    classify_from_profile(rho, &profile, ss2)
}

/// Classification from a precomputed profile (avoids re-running optimizers).
pub fn classify_from_profile(
    rho: &DensityMatrix,
    profile: &ScmubProfile,
    ss2: Option<f64>,
) -> Result<Classification> {
    let d_forward = profile.discord;
    let swapped = rho.swap_parties()?;
    let opts = ScmubOptions::default();
    let c1_back = classical_correlation(&swapped, &opts)?;
    let d_backward = (swapped.mutual_information() - c1_back.value).max(0.0);

    let fw = d_forward > CLASSIFY_TOL;
    let bw = d_backward > CLASSIFY_TOL;
    let q2_pos = profile.q2 > CLASSIFY_TOL;
    let q3_pos = profile.q3 > CLASSIFY_TOL;

    let region = if !fw && !bw {
        HierarchyRegion::I
    } else if !profile.global_coherence || !q2_pos {
        if fw != bw {
            HierarchyRegion::II
        } else {
            HierarchyRegion::III
        }
    } else if !q3_pos {
        HierarchyRegion::IV
    } else if rho.is_separable_ppt()? {
        HierarchyRegion::V
    } else {
        HierarchyRegion::VI
    };

    let taxonomy_class = if !q2_pos {
        TaxonomyClass::Class1
    } else if !q3_pos {
        TaxonomyClass::Class2
    } else {
        TaxonomyClass::Class3
    };

    Ok(Classification {
        region,
        taxonomy_class,
        discord_forward: d_forward,
        discord_backward: d_backward,
        q2: profile.q2,
        q3: profile.q3,
        correlation_rank: profile.correlation_rank,
        global_coherence: profile.global_coherence,
        ss2_positive: ss2.map(|v| v > 1e-3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellDiagonalParams;
    use crate::catalog;
    use crate::state::{binary_entropy, random_density_matrix, seeded_rng};
    use approx::assert_relative_eq;

    fn bd(c1: f64, c2: f64, c3: f64) -> DensityMatrix {
        BellDiagonalParams::new(Vector3::new(c1, c2, c3))
            .unwrap()
            .compose()
            .unwrap()
    }

    fn state(id: &str) -> DensityMatrix {
        catalog::get(id, &Default::default())
            .unwrap()
            .into_state()
            .unwrap()
    }

    #[test]
    fn holevo_closed_form_on_bell_diagonal() {
        // χ(τ | σ₁ basis) = 1 - h((1+|c₁|)/2).
        let rho = bd(0.5, 0.3, 0.1);
        let chi = holevo_quantity(&rho, &QubitBasis::x()).unwrap();
        let expect = 1.0 - binary_entropy((1.0 + 0.5) / 2.0).unwrap();
        assert_relative_eq!(chi, expect, epsilon = 1e-10);
    }

    #[test]
    fn holevo_vanishes_on_product_states() {
        let rho = state("pure_theta_phi");
        for basis in [QubitBasis::x(), QubitBasis::y(), QubitBasis::z()] {
            assert!(holevo_quantity(&rho, &basis).unwrap() < 1e-10);
        }
    }

    #[test]
    fn holevo_vanishes_in_mub_of_rank2_optimal_basis() {
        // For ½(|00⟩⟨00| + |+1⟩⟨+1|) the direction (σ_z + σ_x)/√2 is
        // orthogonal to the optimal (σ_z - σ_x)/√2 axis and carries no
        // correlation.
        let rho = state("rank2_1way");
        let n = Vector3::new(1.0, 0.0, 1.0).normalize();
        assert!(holevo_quantity(&rho, &QubitBasis::new(n).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn chi_evaluator_matches_matrix_path() {
        let mut rng = seeded_rng(101);
        for _ in 0..25 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let chi = ChiEvaluator::new(&rho.pauli_decompose().unwrap());
            let n = crate::state::random_unit_vector(&mut rng);
            let fast = chi.chi(&n);
            let slow = holevo_quantity(&rho, &QubitBasis::new(n).unwrap()).unwrap();
            assert_relative_eq!(fast, slow, epsilon = 1e-9);
        }
    }

    #[test]
    fn classical_correlation_bell_diagonal() {
        let opts = ScmubOptions::default();
        let opt = classical_correlation(&bd(0.5, 0.3, 0.1), &opts).unwrap();
        let expect = 1.0 - binary_entropy(0.75).unwrap();
        assert_relative_eq!(opt.value, expect, epsilon = 1e-8);
        // The unique optimal basis is σ₁.
        assert!(opt
            .optimal_bases
            .iter()
            .all(|b| basis_angle(&b.bloch(), &Vector3::x()) < 0.02));
    }

    #[test]
    fn classical_correlation_rank2_two_way() {
        // C₁ = h((2+√2)/4) - h((1+√3/2)/2), optimal bases (∓σ_z ± σ_x)/√2.
        let opts = ScmubOptions::default();
        let opt = classical_correlation(&state("rank2_2way"), &opts).unwrap();
        let expect = binary_entropy((2.0 + std::f64::consts::SQRT_2) / 4.0).unwrap()
            - binary_entropy((1.0 + 3.0f64.sqrt() / 2.0) / 2.0).unwrap();
        assert_relative_eq!(opt.value, expect, epsilon = 1e-8);
        let axis = Vector3::new(1.0, 0.0, -1.0).normalize();
        assert!(opt
            .optimal_bases
            .iter()
            .all(|b| basis_angle(&b.bloch(), &axis) < 0.02));
    }

    #[test]
    fn classical_correlation_maximally_mixed_is_degenerate_zero() {
        let opts = ScmubOptions::default();
        let opt = classical_correlation(&DensityMatrix::maximally_mixed(2, 2), &opts).unwrap();
        assert!(opt.value < 1e-10);
        assert!(opt.continuum);
    }

    #[test]
    fn discord_golden_values() {
        // Published four-digit discord values for the catalog states.
        let cases = [
            ("rank2_1way", 0.2018),
            ("rank2_2way", 0.1442),
            ("tau_prime", 0.3333),
            ("tau_dprime", 0.3113),
            ("giorgi_n3", 0.026),
        ];
        for (id, expect) in cases {
            let d = quantum_discord(&state(id)).unwrap();
            assert!(
                (d - expect).abs() < 1e-3,
                "{id}: discord {d} vs {expect}"
            );
        }
    }

    #[test]
    fn discord_vanishes_on_cq_states() {
        let rho = state("cq_generic");
        assert!(quantum_discord(&rho).unwrap() < 1e-8);
        assert!(is_cq_state(&rho, None).unwrap());
        assert!(is_cq_state(&DensityMatrix::maximally_mixed(2, 2), None).unwrap());
    }

    #[test]
    fn rank2_states_are_not_cq_but_reverse_differs() {
        // ½(|00⟩⟨00| + |+1⟩⟨+1|) is quantum-classical: D→ > 0, D← = 0.
        let rho = state("rank2_1way");
        assert!(!is_cq_state(&rho, None).unwrap());
        let swapped = rho.swap_parties().unwrap();
        assert!(is_cq_state(&swapped, None).unwrap());
    }

    #[test]
    fn q2_closed_form_on_bell_diagonal() {
        let profile = scmub_profile(&bd(0.5, 0.3, 0.1)).unwrap();
        let expect = 1.0 - binary_entropy((1.0 + 0.3) / 2.0).unwrap();
        assert_relative_eq!(profile.q2, expect, epsilon = 1e-7);
        assert!(basis_angle(&profile.q2_basis, &Vector3::y()) < 0.02);
    }

    #[test]
    fn q2_vanishes_for_rank2_states() {
        for id in ["rank2_1way", "rank2_2way"] {
            let profile = scmub_profile(&state(id)).unwrap();
            assert!(profile.q2 < 1e-6, "{id}: q2 = {}", profile.q2);
        }
    }

    #[test]
    fn q2_vanishes_for_product_states() {
        let profile = scmub_profile(&state("pure_theta_phi")).unwrap();
        assert!(profile.q2 < 1e-9);
    }

    #[test]
    fn q3_closed_form_on_bell_diagonal() {
        let profile = scmub_profile(&bd(0.5, 0.3, 0.1)).unwrap();
        let expect = 1.0 - binary_entropy((1.0 + 0.1) / 2.0).unwrap();
        assert_relative_eq!(profile.q3, expect, epsilon = 1e-6);
        assert!(basis_angle(&profile.q3_basis, &Vector3::z()) < 0.05);
    }

    #[test]
    fn q3_vanishes_for_trine_state() {
        let profile = scmub_profile(&state("tau_dprime")).unwrap();
        assert!(profile.q3 < 1e-7, "q3 = {}", profile.q3);
        assert!(profile.q2 > 1e-3);
    }

    #[test]
    fn q3_is_maximal_for_singlet() {
        let profile = scmub_profile(&bd(-1.0, -1.0, -1.0)).unwrap();
        assert_relative_eq!(profile.q3, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn correlation_rank_values() {
        assert_eq!(correlation_rank(&state("pure_theta_phi"), None), 1);
        assert_eq!(correlation_rank(&state("rank2_1way"), None), 2);
        assert_eq!(correlation_rank(&state("rank2_2way"), None), 2);
        assert_eq!(correlation_rank(&state("tau_dprime"), None), 3);
        assert_eq!(correlation_rank(&state("tau_prime"), None), 4);
        assert_eq!(correlation_rank(&state("giorgi_n3"), None), 3);
    }

    #[test]
    fn global_coherence_examples() {
        assert!(!has_global_coherence(&state("rank2_2way")));
        assert!(has_global_coherence(&state("tau_dprime")));
        assert!(!has_global_coherence(&state("pure_theta_phi")));
    }

    #[test]
    fn incoherence_in_computational_basis() {
        let z = QubitBasis::z();
        let diag = bd(0.0, 0.0, 0.4);
        assert!(is_bipartite_incoherent(&diag, &z, &z).unwrap());
        assert!(!is_bipartite_incoherent(&crate::state::bell_state(0, 0), &z, &z).unwrap());
        assert!(!is_bipartite_incoherent(&state("rank2_1way"), &z, &z).unwrap());
    }

    #[test]
    fn hierarchy_classification_examples() {
        let c = classify_hierarchy(&state("rank2_1way"), None).unwrap();
        assert_eq!(c.region, HierarchyRegion::II);
        assert_eq!(c.taxonomy_class, TaxonomyClass::Class1);

        let c = classify_hierarchy(&state("tau_dprime"), Some(0.5)).unwrap();
        assert_eq!(c.taxonomy_class, TaxonomyClass::Class2);
        assert_eq!(c.ss2_positive, Some(true));

        let c = classify_hierarchy(&state("tau_prime"), None).unwrap();
        assert_eq!(c.taxonomy_class, TaxonomyClass::Class3);
        assert_eq!(c.region, HierarchyRegion::V);

        let c = classify_hierarchy(&DensityMatrix::maximally_mixed(2, 2), None).unwrap();
        assert_eq!(c.region, HierarchyRegion::I);
    }

    #[test]
    fn measure_chain_is_ordered_on_random_states() {
        let mut rng = seeded_rng(103);
        for _ in 0..60 {
            let rho = random_density_matrix(&mut rng, 2, 2);
            let p = scmub_profile(&rho).unwrap();
            assert!(p.c1 + 1e-9 >= p.q2, "c1 {} < q2 {}", p.c1, p.q2);
            assert!(p.q2 + 1e-9 >= p.q3, "q2 {} < q3 {}", p.q2, p.q3);
            assert!(p.q3 >= 0.0);
            assert!(p.discord >= 0.0);
            assert_relative_eq!(p.discord + p.c1, p.mutual_info, epsilon = 1e-9);
        }
    }

    #[test]
    fn bd_profiles_match_generic_optimizer() {
        use rand::Rng;
        let mut rng = seeded_rng(107);
        let mut done = 0;
        while done < 10 {
            let c = Vector3::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let Ok(params) = BellDiagonalParams::new(c) else {
                continue;
            };
            done += 1;
            let (canon, _) = params.canonicalize();
            let closed = canon.profile().unwrap();
            let generic = scmub_profile(&params.compose().unwrap()).unwrap();
            assert!((closed.c1 - generic.c1).abs() < 1e-4);
            assert!((closed.q2 - generic.q2).abs() < 1e-4);
            assert!((closed.q3 - generic.q3).abs() < 1e-4);
        }
    }

    #[test]
    fn q2_iff_correlation_rank_exceeds_two() {
        // Correlation in a single basis means L_R ≤ 2 and vice versa.
        let catalog_ids = [
            "rank2_1way",
            "rank2_2way",
            "tau_prime",
            "tau_dprime",
            "giorgi_n3",
            "pure_theta_phi",
            "cq_generic",
        ];
        for id in catalog_ids {
            let rho = state(id);
            let p = scmub_profile(&rho).unwrap();
            let lr = p.correlation_rank;
            assert_eq!(
                p.q2 > 1e-6,
                lr > 2,
                "{id}: q2 = {}, L_R = {lr}",
                p.q2
            );
            assert_eq!(p.q2 > 1e-6, p.global_coherence, "{id}");
        }
    }
}
