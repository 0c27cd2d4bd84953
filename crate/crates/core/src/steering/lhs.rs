//! 1SDI local-hidden-state feasibility for assemblages and boxes.
//!
//! With unbounded hidden-variable cardinality the responses can be taken
//! deterministic, so feasibility of σ_{a|x} = Σ_λ D(a|x,λ) σ_λ over the 2ⁿ
//! deterministic strategies with σ_λ ⪰ 0 is decided by alternating
//! projections between the affine reconstruction set and the product of PSD
//! cones.

use crate::assemblage::{lift_box_to_assemblage, Assemblage, NoSignalingBox};
use crate::error::{Error, Result};
use crate::linalg::{cr, dot_sigma, C64};
use nalgebra::{DMatrix, Matrix2, Vector3};
use serde::Serialize;

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct LhsConfig {
    pub max_iterations: usize,
    /// Reconstruction residual below which the model counts as found.
    pub residual_tol: f64,
    /// Iterations between stall checks.
    pub stall_window: usize,
    /// Relative improvement under which the iteration counts as stalled.
    pub stall_improvement: f64,
}

impl Default for LhsConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            residual_tol: 1e-7,
            stall_window: 1000,
            stall_improvement: 1e-4,
        }
    }
}

/// Hidden-state model with deterministic responses: member λ covers the
/// outcome assignment a(x) = bit x of λ.
#[derive(Debug, Clone)]
pub struct LhsModel {
    pub n_settings: usize,
    /// Unnormalized hidden states σ_λ = p(λ) ρ_λ, indexed by strategy.
    pub sigmas: Vec<Matrix2<C64>>,
    pub residual: f64,
    pub iterations: usize,
}

impl LhsModel {
    /// Reconstruction Σ_{λ: λ(x) = a} σ_λ.
    pub fn reconstruct(&self, x: usize, a: usize) -> Matrix2<C64> {
        let mut sum = Matrix2::zeros();
        for (lambda, sigma) in self.sigmas.iter().enumerate() {
            if (lambda >> x) & 1 == a {
                sum += sigma;
            }
        }
        sum
    }
}

/// Outcome of the feasibility solve.
#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(LhsModel),
    /// No model found: the converged residual is a proxy for the distance
    /// between the constraint sets.
    Infeasible { residual: f64, iterations: usize },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn residual(&self) -> f64 {
        match self {
            Feasibility::Feasible(m) => m.residual,
            Feasibility::Infeasible { residual, .. } => *residual,
        }
    }
}

/// Summary of a feasibility run for reports.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub residual: f64,
    pub iterations: usize,
}

impl From<&Feasibility> for FeasibilityReport {
    fn from(f: &Feasibility) -> Self {
        match f {
            Feasibility::Feasible(m) => FeasibilityReport {
                feasible: true,
                residual: m.residual,
                iterations: m.iterations,
            },
            Feasibility::Infeasible {
                residual,
                iterations,
            } => FeasibilityReport {
                feasible: false,
                residual: *residual,
                iterations: *iterations,
            },
        }
    }
}

/// Pauli coordinates (tr σ, tr σσ_i) of a 2×2 Hermitian operator; the
/// operator is ½(w·1 + v·σ).
#[derive(Debug, Clone, Copy, Default)]
struct HermCoords {
    w: f64,
    v: Vector3<f64>,
}

impl HermCoords {
    fn from_matrix(m: &Matrix2<C64>) -> Self {
        let w = m.trace().re;
        let v = Vector3::new(
            (m[(0, 1)] + m[(1, 0)]).re,
            (m[(1, 0)] - m[(0, 1)]).im,
            (m[(0, 0)] - m[(1, 1)]).re,
        );
        Self { w, v }
    }

    fn to_matrix(self) -> Matrix2<C64> {
        (Matrix2::identity() * cr(self.w) + dot_sigma(&self.v)) * cr(0.5)
    }

    /// Largest matrix-element magnitude of ½(w·1 + v·σ).
    fn max_entry(&self) -> f64 {
        let diag = 0.5 * ((self.w + self.v.z).abs()).max((self.w - self.v.z).abs());
        let off = 0.5 * (self.v.x * self.v.x + self.v.y * self.v.y).sqrt();
        diag.max(off)
    }

    /// Frobenius projection onto the PSD cone (eigenvalue clamp).
    fn project_psd(self) -> Self {
        let r = self.v.norm();
        let lo = (self.w - r) / 2.0;
        if lo >= 0.0 {
            return self;
        }
        let hi = (self.w + r) / 2.0;
        if hi <= 0.0 {
            return Self::default();
        }
        // Keep the positive eigenprojector hi |e+><e+|.
        let dir = if r > 1e-15 { self.v / r } else { Vector3::zeros() };
        Self {
            w: hi,
            v: dir * hi,
        }
    }
}

/// 1SDI LHS feasibility of an assemblage with dichotomic settings, n ≤ 3.
pub fn lhs_feasibility_assemblage(asm: &Assemblage, cfg: &LhsConfig) -> Result<Feasibility> {
    let n = asm.n_settings();
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedScenario(format!(
            "1SDI feasibility supports 1..=3 settings, got {n}"
        )));
    }
    if asm.n_outcomes() != 2 {
        return Err(Error::UnsupportedScenario(
            "1SDI feasibility requires dichotomic outcomes".into(),
        ));
    }
    let n_strategies = 1usize << n;

    // Strategy incidence M[(a,x), λ] = [bit x of λ equals a] and its
    // pseudo-inverse for the affine projection.
    let rows = 2 * n;
    let mut incidence = DMatrix::<f64>::zeros(rows, n_strategies);
    for lambda in 0..n_strategies {
        for x in 0..n {
            let a = (lambda >> x) & 1;
            incidence[(a * n + x, lambda)] = 1.0;
        }
    }
    let pinv = incidence
        .clone()
        .pseudo_inverse(1e-12)
        .expect("incidence pseudo-inverse");

    // Targets per coordinate channel.
    let targets: Vec<HermCoords> = (0..rows)
        .map(|row| {
            let (a, x) = (row / n, row % n);
            HermCoords::from_matrix(asm.member(x, a))
        })
        .collect();
    let mut target_channels = vec![DMatrix::<f64>::zeros(rows, 1); 4];
    for (row, t) in targets.iter().enumerate() {
        target_channels[0][(row, 0)] = t.w;
        for k in 0..3 {
            target_channels[k + 1][(row, 0)] = t.v[k];
        }
    }

    // Start from a uniform split of the reduced state.
    let reduced = HermCoords::from_matrix(&asm.reduced_state());
    let mut sigmas = vec![
        HermCoords {
            w: reduced.w / n_strategies as f64,
            v: reduced.v / n_strategies as f64,
        };
        n_strategies
    ];

    let mut best_residual = f64::INFINITY;
    let mut last_checkpoint = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;

        // Project onto the affine reconstruction set, channel by channel.
        for ch in 0..4 {
            let z = DMatrix::<f64>::from_fn(n_strategies, 1, |l, _| {
                if ch == 0 {
                    sigmas[l].w
                } else {
                    sigmas[l].v[ch - 1]
                }
            });
            let defect = &incidence * &z - &target_channels[ch];
            let corrected = z - &pinv * defect;
            for l in 0..n_strategies {
                if ch == 0 {
                    sigmas[l].w = corrected[(l, 0)];
                } else {
                    sigmas[l].v[ch - 1] = corrected[(l, 0)];
                }
            }
        }

        // Project onto the PSD cone product.
        for s in sigmas.iter_mut() {
            *s = s.project_psd();
        }

        // Reconstruction residual of the PSD iterate.
        let mut residual = 0.0f64;
        for (row, t) in targets.iter().enumerate() {
            let (a, x) = (row / n, row % n);
            let mut acc = HermCoords::default();
            for (lambda, s) in sigmas.iter().enumerate() {
                if (lambda >> x) & 1 == a {
                    acc.w += s.w;
                    acc.v += s.v;
                }
            }
            let diff = HermCoords {
                w: acc.w - t.w,
                v: acc.v - t.v,
            };
            residual = residual.max(diff.max_entry());
        }
        best_residual = best_residual.min(residual);

        if residual < cfg.residual_tol {
            let model = LhsModel {
                n_settings: n,
                sigmas: sigmas.iter().map(|s| s.to_matrix()).collect(),
                residual,
                iterations,
            };
            return Ok(Feasibility::Feasible(model));
        }

        if iterations % cfg.stall_window == 0 {
            let improvement = (last_checkpoint - best_residual) / last_checkpoint.max(1e-300);
            if improvement < cfg.stall_improvement && best_residual > 10.0 * cfg.residual_tol {
                break;
            }
            last_checkpoint = best_residual;
        }
    }

    Ok(Feasibility::Infeasible {
        residual: best_residual,
        iterations,
    })
}

/// 1SDI LHS feasibility of a box: the box is lifted to the canonical
/// assemblage for the declared trusted measurement directions first.
pub fn lhs_feasibility_box(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
    cfg: &LhsConfig,
) -> Result<Feasibility> {
    match lift_box_to_assemblage(boxed, trusted) {
        Ok(asm) => lhs_feasibility_assemblage(&asm, cfg),
        // A lift with a negative conditional operator cannot arise from any
        // hidden-state mixture.
        Err(Error::NotPsd { min_eigenvalue }) => Ok(Feasibility::Infeasible {
            residual: -min_eigenvalue,
            iterations: 0,
        }),
        Err(e) => Err(e),
    }
}
