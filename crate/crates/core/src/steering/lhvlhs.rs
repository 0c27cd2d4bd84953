//! Dimension-bounded LHV-LHS models (1SSDI scenario): search for a
//! decomposition p(ab|xy) = Σ_λ p(λ) p(a|x,λ) p(b|y,ρ_λ) with λ ranging over
//! at most d_λ values and ρ_λ qubit states.
//!
//! With bounded d_λ the deterministic-response reduction is invalid, so the
//! response table stays stochastic. For fixed hidden Bloch vectors the
//! problem is a linear program in the remaining variables (solved exactly,
//! minimizing the worst-case reconstruction error); the outer search over
//! hidden Bloch vectors combines structured starts, seeded random starts, a
//! deterministic grid, and simplex refinement. `NoModelFound` is a heuristic
//! verdict: the solver reports the best residual it reached, it cannot prove
//! infeasibility.

use crate::assemblage::NoSignalingBox;
use crate::error::{Error, Result};
use crate::steering::simplex::{self, LpStatus};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Search configuration. All stochastic parts derive from `seed`.
#[derive(Debug, Clone)]
pub struct LhvLhsConfig {
    pub seed: u64,
    /// Hidden-variable cardinality bound; 2 matches the untrusted qubit.
    pub d_lambda: usize,
    pub random_starts: usize,
    /// Deterministic grid spacing over hidden-vector components along the
    /// trusted directions; `None` disables the grid phase.
    pub grid_resolution: Option<f64>,
    /// Use the fine 0.01 grid (two-setting, d_λ = 2 scenarios only).
    pub exhaustive: bool,
    /// Number of best candidates refined by simplex descent.
    pub refine_top: usize,
    pub nm_iterations: usize,
    pub polish_rounds: usize,
    /// Residual below which a model counts as found.
    pub model_tol: f64,
    /// Skip simplex refinement and polishing when the best candidate
    /// residual is above this value (refinement cannot bridge large gaps).
    pub nm_skip_threshold: f64,
}

impl Default for LhvLhsConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            d_lambda: 2,
            random_starts: 64,
            grid_resolution: Some(0.05),
            exhaustive: false,
            refine_top: 8,
            nm_iterations: 400,
            polish_rounds: 80,
            model_tol: 1e-9,
            nm_skip_threshold: 0.15,
        }
    }
}

/// Explicit LHV-LHS model.
#[derive(Debug, Clone, Serialize)]
pub struct LhvLhsModel {
    /// p(λ).
    pub weights: Vec<f64>,
    /// Response table indexed `[λ][x]`, giving p(a=0|x,λ).
    pub responses: Vec<Vec<f64>>,
    /// Hidden qubit Bloch vectors r_λ.
    pub hidden_blochs: Vec<Vector3<f64>>,
    /// Max |p(ab|xy) - reconstruction| over all entries.
    pub residual: f64,
}

impl LhvLhsModel {
    /// Reconstructed probability Σ_λ p(λ) p(a|x,λ) (1 + (-1)^b n_y·r_λ)/2.
    pub fn reconstruct(
        &self,
        trusted: &[Vector3<f64>],
        x: usize,
        y: usize,
        a: usize,
        b: usize,
    ) -> f64 {
        let mut total = 0.0;
        for (lambda, &w) in self.weights.iter().enumerate() {
            let resp = if a == 0 {
                self.responses[lambda][x]
            } else {
                1.0 - self.responses[lambda][x]
            };
            let sign = if b == 0 { 1.0 } else { -1.0 };
            let bob = (1.0 + sign * trusted[y].dot(&self.hidden_blochs[lambda])) / 2.0;
            total += w * resp * bob;
        }
        total
    }

    /// Recompute the reconstruction residual against a box.
    pub fn residual_against(&self, boxed: &NoSignalingBox, trusted: &[Vector3<f64>]) -> f64 {
        let mut r = 0.0f64;
        for x in 0..boxed.nx {
            for y in 0..boxed.ny {
                for a in 0..2 {
                    for b in 0..2 {
                        r = r.max(
                            (self.reconstruct(trusted, x, y, a, b) - boxed.p(x, y, a, b)).abs(),
                        );
                    }
                }
            }
        }
        r
    }
}

/// Search outcome: an explicit model, or the best residual reached.
#[derive(Debug, Clone)]
pub enum LhvLhsOutcome {
    ModelFound(LhvLhsModel),
    NoModelFound { best_residual: f64 },
}

impl LhvLhsOutcome {
    pub fn model(&self) -> Option<&LhvLhsModel> {
        match self {
            LhvLhsOutcome::ModelFound(m) => Some(m),
            LhvLhsOutcome::NoModelFound { .. } => None,
        }
    }

    pub fn best_residual(&self) -> f64 {
        match self {
            LhvLhsOutcome::ModelFound(m) => m.residual,
            LhvLhsOutcome::NoModelFound { best_residual } => *best_residual,
        }
    }
}

/// Diagnostics of a search run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub lp_solves: usize,
    pub grid_points: usize,
    pub starts: usize,
    pub best_residual: f64,
}

/// Scenario data shared by the inner solvers.
struct Scenario {
    boxed: NoSignalingBox,
    trusted: Vec<Vector3<f64>>,
    /// Orthonormal basis of the span of the trusted directions.
    span: Vec<Vector3<f64>>,
    /// Trusted directions in span coordinates: beta[y][k] = n_y · e_k.
    trusted_span: Vec<Vec<f64>>,
    d_lambda: usize,
    /// Precomputed statistics for the residual proxy: correlators E(x, y),
    /// Alice and Bob outcome expectations.
    corr: [[f64; 3]; 3],
    alice_exp: [f64; 3],
    bob_exp: [f64; 3],
    span_flat: [[f64; 3]; 3],
}

impl Scenario {
    fn new(boxed: &NoSignalingBox, trusted: &[Vector3<f64>], d_lambda: usize) -> Result<Self> {
        if boxed.na != 2 || boxed.nb != 2 {
            return Err(Error::UnsupportedScenario(
                "LHV-LHS search requires dichotomic outcomes".into(),
            ));
        }
        if boxed.nx < 2 || boxed.nx > 3 || boxed.ny != trusted.len() {
            return Err(Error::UnsupportedScenario(format!(
                "LHV-LHS search supports 2 or 3 settings; got nx = {}, ny = {}, {} trusted directions",
                boxed.nx,
                boxed.ny,
                trusted.len()
            )));
        }
        if d_lambda < 1 || d_lambda > 4 {
            return Err(Error::UnsupportedScenario(format!(
                "d_lambda = {d_lambda} outside supported range 1..=4"
            )));
        }
        // Gram-Schmidt span of the trusted directions; hidden-state
        // components outside this span never enter the box.
        let mut span: Vec<Vector3<f64>> = Vec::new();
        for dir in trusted {
            let mut v = *dir;
            for e in &span {
                v -= e * e.dot(&v);
            }
            if v.norm() > 1e-9 {
                span.push(v.normalize());
            }
        }
        let trusted_span: Vec<Vec<f64>> = trusted
            .iter()
            .map(|n| span.iter().map(|e| n.dot(e)).collect())
            .collect();
        let mut corr = [[0.0; 3]; 3];
        let mut alice_exp = [0.0; 3];
        let mut bob_exp = [0.0; 3];
        for x in 0..boxed.nx {
            alice_exp[x] = boxed.alice_expectation(x);
            for y in 0..boxed.ny {
                corr[x][y] = boxed.correlator(x, y);
            }
        }
        for (y, e) in bob_exp.iter_mut().enumerate().take(boxed.ny) {
            *e = boxed.bob_expectation(y);
        }
        let mut span_flat = [[0.0; 3]; 3];
        for (y, row) in trusted_span.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                span_flat[y][k] = *v;
            }
        }
        Ok(Self {
            boxed: boxed.clone(),
            trusted: trusted.to_vec(),
            span,
            trusted_span,
            d_lambda,
            corr,
            alice_exp,
            bob_exp,
            span_flat,
        })
    }

    fn span_dim(&self) -> usize {
        self.span.len()
    }

    fn coords_dim(&self) -> usize {
        self.d_lambda * self.span_dim()
    }

    fn coords_to_blochs(&self, coords: &[f64]) -> Vec<Vector3<f64>> {
        let sd = self.span_dim();
        (0..self.d_lambda)
            .map(|l| {
                let mut v = Vector3::zeros();
                for k in 0..sd {
                    v += self.span[k] * coords[l * sd + k];
                }
                v
            })
            .collect()
    }

    /// β(y, λ) = n_y · r_λ from span coordinates.
    fn beta(&self, coords: &[f64], y: usize, lambda: usize) -> f64 {
        let sd = self.span_dim();
        (0..sd)
            .map(|k| self.trusted_span[y][k] * coords[lambda * sd + k])
            .sum()
    }

    /// Exact inner solve: minimize the worst-case reconstruction error over
    /// weights and response tables for fixed hidden vectors.
    fn lp_residual(&self, coords: &[f64]) -> (f64, Option<LhvLhsModel>) {
        let (nx, ny) = (self.boxed.nx, self.boxed.ny);
        let dl = self.d_lambda;
        let n_u = 2 * nx * dl;
        let n_entries = nx * ny * 4;
        // Variables: u(a,x,λ), m(λ), t, then two slacks per entry.
        let n_vars = n_u + dl + 1 + 2 * n_entries;
        let n_rows = nx * dl + 1 + 2 * n_entries;
        let u_idx = |a: usize, x: usize, l: usize| (a * nx + x) * dl + l;
        let m_idx = n_u;
        let t_idx = n_u + dl;
        let s_idx = n_u + dl + 1;

        let mut a_mat = DMatrix::<f64>::zeros(n_rows, n_vars);
        let mut b_vec = vec![0.0; n_rows];
        let mut row = 0;
        // Consistency: Σ_a u(a,x,λ) = m_λ for every x.
        for x in 0..nx {
            for l in 0..dl {
                a_mat[(row, u_idx(0, x, l))] = 1.0;
                a_mat[(row, u_idx(1, x, l))] = 1.0;
                a_mat[(row, m_idx + l)] = -1.0;
                row += 1;
            }
        }
        // Normalization.
        for l in 0..dl {
            a_mat[(row, m_idx + l)] = 1.0;
        }
        b_vec[row] = 1.0;
        row += 1;
        // Reconstruction corridor |recon - p| <= t.
        let mut entry = 0;
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..2 {
                    for b in 0..2 {
                        let sign = if b == 0 { 1.0 } else { -1.0 };
                        let p = self.boxed.p(x, y, a, b);
                        for l in 0..dl {
                            let k = ((1.0 + sign * self.beta(coords, y, l)) / 2.0).max(0.0);
                            a_mat[(row, u_idx(a, x, l))] = k;
                            a_mat[(row + 1, u_idx(a, x, l))] = k;
                        }
                        a_mat[(row, t_idx)] = -1.0;
                        a_mat[(row, s_idx + 2 * entry)] = 1.0;
                        b_vec[row] = p;
                        a_mat[(row + 1, t_idx)] = 1.0;
                        a_mat[(row + 1, s_idx + 2 * entry + 1)] = -1.0;
                        b_vec[row + 1] = p;
                        row += 2;
                        entry += 1;
                    }
                }
            }
        }

        let mut cost = vec![0.0; n_vars];
        cost[t_idx] = 1.0;
        let sol = simplex::minimize(&cost, &a_mat, &b_vec);
        if sol.status != LpStatus::Optimal {
            return (f64::INFINITY, None);
        }

        let weights: Vec<f64> = (0..dl).map(|l| sol.x[m_idx + l].max(0.0)).collect();
        let responses: Vec<Vec<f64>> = (0..dl)
            .map(|l| {
                (0..nx)
                    .map(|x| {
                        let m = weights[l];
                        if m > 1e-12 {
                            (sol.x[u_idx(0, x, l)] / m).clamp(0.0, 1.0)
                        } else {
                            0.5
                        }
                    })
                    .collect()
            })
            .collect();
        let model = LhvLhsModel {
            weights,
            responses,
            hidden_blochs: self.coords_to_blochs(coords),
            residual: 0.0,
        };
        let exact = model.residual_against(&self.boxed, &self.trusted);
        let model = LhvLhsModel {
            residual: exact,
            ..model
        };
        (exact, Some(model))
    }

    /// Cheap residual proxy for d_λ = 2: eliminate the response variables
    /// against the Alice marginals and least-squares the rest. Used only to
    /// rank grid points before exact LP solves; allocation-free.
    fn proxy_residual(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(self.d_lambda, 2);
        let (nx, ny) = (self.boxed.nx, self.boxed.ny);
        let sd = self.span_dim();
        let mut beta0 = [0.0f64; 3];
        let mut beta1 = [0.0f64; 3];
        let mut g = [0.0f64; 3];
        let mut g2 = 0.0;
        for y in 0..ny {
            let row = &self.span_flat[y];
            let mut b0 = 0.0;
            let mut b1 = 0.0;
            for k in 0..sd {
                b0 += row[k] * coords[k];
                b1 += row[k] * coords[sd + k];
            }
            beta0[y] = b0;
            beta1[y] = b1;
            g[y] = b0 - b1;
            g2 += g[y] * g[y];
        }

        let mut m0 = 0.5;
        let mut deltas = [0.0f64; 3];
        if g2 > 1e-12 {
            let mut num = 0.0;
            for y in 0..ny {
                num += g[y] * (self.bob_exp[y] - beta1[y]);
            }
            m0 = (num / g2).clamp(0.0, 1.0);
            for x in 0..nx {
                let mut dn = 0.0;
                for y in 0..ny {
                    dn += g[y] * (self.corr[x][y] - self.alice_exp[x] * beta1[y]);
                }
                deltas[x] = dn / g2;
            }
        } else {
            for x in 0..nx {
                deltas[x] = self.alice_exp[x] / 2.0;
            }
        }

        let mut eq = 0.0f64;
        for y in 0..ny {
            let db = (self.bob_exp[y] - beta1[y] - m0 * g[y]).abs();
            for x in 0..nx {
                let de =
                    (self.corr[x][y] - self.alice_exp[x] * beta1[y] - deltas[x] * g[y]).abs();
                eq = eq.max(0.25 * (db + de));
            }
        }
        let mut violation = 0.0f64;
        for x in 0..nx {
            violation = violation.max((deltas[x].abs() - m0).max(0.0));
            violation =
                violation.max(((self.alice_exp[x] - deltas[x]).abs() - (1.0 - m0)).max(0.0));
        }
        eq + 0.5 * violation
    }

    /// Structured starting points: hidden vectors read off the conditional
    /// steered states, their sign flips, the Bob marginal, and an analytic
    /// construction for near-diagonal correlation patterns.
    fn smart_starts(&self) -> Vec<Vec<f64>> {
        let sd = self.span_dim();
        let (nx, ny) = (self.boxed.nx, self.boxed.ny);
        let mut pool: Vec<Vec<f64>> = vec![vec![0.0; sd]];
        // Conditional steered Bloch components along the trusted span.
        for x in 0..nx {
            for a in 0..2 {
                let pa = self.boxed.alice_marginal(x, a);
                if pa < 1e-9 {
                    continue;
                }
                let comps: Vec<f64> = (0..ny)
                    .map(|y| {
                        (0..2)
                            .map(|b| {
                                let s = if b == 0 { 1.0 } else { -1.0 };
                                s * self.boxed.p(x, y, a, b)
                            })
                            .sum::<f64>()
                            / pa
                    })
                    .collect();
                if let Some(v) = self.span_coords_from_trusted(&comps) {
                    pool.push(v.clone());
                    pool.push(v.iter().map(|c| -c).collect());
                }
            }
        }
        // Bob marginal vector.
        let bob: Vec<f64> = (0..ny).map(|y| self.boxed.bob_expectation(y)).collect();
        if let Some(v) = self.span_coords_from_trusted(&bob) {
            pool.push(v.clone());
            pool.push(v.iter().map(|c| -c).collect());
        }
        for v in pool.iter_mut() {
            clamp_ball(v);
        }

        let mut starts: Vec<Vec<f64>> = Vec::new();
        // All d_λ-subsets (with repetition) of the pool, capped.
        let cap = 400usize;
        let push = |combo: Vec<f64>, starts: &mut Vec<Vec<f64>>| {
            if starts.len() < cap {
                starts.push(combo);
            }
        };
        match self.d_lambda {
            1 => {
                for v in &pool {
                    push(v.clone(), &mut starts);
                }
            }
            2 => {
                for (i, v) in pool.iter().enumerate() {
                    for w in pool.iter().skip(i) {
                        let mut c = v.clone();
                        c.extend_from_slice(w);
                        push(c, &mut starts);
                    }
                }
            }
            _ => {
                for (i, v) in pool.iter().enumerate() {
                    for (j, w) in pool.iter().enumerate().skip(i) {
                        for u in pool.iter().skip(j) {
                            let mut c = v.clone();
                            c.extend_from_slice(w);
                            c.extend_from_slice(u);
                            for _ in 3..self.d_lambda {
                                c.extend(vec![0.0; sd]);
                            }
                            push(c, &mut starts);
                        }
                    }
                }
            }
        }
        // Analytic construction for diagonal correlation patterns.
        if let Some(c) = self.diagonal_construction() {
            starts.insert(0, c);
        }
        if starts.len() > 200 {
            let stride = starts.len().div_ceil(200);
            starts = starts
                .into_iter()
                .enumerate()
                .filter(|(i, _)| i % stride == 0)
                .map(|(_, v)| v)
                .collect();
        }
        starts
    }

    fn span_coords_from_trusted(&self, comps_along_trusted: &[f64]) -> Option<Vec<f64>> {
        // Solve n_y·r = comps in least squares within the span.
        let ny = self.trusted.len();
        let sd = self.span_dim();
        let a = DMatrix::<f64>::from_fn(ny, sd, |y, k| self.trusted_span[y][k]);
        let b = DVector::from_row_slice(comps_along_trusted);
        a.pseudo_inverse(1e-10).ok().map(|p| {
            let x = p * b;
            x.iter().copied().collect()
        })
    }

    /// Closed-form hidden-state layout reproducing boxes with vanishing
    /// marginals and diagonal correlators (t_1, .., t_n) when Σ|t| ≤ 1
    /// (d_λ = 2, one nonzero allowed) or t_1 + t_2 ≤ 1 (d_λ = 3, rank 2).
    fn diagonal_construction(&self) -> Option<Vec<f64>> {
        let nx = self.boxed.nx;
        if self.boxed.ny != nx || self.span_dim() < nx.min(2) {
            return None;
        }
        let sd = self.span_dim();
        let t: Vec<f64> = (0..nx).map(|x| self.boxed.correlator(x, x)).collect();
        match self.d_lambda {
            2 => {
                // Two hidden states ±t₁ e₁ reproduce a single correlator.
                let mut coords = vec![0.0; 2 * sd];
                let (k, tk) = t
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())?;
                if k >= sd {
                    return None;
                }
                coords[k] = *tk;
                coords[sd + k] = -*tk;
                Some(coords)
            }
            3 if sd >= 2 => {
                // Rank-2 layout: r₁ = (x, y), r₂ = (x, -y), r₃ = (-z, 0) in
                // the plane of the two strongest correlators.
                let mut order: Vec<usize> = (0..nx.min(sd)).collect();
                order.sort_by(|&i, &j| t[j].abs().partial_cmp(&t[i].abs()).unwrap());
                let (k1, k2) = (order[0], order[1]);
                let (t1, t2) = (t[k1].abs(), t[k2].abs());
                let m = (0.25f64).max(1.0 / (2.0 * (1.0 + t1)) - 1e-6);
                let x = t1.max(1e-6);
                let y = (t2 / (2.0 * m)).min((1.0 - x * x).max(0.0).sqrt());
                let z = (2.0 * m * x / (1.0 - 2.0 * m)).min(1.0);
                let mut coords = vec![0.0; 3 * sd];
                coords[k1] = x;
                coords[k2] = y;
                coords[sd + k1] = x;
                coords[sd + k2] = -y;
                coords[2 * sd + k1] = -z;
                Some(coords)
            }
            _ => None,
        }
    }
}

fn clamp_ball(coords: &mut [f64]) {
    let n: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    if n > 1.0 {
        for c in coords.iter_mut() {
            *c /= n;
        }
    }
}

fn clamp_all_balls(coords: &mut [f64], sd: usize) {
    for chunk in coords.chunks_mut(sd) {
        clamp_ball(chunk);
    }
}

/// Search for an LHV-LHS model of the box with hidden dimension at most
/// `cfg.d_lambda`, given Bob's trusted projective directions.
pub fn lhvlhs_search(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
    cfg: &LhvLhsConfig,
) -> Result<(LhvLhsOutcome, SearchStats)> {
    let scenario = Scenario::new(boxed, trusted, cfg.d_lambda)?;
    let sd = scenario.span_dim();
    let dims = scenario.coords_dim();
    let mut stats = SearchStats::default();

    let mut best: (f64, Option<LhvLhsModel>, Vec<f64>) =
        (f64::INFINITY, None, vec![0.0; dims]);
    let consider = |cand: (f64, Option<LhvLhsModel>, Vec<f64>),
                        best: &mut (f64, Option<LhvLhsModel>, Vec<f64>)| {
        if cand.0 < best.0 {
            *best = cand;
        }
    };

    // Phase 1: structured starts.
    let starts = scenario.smart_starts();
    stats.starts = starts.len();
    for s in &starts {
        let (r, m) = scenario.lp_residual(s);
        stats.lp_solves += 1;
        consider((r, m, s.clone()), &mut best);
        if best.0 < cfg.model_tol {
            break;
        }
    }

    // Phase 2: seeded random starts.
    if best.0 >= cfg.model_tol {
        let mut rng = crate::state::seeded_rng(cfg.seed);
        for _ in 0..cfg.random_starts {
            let mut coords: Vec<f64> =
                (0..dims).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            clamp_all_balls(&mut coords, sd);
            let (r, m) = scenario.lp_residual(&coords);
            stats.lp_solves += 1;
            consider((r, m, coords), &mut best);
            if best.0 < cfg.model_tol {
                break;
            }
        }
    }

    // Phase 3: deterministic grid (feasible for low-dimensional scenarios).
    let resolution = if cfg.exhaustive { Some(0.01) } else { cfg.grid_resolution };
    if best.0 >= cfg.model_tol && dims <= 4 {
        if let Some(res) = resolution {
            let (grid_best, grid_points, lp_solves) = grid_phase(&scenario, res);
            stats.grid_points = grid_points;
            stats.lp_solves += lp_solves;
            if let Some(gb) = grid_best {
                consider(gb, &mut best);
            }
        }
    } else if best.0 >= cfg.model_tol && dims <= 6 {
        if let Some(res) = resolution {
            // Coarser lattice keeps six-dimensional scans tractable.
            let (grid_best, grid_points, lp_solves) = grid_phase(&scenario, res.max(0.2));
            stats.grid_points = grid_points;
            stats.lp_solves += lp_solves;
            if let Some(gb) = grid_best {
                consider(gb, &mut best);
            }
        }
    }

    // Phase 4: simplex refinement of the best candidate, then polish by
    // alternating exact response solves with least-squares vector updates.
    if best.0 > 1e-15 && best.0 < cfg.nm_skip_threshold {
        let seed_coords = best.2.clone();
        let mut objective = |v: &[f64]| {
            let mut coords = v.to_vec();
            clamp_all_balls(&mut coords, sd);
            scenario.lp_residual(&coords).0
        };
        let (refined, _) = crate::optimize::nelder_mead(
            &mut objective,
            &seed_coords,
            0.05,
            1e-13,
            cfg.nm_iterations,
        );
        let mut coords = refined;
        clamp_all_balls(&mut coords, sd);
        let (r, m) = scenario.lp_residual(&coords);
        stats.lp_solves += 1;
        consider((r, m, coords), &mut best);

        let polished = polish(&scenario, &best.2, cfg, &mut stats);
        consider(polished, &mut best);
    }

    stats.best_residual = best.0;
    let outcome = match best.1 {
        Some(model) if model.residual < cfg.model_tol => LhvLhsOutcome::ModelFound(model),
        _ => LhvLhsOutcome::NoModelFound {
            best_residual: best.0,
        },
    };
    Ok((outcome, stats))
}

fn grid_phase(
    scenario: &Scenario,
    resolution: f64,
) -> (Option<(f64, Option<LhvLhsModel>, Vec<f64>)>, usize, usize) {
    let sd = scenario.span_dim();
    let dims = scenario.coords_dim();
    let steps = (2.0 / resolution).round() as usize + 1;
    let axis: Vec<f64> = (0..steps).map(|i| -1.0 + i as f64 * resolution).collect();

    // Enumerate hidden-vector tuples; the λ-permutation symmetry halves the
    // d_λ = 2 case by ordering the vectors lexicographically.
    let per_vector: Vec<Vec<f64>> = {
        let mut pts = Vec::new();
        let mut idx = vec![0usize; sd];
        'outer: loop {
            let v: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 + 1e-12 {
                pts.push(v);
            }
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] < steps {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == sd {
                    break 'outer;
                }
            }
        }
        pts
    };

    let n_single = per_vector.len();

    // Evaluate the lattice in parallel over the first hidden vector, with a
    // deterministic (value, index) reduction. The λ-permutation symmetry
    // restricts d_λ = 2 pairs to i ≤ j.
    let (best_pt, total): ((f64, usize, usize), usize) = match scenario.d_lambda {
        1 => {
            let best = (0..n_single)
                .into_par_iter()
                .map(|i| (scenario.lp_residual(&per_vector[i]).0, i, 0usize))
                .reduce(
                    || (f64::INFINITY, usize::MAX, 0),
                    |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
                );
            (best, n_single)
        }
        2 => {
            let best = (0..n_single)
                .into_par_iter()
                .map(|i| {
                    let mut coords = vec![0.0; dims];
                    coords[..sd].copy_from_slice(&per_vector[i]);
                    let mut local = (f64::INFINITY, i, usize::MAX);
                    for j in i..n_single {
                        coords[sd..2 * sd].copy_from_slice(&per_vector[j]);
                        let r = scenario.proxy_residual(&coords);
                        if r < local.0 {
                            local = (r, i, j);
                        }
                    }
                    local
                })
                .reduce(
                    || (f64::INFINITY, usize::MAX, usize::MAX),
                    |a, b| {
                        if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                            b
                        } else {
                            a
                        }
                    },
                );
            (best, n_single * (n_single + 1) / 2)
        }
        _ => {
            // Small lattices only; enumerate flat indices base n_single.
            let total = n_single.pow(scenario.d_lambda as u32);
            let dl = scenario.d_lambda;
            let best = (0..total)
                .into_par_iter()
                .map(|flat| {
                    let mut coords = vec![0.0; dims];
                    let mut rest = flat;
                    for l in 0..dl {
                        let idx = rest % n_single;
                        rest /= n_single;
                        coords[l * sd..(l + 1) * sd].copy_from_slice(&per_vector[idx]);
                    }
                    (scenario.lp_residual(&coords).0, flat, 0usize)
                })
                .reduce(
                    || (f64::INFINITY, usize::MAX, 0),
                    |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
                );
            (best, total)
        }
    };
    if best_pt.1 == usize::MAX {
        return (None, total, 0);
    }

    // Exact LP on the winning lattice point; the caller refines it further.
    let mut coords = vec![0.0; dims];
    match scenario.d_lambda {
        1 => coords[..sd].copy_from_slice(&per_vector[best_pt.1]),
        2 => {
            coords[..sd].copy_from_slice(&per_vector[best_pt.1]);
            coords[sd..2 * sd].copy_from_slice(&per_vector[best_pt.2]);
        }
        dl => {
            let mut rest = best_pt.1;
            for l in 0..dl {
                let idx = rest % n_single;
                rest /= n_single;
                coords[l * sd..(l + 1) * sd].copy_from_slice(&per_vector[idx]);
            }
        }
    }
    let (r, m) = scenario.lp_residual(&coords);
    (Some((r, m, coords)), total, 1)
}

fn polish(
    scenario: &Scenario,
    coords0: &[f64],
    cfg: &LhvLhsConfig,
    stats: &mut SearchStats,
) -> (f64, Option<LhvLhsModel>, Vec<f64>) {
    let sd = scenario.span_dim();
    let dl = scenario.d_lambda;
    let (nx, ny) = (scenario.boxed.nx, scenario.boxed.ny);
    let mut coords = coords0.to_vec();
    let (mut best_r, mut best_m) = scenario.lp_residual(&coords);
    stats.lp_solves += 1;
    let mut best_coords = coords.clone();

    for _ in 0..cfg.polish_rounds {
        let Some(model) = &best_m else { break };
        if best_r < 1e-13 {
            break;
        }
        // Least-squares update of the hidden vectors for the fixed response
        // table: the reconstruction is linear in the span coordinates.
        let n_entries = nx * ny * 4;
        let mut design = DMatrix::<f64>::zeros(n_entries, dl * sd);
        let mut rhs = DVector::<f64>::zeros(n_entries);
        let mut row = 0;
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..2 {
                    for b in 0..2 {
                        let sign = if b == 0 { 1.0 } else { -1.0 };
                        let mut constant = 0.0;
                        for l in 0..dl {
                            let w = model.weights[l];
                            let resp = if a == 0 {
                                model.responses[l][x]
                            } else {
                                1.0 - model.responses[l][x]
                            };
                            constant += w * resp * 0.5;
                            for k in 0..sd {
                                design[(row, l * sd + k)] =
                                    w * resp * 0.5 * sign * scenario.trusted_span[y][k];
                            }
                        }
                        rhs[row] = scenario.boxed.p(x, y, a, b) - constant;
                        row += 1;
                    }
                }
            }
        }
        let Ok(pinv) = design.pseudo_inverse(1e-11) else { break };
        let solved = pinv * rhs;
        coords.copy_from_slice(solved.as_slice());
        clamp_all_balls(&mut coords, sd);

        let (r, m) = scenario.lp_residual(&coords);
        stats.lp_solves += 1;
        if r < best_r - 1e-16 {
            best_r = r;
            best_m = m;
            best_coords = coords.clone();
        } else {
            break;
        }
    }
    (best_r, best_m, best_coords)
}

/// Combined 1SSDI verdict for a two-setting dichotomic box.
#[derive(Debug, Clone)]
pub enum SuperunsteerabilityVerdict {
    /// The box is already 1SDI steerable; superunsteerability does not apply.
    NotApplicable { lhs_residual: f64 },
    /// 1SDI unsteerable and no dimension-bounded model found.
    Superunsteerable { best_residual: f64 },
    /// 1SDI unsteerable and a dimension-bounded model exists.
    ModelFound(LhvLhsModel),
}

/// Superunsteerability: 1SDI feasibility must hold, then the bounded-model
/// search decides between `Superunsteerable` and `ModelFound`.
pub fn superunsteerability_verdict(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
    cfg: &LhvLhsConfig,
) -> Result<SuperunsteerabilityVerdict> {
    let lhs = crate::steering::lhs::lhs_feasibility_box(
        boxed,
        trusted,
        &crate::steering::lhs::LhsConfig::default(),
    )?;
    if !lhs.is_feasible() {
        return Ok(SuperunsteerabilityVerdict::NotApplicable {
            lhs_residual: lhs.residual(),
        });
    }
    let (outcome, _) = lhvlhs_search(boxed, trusted, cfg)?;
    Ok(match outcome {
        LhvLhsOutcome::ModelFound(m) => SuperunsteerabilityVerdict::ModelFound(m),
        LhvLhsOutcome::NoModelFound { best_residual } => {
            SuperunsteerabilityVerdict::Superunsteerable { best_residual }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemblage::{box_from_state, mub_pair};
    use crate::catalog;
    use crate::state::{cq_state, QubitBasis};

    fn mub_dirs() -> Vec<Vector3<f64>> {
        mub_pair().to_vec()
    }

    #[test]
    fn white_noise_has_trivial_model() {
        let (outcome, _) =
            lhvlhs_search(&catalog::noise_box(2), &mub_dirs(), &LhvLhsConfig::default()).unwrap();
        let model = outcome.model().expect("white noise is free");
        assert!(model.residual < 1e-9);
        for r in &model.hidden_blochs {
            assert!(r.norm() < 1e-6, "hidden vectors should vanish, got {r:?}");
        }
    }

    #[test]
    fn bb84_has_no_two_dimensional_model() {
        let cfg = LhvLhsConfig::default();
        let (outcome, stats) =
            lhvlhs_search(&catalog::bb84_box(0.5), &mub_dirs(), &cfg).unwrap();
        assert!(outcome.model().is_none());
        assert!(
            outcome.best_residual() > 1e-4,
            "best residual {} stats {stats:?}",
            outcome.best_residual()
        );
    }

    #[test]
    fn cq_state_box_has_model() {
        // A classical-quantum state admits a d_λ = 2 model for any
        // measurements: hidden variable = the classical flag.
        let rho = cq_state(
            &QubitBasis::z(),
            0.4,
            [
                Vector3::new(0.3, 0.2, 0.4),
                Vector3::new(-0.5, 0.1, -0.2),
            ],
        )
        .unwrap();
        let alice = [QubitBasis::z(), QubitBasis::x()];
        let bob = [QubitBasis::x(), QubitBasis::y()];
        let boxed = box_from_state(&rho, &alice, &bob).unwrap();
        let (outcome, _) = lhvlhs_search(&boxed, &mub_dirs(), &LhvLhsConfig::default()).unwrap();
        let model = outcome.model().expect("CQ boxes are free");
        assert!(model.residual < 1e-9, "residual {}", model.residual);
    }

    #[test]
    fn superunsteerability_trichotomy() {
        let cfg = LhvLhsConfig::default();
        // Steerable box at V = 0.9: not applicable.
        let v = superunsteerability_verdict(&catalog::bb84_box(0.9), &mub_dirs(), &cfg).unwrap();
        assert!(matches!(
            v,
            SuperunsteerabilityVerdict::NotApplicable { .. }
        ));
        // BB84 at V = 0.5: superunsteerable.
        let v = superunsteerability_verdict(&catalog::bb84_box(0.5), &mub_dirs(), &cfg).unwrap();
        assert!(matches!(
            v,
            SuperunsteerabilityVerdict::Superunsteerable { .. }
        ));
        // White noise: model found.
        let v = superunsteerability_verdict(&catalog::noise_box(2), &mub_dirs(), &cfg).unwrap();
        assert!(matches!(v, SuperunsteerabilityVerdict::ModelFound(_)));
    }

    #[test]
    fn rank_one_correlation_boxes_have_models() {
        // Diagonal correlators (t, 0) with zero marginals are reproducible
        // with two opposite hidden states.
        let b = NoSignalingBox::from_fn(2, 2, 2, 2, |x, y, a, bo| {
            let t = if x == 0 && y == 0 { 0.35 } else { 0.0 };
            let sign = if (a + bo) % 2 == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * t) / 4.0
        })
        .unwrap();
        let (outcome, _) = lhvlhs_search(&b, &mub_dirs(), &LhvLhsConfig::default()).unwrap();
        assert!(outcome.model().is_some(), "residual {}", outcome.best_residual());
    }

    #[test]
    fn three_setting_rank_two_pattern_has_d3_model() {
        // Correlators (t1, t2, 0) with zero marginals admit a d_λ = 3 model
        // whenever t1 + t2 <= 1.
        let (t1, t2) = (0.55, 0.42);
        let b = NoSignalingBox::from_fn(3, 3, 2, 2, |x, y, a, bo| {
            let t = if x == y {
                [t1, t2, 0.0][x]
            } else {
                0.0
            };
            let sign = if (a + bo) % 2 == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * t) / 4.0
        })
        .unwrap();
        let trusted = crate::assemblage::mub_triple().to_vec();
        let cfg = LhvLhsConfig {
            d_lambda: 3,
            ..Default::default()
        };
        let (outcome, stats) = lhvlhs_search(&b, &trusted, &cfg).unwrap();
        assert!(
            outcome.model().is_some(),
            "residual {} stats {stats:?}",
            outcome.best_residual()
        );
    }

    #[test]
    fn returned_models_reconstruct_their_box() {
        let boxes = [catalog::noise_box(2), catalog::bb84_box(0.0)];
        for b in boxes {
            let (outcome, _) = lhvlhs_search(&b, &mub_dirs(), &LhvLhsConfig::default()).unwrap();
            if let Some(m) = outcome.model() {
                assert!(m.residual_against(&b, &mub_dirs()) < 1e-9);
            }
        }
    }
}
