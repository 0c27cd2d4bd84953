//! Schrödinger strength: the maximal weight of an extremal steerable part in
//! a convex decomposition P = p·P_S + (1-p)·P_US whose remainder P_US is
//! 1SDI-unsteerable and free in the n-setting 1SSDI sense (it admits an
//! LHV-LHS model with hidden dimension d_λ = n).
//!
//! Candidate steerable parts are drawn from the local-relabeling orbit of
//! the extremal box P_Ext(ab|xy) = (1 + (-1)^{a+b+xy} δ_xy)/4: every such
//! box carries perfect correlations of chosen signs on a matching of
//! settings. For each candidate, the extraction weight is capped where a
//! matching-setting correlator of the remainder would change sign relative
//! to the extracted perfect correlation, and the cap is accepted only when
//! the remainder passes the nonnegativity, 1SDI, and freeness checks (with
//! bisection descent otherwise). The returned value is a certified lower
//! bound: the decomposition and the remainder's hidden model are explicit.
//! The extraction applies uniformly to 1SDI-steerable inputs, where it
//! reports the canonical weight rather than the trivial whole-box part.

use crate::assemblage::NoSignalingBox;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, QubitBasis};
use crate::steering::lhs::{lhs_feasibility_box, LhsConfig};
use crate::steering::lhvlhs::{lhvlhs_search, LhvLhsConfig, LhvLhsModel, LhvLhsOutcome};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

/// Box-level solver configuration.
#[derive(Debug, Clone)]
pub struct SsConfig {
    pub seed: u64,
    /// Bisection tolerance on the extraction weight.
    pub bisection_tol: f64,
    /// Descent steps scanning for a free remainder below the 1SDI cap.
    pub descent_steps: usize,
    pub lhs: LhsConfig,
    /// Freeness search effort (d_lambda is overridden per scenario).
    pub freeness: LhvLhsConfig,
}

impl Default for SsConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            bisection_tol: 1e-4,
            descent_steps: 4,
            lhs: LhsConfig::default(),
            freeness: LhvLhsConfig {
                random_starts: 6,
                grid_resolution: None,
                nm_iterations: 100,
                polish_rounds: 30,
                nm_skip_threshold: 0.02,
                ..Default::default()
            },
        }
    }
}

/// Certified decomposition quality.
#[derive(Debug, Clone, Serialize)]
pub struct SsCertificate {
    /// Which relabeled extremal box was extracted.
    pub candidate: String,
    /// Minimum entry of the unsteerable part (≥ -1e-12).
    pub entrywise_min: f64,
    /// 1SDI feasibility residual of the unsteerable part.
    pub lhs_residual: f64,
    /// Reconstruction residual of the remainder's hidden model.
    pub freeness_residual: f64,
    /// Max |P - (p P_S + (1-p) P_US)| over entries.
    pub reconstruction_residual: f64,
}

/// Result of the box-level maximization.
#[derive(Debug, Clone)]
pub struct SsResult {
    pub value: f64,
    pub steerable_part: NoSignalingBox,
    pub unsteerable_part: NoSignalingBox,
    pub certificate: SsCertificate,
    /// Hidden model of the unsteerable part, when one was required.
    pub remainder_model: Option<LhvLhsModel>,
}

impl SsResult {
    /// Max deviation of p·P_S + (1-p)·P_US from the input box.
    pub fn reconstruction_residual(&self, original: &NoSignalingBox) -> f64 {
        let p = self.value;
        let mut dev = 0.0f64;
        for x in 0..original.nx {
            for y in 0..original.ny {
                for a in 0..original.na {
                    for b in 0..original.nb {
                        let mix = p * self.steerable_part.p(x, y, a, b)
                            + (1.0 - p) * self.unsteerable_part.p(x, y, a, b);
                        dev = dev.max((mix - original.p(x, y, a, b)).abs());
                    }
                }
            }
        }
        dev
    }
}

/// One element of the relabeling orbit of the extremal box: perfect
/// correlations of sign `signs[x]` on the setting matching y = matching[x].
#[derive(Debug, Clone)]
struct ExtCandidate {
    matching: Vec<usize>,
    signs: Vec<f64>,
}

impl ExtCandidate {
    fn boxed(&self, n: usize) -> NoSignalingBox {
        NoSignalingBox::from_fn(n, n, 2, 2, |x, y, a, b| {
            if self.matching[x] == y {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                (1.0 + sign * self.signs[x]) / 4.0
            } else {
                0.25
            }
        })
        .expect("relabeled extremal boxes are no-signaling")
    }

    fn describe(&self) -> String {
        let pairs: Vec<String> = self
            .matching
            .iter()
            .enumerate()
            .map(|(x, y)| {
                format!(
                    "E({x},{y}) -> {}",
                    if self.signs[x] > 0.0 { "+1" } else { "-1" }
                )
            })
            .collect();
        pairs.join(", ")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

fn candidates(n: usize) -> Vec<ExtCandidate> {
    let mut out = Vec::new();
    for matching in permutations(n) {
        for mask in 0..(1usize << n) {
            let signs = (0..n)
                .map(|x| if (mask >> x) & 1 == 0 { 1.0 } else { -1.0 })
                .collect();
            out.push(ExtCandidate {
                matching: matching.clone(),
                signs,
            });
        }
    }
    out
}

/// Remainder box (P - p·P_S)/(1-p), clamping the tiny negatives allowed by
/// the entrywise test.
fn remainder(boxed: &NoSignalingBox, part: &NoSignalingBox, p: f64) -> Result<NoSignalingBox> {
    NoSignalingBox::from_fn(boxed.nx, boxed.ny, boxed.na, boxed.nb, |x, y, a, b| {
        ((boxed.p(x, y, a, b) - p * part.p(x, y, a, b)) / (1.0 - p)).max(0.0)
    })
}

struct AcceptOutcome {
    lhs_residual: f64,
    freeness_residual: f64,
    model: Option<LhvLhsModel>,
    remainder: NoSignalingBox,
    entrywise_min: f64,
}

/// Schrödinger strength of a two- or three-setting dichotomic box with the
/// declared trusted measurement directions.
pub fn schrodinger_strength_box(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
    cfg: &SsConfig,
) -> Result<SsResult> {
    schrodinger_strength_box_bounded(boxed, trusted, cfg, 0.0)
}

/// As [`schrodinger_strength_box`], skipping candidates that cannot beat
/// `lower_bound` (used by the state-level outer search).
pub fn schrodinger_strength_box_bounded(
    boxed: &NoSignalingBox,
    trusted: &[Vector3<f64>],
    cfg: &SsConfig,
    lower_bound: f64,
) -> Result<SsResult> {
    let n = boxed.nx;
    if boxed.ny != n || !(2..=3).contains(&n) || boxed.na != 2 || boxed.nb != 2 {
        return Err(Error::UnsupportedScenario(format!(
            "Schrödinger strength supports square 2- or 3-setting dichotomic boxes, got {}x{}",
            boxed.nx, boxed.ny
        )));
    }
    if trusted.len() != n {
        return Err(Error::InvalidMeasurement(format!(
            "{} trusted directions for {n} settings",
            trusted.len()
        )));
    }

    // The same canonical extraction applies whether or not the input box is
    // itself 1SDI steerable; the base run only feeds the zero-extraction
    // certificate.
    let base = lhs_feasibility_box(boxed, trusted, &cfg.lhs)?;

    let mut freeness_cfg = cfg.freeness.clone();
    freeness_cfg.d_lambda = n;
    freeness_cfg.seed = cfg.seed;

    let accept = |part: &NoSignalingBox, p: f64| -> Result<Option<AcceptOutcome>> {
        let rem = remainder(boxed, part, p)?;
        let mut entry_min = f64::INFINITY;
        for x in 0..n {
            for y in 0..n {
                for a in 0..2 {
                    for b in 0..2 {
                        entry_min = entry_min
                            .min(boxed.p(x, y, a, b) - p * part.p(x, y, a, b));
                    }
                }
            }
        }
        if entry_min < -1e-12 {
            return Ok(None);
        }
        let lhs = lhs_feasibility_box(&rem, trusted, &cfg.lhs)?;
        if !lhs.is_feasible() {
            return Ok(None);
        }
        let (outcome, _) = lhvlhs_search(&rem, trusted, &freeness_cfg)?;
        match outcome {
            LhvLhsOutcome::ModelFound(model) => Ok(Some(AcceptOutcome {
                lhs_residual: lhs.residual(),
                freeness_residual: model.residual,
                model: Some(model),
                remainder: rem,
                entrywise_min: entry_min,
            })),
            LhvLhsOutcome::NoModelFound { .. } => Ok(None),
        }
    };

    let mut best: Option<(f64, ExtCandidate, NoSignalingBox, AcceptOutcome)> = None;
    let mut best_value = lower_bound;

    let mut ordered: Vec<(f64, ExtCandidate)> = candidates(n)
        .into_iter()
        .map(|cand| {
            // Sign-inversion cap: extracting beyond it would flip a matching
            // correlator of the remainder against the extracted sign.
            let p_cap = (0..n)
                .map(|x| cand.signs[x] * boxed.correlator(x, cand.matching[x]))
                .fold(f64::INFINITY, f64::min);
            (p_cap, cand)
        })
        .collect();
    ordered.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    for (p_cap, cand) in ordered {
        if p_cap <= best_value + cfg.bisection_tol {
            continue;
        }
        let part = cand.boxed(n);
        // Entrywise cap.
        let mut p_entry = 1.0f64;
        for x in 0..n {
            for y in 0..n {
                for a in 0..2 {
                    for b in 0..2 {
                        let ps = part.p(x, y, a, b);
                        if ps > 1e-12 {
                            p_entry =
                                p_entry.min((boxed.p(x, y, a, b) + 1e-12) / ps);
                        }
                    }
                }
            }
        }
        let p1 = p_cap.min(p_entry).min(1.0 - 1e-9);
        if p1 <= best_value + cfg.bisection_tol {
            continue;
        }

        // Fast path: the cap itself is usually the canonical weight.
        if let Some(out) = accept(&part, p1)? {
            if p1 > best_value {
                best_value = p1;
                best = Some((p1, cand, part, out));
            }
            continue;
        }

        // Find the largest weight passing nonnegativity + 1SDI by bisection
        // (downward closed for an unsteerable input box), then descend until
        // the remainder is also free.
        let lhs_ok = |p: f64| -> Result<bool> {
            let rem = remainder(boxed, &part, p)?;
            let mut entry_min = f64::INFINITY;
            for x in 0..n {
                for y in 0..n {
                    for a in 0..2 {
                        for b in 0..2 {
                            entry_min = entry_min
                                .min(boxed.p(x, y, a, b) - p * part.p(x, y, a, b));
                        }
                    }
                }
            }
            if entry_min < -1e-12 {
                return Ok(false);
            }
            Ok(lhs_feasibility_box(&rem, trusted, &cfg.lhs)?.is_feasible())
        };
        let mut lo = 0.0f64;
        let mut hi = p1;
        if lhs_ok(hi)? {
            lo = hi;
        } else {
            while hi - lo > cfg.bisection_tol {
                let mid = 0.5 * (lo + hi);
                if lhs_ok(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let p2 = lo;
        if p2 <= best_value + cfg.bisection_tol {
            continue;
        }
        for j in 0..=cfg.descent_steps {
            let p = p2 * (1.0 - j as f64 / cfg.descent_steps as f64);
            if p <= best_value {
                break;
            }
            if let Some(out) = accept(&part, p)? {
                best_value = p;
                best = Some((p, cand.clone(), part.clone(), out));
                break;
            }
        }
    }

    let result = match best {
        Some((p, cand, part, out)) => {
            let cert = SsCertificate {
                candidate: cand.describe(),
                entrywise_min: out.entrywise_min,
                lhs_residual: out.lhs_residual,
                freeness_residual: out.freeness_residual,
                reconstruction_residual: 0.0,
            };
            let mut r = SsResult {
                value: p,
                steerable_part: part,
                unsteerable_part: out.remainder,
                certificate: cert,
                remainder_model: out.model,
            };
            r.certificate.reconstruction_residual = r.reconstruction_residual(boxed);
            r
        }
        None => {
            // Zero extraction: the box is its own unsteerable part.
            let part = candidates(n)[0].boxed(n);
            let mut r = SsResult {
                value: 0.0,
                steerable_part: part,
                unsteerable_part: boxed.clone(),
                certificate: SsCertificate {
                    candidate: "no extractable weight".into(),
                    entrywise_min: 0.0,
                    lhs_residual: base.residual(),
                    freeness_residual: 0.0,
                    reconstruction_residual: 0.0,
                },
                remainder_model: None,
            };
            r.certificate.reconstruction_residual = r.reconstruction_residual(boxed);
            r
        }
    };
    Ok(result)
}

/// State-level search configuration.
#[derive(Debug, Clone)]
pub struct StateSsConfig {
    pub seed: u64,
    /// Widen the tuple search beyond the correlation-aligned frames with a
    /// coarse orientation grid plus simplex refinement. Exploratory: tilted
    /// tuples can admit larger extractions than the aligned scenario that
    /// defines the published closed forms.
    pub wide_search: bool,
    /// Coarse grid step over Bob-tuple orientations, degrees (wide search).
    pub coarse_step_deg: f64,
    /// Tuples promoted from the pre-screen to full box solves (wide search).
    pub screen_top: usize,
    /// Simplex iterations refining the best tuple orientation (wide search).
    pub refine_iters: usize,
    pub box_cfg: SsConfig,
}

impl Default for StateSsConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            wide_search: false,
            coarse_step_deg: 15.0,
            screen_top: 8,
            refine_iters: 25,
            box_cfg: SsConfig::default(),
        }
    }
}

/// State-level outcome: the optimal value with the measurement tuple that
/// achieved it.
#[derive(Debug, Clone)]
pub struct StateSsResult {
    pub value: f64,
    pub alice_directions: Vec<Vector3<f64>>,
    pub bob_directions: Vec<Vector3<f64>>,
    pub box_result: SsResult,
}

struct TupleContext {
    rep_t: Matrix3<f64>,
}

impl TupleContext {
    /// Alice's best-response directions maximize the matching correlators
    /// m_x = T n_x / |T n_x|.
    fn alice_for(&self, bob: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        bob.iter()
            .map(|n| {
                let tn = self.rep_t * n;
                if tn.norm() > 1e-9 {
                    tn.normalize()
                } else {
                    crate::linalg::orthonormal_complement(n).0
                }
            })
            .collect()
    }
}

fn bob_tuple_from_params(params: &[f64], n: usize) -> Vec<Vector3<f64>> {
    let n0 = crate::linalg::spherical_direction(params[0], params[1]);
    let (u, v) = crate::linalg::orthonormal_complement(&n0);
    let n1 = u * params[2].cos() + v * params[2].sin();
    let mut dirs = vec![n0, n1];
    if n == 3 {
        dirs.push(n0.cross(&n1).normalize());
    }
    dirs
}

/// Cheap upper-bound style score of a measurement tuple: the best
/// over setting matchings of the minimal matching correlator.
fn prescreen_score(boxed: &NoSignalingBox) -> f64 {
    let n = boxed.nx;
    permutations(n)
        .iter()
        .map(|matching| {
            (0..n)
                .map(|x| boxed.correlator(x, matching[x]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Schrödinger strength of a two-qubit state in the n-setting scenario
/// (n = 2 or 3): maximize the box-level strength over Bob MUB n-tuples with
/// Alice playing the best-response directions T n_x / |T n_x|.
///
/// By default the tuples range over the frames aligned with the singular
/// vectors of the spin correlation matrix, which realize the closed-form
/// values of the Bell-diagonal family; `wide_search` adds a coarse
/// orientation grid plus simplex refinement on top.
pub fn schrodinger_strength_state(
    rho: &DensityMatrix,
    n_settings: usize,
    cfg: &StateSsConfig,
) -> Result<StateSsResult> {
    if !(2..=3).contains(&n_settings) {
        return Err(Error::UnsupportedScenario(format!(
            "state-level strength supports 2 or 3 settings, got {n_settings}"
        )));
    }
    let rep = rho.pauli_decompose()?;
    let ctx = TupleContext { rep_t: rep.t };

    let make_box = |bob: &[Vector3<f64>]| -> Result<(NoSignalingBox, Vec<Vector3<f64>>)> {
        let alice = ctx.alice_for(bob);
        let alice_bases: Vec<QubitBasis> = alice
            .iter()
            .map(|d| QubitBasis::new(*d))
            .collect::<Result<_>>()?;
        let bob_bases: Vec<QubitBasis> = bob
            .iter()
            .map(|d| QubitBasis::new(*d))
            .collect::<Result<_>>()?;
        Ok((
            crate::assemblage::box_from_state(rho, &alice_bases, &bob_bases)?,
            alice,
        ))
    };

    // Singular-vector aligned tuples.
    let svd = rep.t.svd(true, true);
    let v_t = svd.v_t.expect("3x3 svd");
    let right: Vec<Vector3<f64>> = (0..3).map(|i| v_t.row(i).transpose()).collect();
    let mut tuples: Vec<Vec<Vector3<f64>>> = Vec::new();
    if n_settings == 2 {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            tuples.push(vec![right[i], right[j]]);
        }
    } else {
        tuples.push(vec![right[0], right[1], right[2]]);
        tuples.push(vec![right[0], right[2], right[1]]);
    }
    // Coordinate axes as a fallback when T is degenerate.
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    if n_settings == 2 {
        tuples.push(vec![axes[0], axes[1]]);
    } else {
        tuples.push(axes.to_vec());
    }

    // Coarse orientation grid, ranked by the cheap pre-screen.
    let step = if cfg.wide_search {
        cfg.coarse_step_deg.to_radians()
    } else {
        f64::INFINITY
    };
    let n_theta = if cfg.wide_search {
        (std::f64::consts::FRAC_PI_2 / step).ceil() as usize + 1
    } else {
        0
    };
    let n_phi = (2.0 * std::f64::consts::PI / step.min(1.0)).ceil() as usize;
    let n_psi = (std::f64::consts::PI / step.min(1.0)).ceil() as usize;
    let mut scored: Vec<(f64, Vec<Vector3<f64>>)> = Vec::new();
    for it in 0..n_theta {
        let theta = (it as f64 * step).min(std::f64::consts::FRAC_PI_2);
        for ip in 0..n_phi {
            let phi = ip as f64 * step;
            for is in 0..n_psi {
                let psi = is as f64 * step;
                let bob = bob_tuple_from_params(&[theta, phi, psi], n_settings);
                let Ok((boxed, _)) = make_box(&bob) else {
                    continue;
                };
                scored.push((prescreen_score(&boxed), bob));
            }
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for (_, bob) in scored.into_iter().take(cfg.screen_top) {
        tuples.push(bob);
    }

    // Full evaluation with best-so-far pruning; the pre-screen score is an
    // upper bound on the capped extraction, so dominated tuples are skipped.
    let mut best: Option<StateSsResult> = None;
    let mut best_value = 0.0f64;
    for bob in &tuples {
        let (boxed, alice) = make_box(bob)?;
        if best.is_some() && prescreen_score(&boxed) <= best_value + cfg.box_cfg.bisection_tol {
            continue;
        }
        let r = schrodinger_strength_box_bounded(&boxed, bob, &cfg.box_cfg, best_value)?;
        if r.value > best_value || best.is_none() {
            best_value = r.value.max(best_value);
            best = Some(StateSsResult {
                value: r.value,
                alice_directions: alice,
                bob_directions: bob.clone(),
                box_result: r,
            });
        }
    }
    let mut best = best.expect("at least one tuple evaluated");

    // Simplex refinement of the winning orientation (wide search only),
    // skipped when the winner already attains its pre-screen upper bound.
    let at_bound = {
        let (boxed, _) = make_box(&best.bob_directions)?;
        best.value + 2.0 * cfg.box_cfg.bisection_tol >= prescreen_score(&boxed)
    };
    if cfg.wide_search && cfg.refine_iters > 0 && !at_bound {
        let b0 = best.bob_directions[0];
        let theta0 = b0.z.clamp(-1.0, 1.0).acos();
        let phi0 = b0.y.atan2(b0.x);
        let (u, v) = crate::linalg::orthonormal_complement(&b0);
        let b1 = best.bob_directions[1];
        let psi0 = v.dot(&b1).atan2(u.dot(&b1));
        let floor = best.value;
        let mut objective = |p: &[f64]| -> f64 {
            let bob = bob_tuple_from_params(p, n_settings);
            let Ok((boxed, _)) = make_box(&bob) else {
                return 0.0;
            };
            if prescreen_score(&boxed) <= floor - 2.0 * cfg.box_cfg.bisection_tol {
                return 0.0;
            }
            schrodinger_strength_box_bounded(
                &boxed,
                &bob,
                &cfg.box_cfg,
                floor - 2.0 * cfg.box_cfg.bisection_tol,
            )
            .map(|r| r.value)
            .unwrap_or(0.0)
        };
        let (pbest, vbest) = crate::optimize::nelder_mead_max(
            &mut objective,
            &[theta0, phi0, psi0],
            0.05,
            1e-6,
            cfg.refine_iters,
        );
        if vbest > best.value {
            let bob = bob_tuple_from_params(&pbest, n_settings);
            let (boxed, alice) = make_box(&bob)?;
            let r = schrodinger_strength_box_bounded(&boxed, &bob, &cfg.box_cfg, 0.0)?;
            if r.value > best.value {
                best = StateSsResult {
                    value: r.value,
                    alice_directions: alice,
                    bob_directions: bob,
                    box_result: r,
                };
            }
        }
    }

    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemblage::{mub_pair, mub_triple};
    use crate::bell::BellDiagonalParams;
    use crate::catalog;
    use approx::assert_relative_eq;

    fn bd(c1: f64, c2: f64, c3: f64) -> DensityMatrix {
        BellDiagonalParams::new(Vector3::new(c1, c2, c3))
            .unwrap()
            .compose()
            .unwrap()
    }

    #[test]
    fn bb84_strength_equals_noise_weight() {
        let cfg = SsConfig::default();
        let r =
            schrodinger_strength_box(&catalog::bb84_box(0.6), &mub_pair(), &cfg).unwrap();
        assert_relative_eq!(r.value, 0.6, epsilon = 1e-3);
        // Canonical parts: the extremal box and white noise.
        assert!(r
            .unsteerable_part
            .max_deviation(&catalog::noise_box(2))
            < 1e-6);
        assert!(r.reconstruction_residual(&catalog::bb84_box(0.6)) < 1e-9);
    }

    #[test]
    fn white_noise_strength_is_zero() {
        let cfg = SsConfig::default();
        let r = schrodinger_strength_box(&catalog::noise_box(2), &mub_pair(), &cfg).unwrap();
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_diagonal_two_setting_box_strength_is_second_correlator() {
        let rho = bd(0.5, 0.3, 0.1);
        let bases = [QubitBasis::x(), QubitBasis::y()];
        let boxed = crate::assemblage::box_from_state(&rho, &bases, &bases).unwrap();
        let r = schrodinger_strength_box(&boxed, &mub_pair(), &SsConfig::default()).unwrap();
        assert_relative_eq!(r.value, 0.3, epsilon = 1e-3);
        assert!(r.reconstruction_residual(&boxed) < 1e-9);
    }

    #[test]
    fn steerable_boxes_use_the_same_canonical_extraction() {
        // Above the 1SDI threshold the BB84 box still decomposes as
        // V·P_Ext + (1-V)·noise.
        let r = schrodinger_strength_box(
            &catalog::bb84_box(0.9),
            &mub_pair(),
            &SsConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 0.9, epsilon = 1e-3);
    }

    #[test]
    fn accepted_weight_is_downward_closed_for_lhs_checks() {
        // Sampled monotonicity of the nonnegativity + 1SDI predicate.
        let boxed = catalog::bb84_box(0.55);
        let cfg = SsConfig::default();
        let r = schrodinger_strength_box(&boxed, &mub_pair(), &cfg).unwrap();
        for frac in [0.5, 0.25] {
            let p = r.value * frac;
            let rem = super::remainder(&boxed, &r.steerable_part, p).unwrap();
            assert!(
                lhs_feasibility_box(&rem, &mub_pair(), &cfg.lhs)
                    .unwrap()
                    .is_feasible(),
                "p = {p}"
            );
        }
    }

    #[test]
    fn state_strength_two_settings_matches_second_correlator() {
        let r = schrodinger_strength_state(&bd(0.5, 0.3, 0.1), 2, &StateSsConfig::default())
            .unwrap();
        assert_relative_eq!(r.value, 0.3, epsilon = 1e-3);
    }

    #[test]
    fn state_strength_three_settings_matches_third_correlator() {
        let r = schrodinger_strength_state(&bd(0.5, 0.3, 0.1), 3, &StateSsConfig::default())
            .unwrap();
        assert_relative_eq!(r.value, 0.1, epsilon = 1e-2);
    }

    #[test]
    fn maximally_mixed_state_has_zero_strength() {
        let r = schrodinger_strength_state(
            &DensityMatrix::maximally_mixed(2, 2),
            2,
            &StateSsConfig::default(),
        )
        .unwrap();
        assert!(r.value < 1e-6);
    }

    #[test]
    fn trine_state_strengths() {
        // τ'' has SS₂ = 1/2 and SS₃ = 0.
        let rho = catalog::tau_dprime();
        let r2 = schrodinger_strength_state(&rho, 2, &StateSsConfig::default()).unwrap();
        assert_relative_eq!(r2.value, 0.5, epsilon = 1e-3);
        let r3 = schrodinger_strength_state(&rho, 3, &StateSsConfig::default()).unwrap();
        assert!(r3.value < 1e-2, "SS3 = {}", r3.value);
    }

    #[test]
    fn three_setting_box_strength_on_mub_triple() {
        let rho = bd(0.5, 0.3, 0.1);
        let bases = [QubitBasis::x(), QubitBasis::y(), QubitBasis::z()];
        let boxed = crate::assemblage::box_from_state(&rho, &bases, &bases).unwrap();
        let r = schrodinger_strength_box(&boxed, &mub_triple(), &SsConfig::default()).unwrap();
        assert_relative_eq!(r.value, 0.1, epsilon = 1e-3);
    }
}
