//! Per-state correlation reports and plot-ready parameter sweeps.

use crate::bell::{BdProfile, BellDiagonalParams};
use crate::error::{Error, Result};
use crate::measures::{classify_from_profile, scmub_profile, Classification, ScmubProfile};
use crate::qse::{classify_qse_state, steering_ellipsoid, SteeringDirection};
use crate::state::{DensityMatrix, QubitBasis};
use crate::steering::lhs::FeasibilityReport;
use crate::steering::lhvlhs::{superunsteerability_verdict, LhvLhsConfig, SuperunsteerabilityVerdict};
use crate::steering::strength::{schrodinger_strength_state, StateSsConfig};
use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

/// Schema version of the report JSON.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Geometry summary of Bob's steering ellipsoid.
#[derive(Debug, Clone, Serialize)]
pub struct QseSummary {
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
    pub axes: [[f64; 3]; 3],
    pub dimension_class: usize,
    pub normalized_volume: f64,
    pub complete_steering: bool,
    pub discord_zero_needle_flag: bool,
}

/// Steering verdicts computed by the deep solvers.
#[derive(Debug, Clone, Serialize)]
pub struct SteeringSummary {
    /// SS lower bound in the two-setting scenario.
    pub ss2: f64,
    /// SS lower bound in the three-setting scenario.
    pub ss3: f64,
    /// 1SDI feasibility of the box measured in the C₁/Q₂ bases.
    pub lhs_1sdi: FeasibilityReport,
    /// 1SSDI verdict for that box with hidden dimension 2.
    pub verdict_1ssdi: String,
    pub verdict_residual: f64,
}

/// Solver provenance: seeds, tolerances, and timing.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub eps_opt: f64,
    pub wall_time_ms: f64,
}

/// Full per-state analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub input: String,
    pub profile: ScmubProfile,
    pub classification: Classification,
    /// Present when the state is Bell diagonal.
    pub bd_profile: Option<BdProfile>,
    pub qse: QseSummary,
    /// Present when the heavy solvers ran (`--deep`).
    pub steering: Option<SteeringSummary>,
    pub meta: ReportMeta,
}

/// Detect a Bell-diagonal state and return its closed-form profile.
pub fn bd_profile_if_applicable(rho: &DensityMatrix) -> Option<BdProfile> {
    let rep = rho.pauli_decompose().ok()?;
    if rep.a.norm() > 1e-10 || rep.b.norm() > 1e-10 {
        return None;
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j && rep.t[(i, j)].abs() > 1e-10 {
                return None;
            }
        }
    }
    let params = BellDiagonalParams::new(rep.t.diagonal()).ok()?;
    let (canonical, _) = params.canonicalize();
    canonical.profile().ok()
}

/// Run the full analysis pipeline on a state.
pub fn analyze(rho: &DensityMatrix, input: &str, deep: bool, seed: u64) -> Result<CorrelationReport> {
    let start = std::time::Instant::now();
    let profile = scmub_profile(rho)?;

    let steering = if deep {
        let cfg = StateSsConfig {
            seed,
            ..Default::default()
        };
        let ss2 = schrodinger_strength_state(rho, 2, &cfg)?;
        let ss3 = schrodinger_strength_state(rho, 3, &cfg)?;

        // 1SSDI verdict for the box measured in the C₁ and Q₂ bases with the
        // same MUB pair trusted on Bob's side.
        let n1 = profile.c1_basis;
        let n2 = orthogonalize(&profile.q2_basis, &n1);
        let alice = [QubitBasis::new(n1)?, QubitBasis::new(n2)?];
        let boxed = crate::assemblage::box_from_state(rho, &alice, &alice)?;
        let trusted = vec![n1, n2];
        let lhs = crate::steering::lhs::lhs_feasibility_box(
            &boxed,
            &trusted,
            &crate::steering::lhs::LhsConfig::default(),
        )?;
        let lcfg = LhvLhsConfig {
            seed,
            ..Default::default()
        };
        let verdict = superunsteerability_verdict(&boxed, &trusted, &lcfg)?;
        let (verdict_1ssdi, verdict_residual) = match &verdict {
            SuperunsteerabilityVerdict::NotApplicable { lhs_residual } => {
                ("not_applicable_1sdi_steerable".to_string(), *lhs_residual)
            }
            SuperunsteerabilityVerdict::Superunsteerable { best_residual } => {
                ("superunsteerable".to_string(), *best_residual)
            }
            SuperunsteerabilityVerdict::ModelFound(m) => ("model_found".to_string(), m.residual),
        };
        Some(SteeringSummary {
            ss2: ss2.value,
            ss3: ss3.value,
            lhs_1sdi: FeasibilityReport::from(&lhs),
            verdict_1ssdi,
            verdict_residual,
        })
    } else {
        None
    };

    let classification =
        classify_from_profile(rho, &profile, steering.as_ref().map(|s| s.ss2))?;
    let qse_class = classify_qse_state(rho)?;
    let ell = steering_ellipsoid(rho, SteeringDirection::BGivenA)?;
    let qse = QseSummary {
        center: [ell.center.x, ell.center.y, ell.center.z],
        semi_axes: ell.semi_axes,
        axes: ell.axes.map(|a| [a.x, a.y, a.z]),
        dimension_class: qse_class.dimension_class,
        normalized_volume: qse_class.normalized_volume,
        complete_steering: qse_class.complete_steering,
        discord_zero_needle_flag: qse_class.discord_zero_needle_flag,
    };

    Ok(CorrelationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        input: input.to_string(),
        bd_profile: bd_profile_if_applicable(rho),
        qse,
        steering,
        meta: ReportMeta {
            seed,
            eps_opt: profile.eps_opt,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        profile,
        classification,
    })
}

fn orthogonalize(v: &Vector3<f64>, against: &Vector3<f64>) -> Vector3<f64> {
    let w = v - against * against.dot(v);
    if w.norm() > 1e-9 {
        w.normalize()
    } else {
        crate::linalg::orthonormal_complement(against).0
    }
}

/// One sweep output row.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub semi_axes: [f64; 3],
    pub c1: f64,
    pub q2: f64,
    pub q3: f64,
    pub ss2: f64,
    pub ss3: f64,
    pub discord: f64,
    pub qse_volume: f64,
}

/// Inclusive numeric range with step, parsed from `lo:hi:step`.
#[derive(Debug, Clone, Copy)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridRange {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::BadGrid(format!("`{s}` is not a number")))
        };
        match parts.as_slice() {
            [single] => {
                let v = parse(single)?;
                Ok(Self {
                    lo: v,
                    hi: v,
                    step: 1.0,
                })
            }
            [lo, hi, step] => {
                let r = Self {
                    lo: parse(lo)?,
                    hi: parse(hi)?,
                    step: parse(step)?,
                };
                if r.step <= 0.0 || r.hi < r.lo {
                    return Err(Error::BadGrid(format!("bad range `{text}`")));
                }
                Ok(r)
            }
            _ => Err(Error::BadGrid(format!(
                "range `{text}` must be `value` or `lo:hi:step`"
            ))),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// Sweep over the two-parameter Bell-diagonal family τ(p, q); rows in
/// row-major (p outer, q inner) order.
pub fn sweep_bd2param(p_range: &GridRange, q_range: &GridRange) -> Result<Vec<SweepRow>> {
    let ps = p_range.values();
    let qs = q_range.values();
    let points: Vec<(f64, f64)> = ps
        .iter()
        .flat_map(|&p| qs.iter().map(move |&q| (p, q)))
        .filter(|&(p, q)| q <= p && p + q <= 1.0 + 1e-12)
        .collect();
    if points.is_empty() {
        return Err(Error::BadGrid(
            "empty grid: no (p, q) points satisfy 0 <= q <= p, p + q <= 1".into(),
        ));
    }
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(p, q)| {
            let (_, profile, _) = crate::bell::two_param(p, q)?;
            Ok(SweepRow {
                params: vec![("p".into(), p), ("q".into(), q)],
                semi_axes: [p, p, p - q],
                c1: profile.c1,
                q2: profile.q2,
                q3: profile.q3,
                ss2: profile.ss2,
                ss3: profile.ss3,
                discord: profile.discord,
                qse_volume: profile.qse_volume,
            })
        })
        .collect::<Result<_>>()?;
    Ok(rows)
}

/// Sweep over Bell-diagonal correlators. Each range is independent; the
/// aliases `c2 = "c1"` style linking is handled by the caller passing equal
/// ranges. Invalid correlator triples are skipped.
pub fn sweep_bd(
    c1_range: &GridRange,
    c2_range: &GridRange,
    c3_range: &GridRange,
    linked: (bool, bool),
) -> Result<Vec<SweepRow>> {
    let c1s = c1_range.values();
    let mut points: Vec<[f64; 3]> = Vec::new();
    for &c1 in &c1s {
        let c2s = if linked.0 { vec![c1] } else { c2_range.values() };
        for &c2 in &c2s {
            let c3s = if linked.1 { vec![c2] } else { c3_range.values() };
            for &c3 in &c3s {
                if BellDiagonalParams::new(Vector3::new(c1, c2, c3)).is_ok() {
                    points.push([c1, c2, c3]);
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::BadGrid("empty grid: no valid correlator triples".into()));
    }
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&[c1, c2, c3]| {
            let params = BellDiagonalParams::new(Vector3::new(c1, c2, c3))?;
            let (canonical, _) = params.canonicalize();
            let profile = canonical.profile()?;
            let c = canonical.c();
            Ok(SweepRow {
                params: vec![("c1".into(), c1), ("c2".into(), c2), ("c3".into(), c3)],
                semi_axes: [c[0].abs(), c[1].abs(), c[2].abs()],
                c1: profile.c1,
                q2: profile.q2,
                q3: profile.q3,
                ss2: profile.ss2,
                ss3: profile.ss3,
                discord: profile.discord,
                qse_volume: profile.qse_volume,
            })
        })
        .collect::<Result<_>>()?;
    Ok(rows)
}

/// CSV header shared by both sweep families.
pub fn sweep_csv_header(family_params: &[&str]) -> String {
    let mut cols: Vec<String> = family_params.iter().map(|s| s.to_string()).collect();
    cols.extend(
        [
            "semi_axis_1",
            "semi_axis_2",
            "semi_axis_3",
            "c1_bits",
            "q2_bits",
            "q3_bits",
            "ss2",
            "ss3",
            "discord_bits",
            "qse_volume",
        ]
        .map(String::from),
    );
    cols.join(",")
}

pub fn sweep_csv_row(row: &SweepRow) -> String {
    let mut cols: Vec<String> = row.params.iter().map(|(_, v)| format!("{v:.12}")).collect();
    for v in [
        row.semi_axes[0],
        row.semi_axes[1],
        row.semi_axes[2],
        row.c1,
        row.q2,
        row.q3,
        row.ss2,
        row.ss3,
        row.discord,
        row.qse_volume,
    ] {
        cols.push(format!("{v:.12}"));
    }
    cols.join(",")
}
