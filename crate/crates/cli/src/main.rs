//! `qcorr`: command-line front-end for the correlation toolkit.
//!
//! Subcommands: `analyze` (per-state report), `sweep` (plot-ready CSV over
//! Bell-diagonal families), `steering` (feasibility and strength solvers),
//! `catalog` (available states and boxes), `verify-paper` (golden-value
//! verification table).
//!
//! Exit codes: 0 success, 1 validation error, 2 solver failure,
//! 3 verification failure.

use clap::{Args, Parser, Subcommand};
use qcorr_core::error::Error;
use qcorr_core::io;
use qcorr_core::report::{self, GridRange};
use qcorr_core::steering::lhs::{lhs_feasibility_box, FeasibilityReport, LhsConfig};
use qcorr_core::steering::lhvlhs::{
    lhvlhs_search, superunsteerability_verdict, LhvLhsConfig, SuperunsteerabilityVerdict,
};
use qcorr_core::steering::strength::{schrodinger_strength_box, SsConfig};
use qcorr_core::verification::{self, VerifyOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation measures, steering solvers, and steering-ellipsoid geometry for two-qubit states"
)]
struct Cli {
    /// Seed for all stochastic searches.
    #[arg(long, global = true, default_value_t = qcorr_core::DEFAULT_SEED)]
    seed: u64,
    /// Indentation of JSON output (compact when 0).
    #[arg(long, global = true, default_value_t = 2)]
    json_indent: usize,
    /// Write the primary output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a state: SCMUB profile, discord, hierarchy class, QSE
    /// geometry, and (with --deep) steering verdicts.
    Analyze(AnalyzeArgs),
    /// Sweep a Bell-diagonal family and emit plot-ready CSV.
    Sweep(SweepArgs),
    /// Run the steering solvers on a box or a state with measurements.
    Steering(SteeringArgs),
    /// List catalog ids with parameter schemas.
    Catalog,
    /// Check every golden value and print a pass/fail table.
    VerifyPaper(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State reference: `catalog:<id>[?k=v,...]` or a state-spec JSON path.
    state: String,
    /// Run the heavy solvers (Schrödinger strengths, 1SSDI search).
    #[arg(long)]
    deep: bool,
    /// Also write a CSV surface mesh of Bob's steering ellipsoid.
    #[arg(long)]
    qse_mesh: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Family: `bd2param` (two-parameter mixture) or `bd` (correlators).
    #[arg(long)]
    family: String,
    /// Range `lo:hi:step` or single value for p (bd2param).
    #[arg(long, default_value = "0:1:0.05")]
    p: String,
    /// Range for q (bd2param).
    #[arg(long, default_value = "0")]
    q: String,
    /// Range for c1 (bd).
    #[arg(long, default_value = "0:0.9:0.1")]
    c1: String,
    /// Range for c2 (bd), or `=c1` to track c1.
    #[arg(long, default_value = "0")]
    c2: String,
    /// Range for c3 (bd), or `=c2` to track c2.
    #[arg(long, default_value = "0")]
    c3: String,
}

#[derive(Args)]
struct SteeringArgs {
    /// Box reference (`catalog:box_bb84?v=0.5` or a box JSON path).
    #[arg(long, conflicts_with = "state")]
    r#box: Option<String>,
    /// State reference; requires --alice and --bob measurement directions.
    #[arg(long)]
    state: Option<String>,
    /// Alice measurement Bloch directions, e.g. "1,0,0;0,1,0".
    #[arg(long)]
    alice: Option<String>,
    /// Bob measurement Bloch directions (also the trusted directions).
    #[arg(long)]
    bob: Option<String>,
    /// Trusted directions for box inputs; defaults to x;y (plus z for three
    /// settings).
    #[arg(long)]
    trusted: Option<String>,
    /// Which check to run: 1sdi | 1ssdi | ss.
    #[arg(long)]
    check: String,
    /// Hidden-variable dimension bound for the 1ssdi search.
    #[arg(long, default_value_t = 2)]
    d_lambda: usize,
    /// Fine-grid exhaustive 1ssdi search (two-setting scenarios).
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only claims whose id starts with this prefix.
    #[arg(long)]
    only: Option<String>,
    /// Tolerance overrides `substring=value`, repeatable.
    #[arg(long)]
    tolerance: Vec<String>,
    /// Criteria to run (1..=9), repeatable; all when omitted.
    #[arg(long)]
    criterion: Vec<u8>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::UnsupportedScenario(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(cli, args),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Steering(args) => cmd_steering(cli, args),
        Command::Catalog => cmd_catalog(cli),
        Command::VerifyPaper(args) => cmd_verify(cli, args),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::ParseError(format!("writing {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(cli: &Cli, value: &T) -> Result<String, Error> {
    let result = if cli.json_indent == 0 {
        serde_json::to_string(value)
    } else {
        let indent = vec![b' '; cli.json_indent];
        let mut buf = Vec::new();
        let fmt = serde_json::ser::PrettyFormatter::with_indent(&indent);
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        value
            .serialize(&mut ser)
            .map(|_| String::from_utf8_lossy(&buf).into_owned())
    };
    result.map_err(|e| Error::ParseError(format!("serializing output: {e}")))
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<ExitCode, Error> {
    let rho = io::resolve_state_ref(&args.state)?;
    let report = report::analyze(&rho, &args.state, args.deep, cli.seed)?;
    if let Some(mesh_path) = &args.qse_mesh {
        let ell = qcorr_core::qse::steering_ellipsoid(
            &rho,
            qcorr_core::qse::SteeringDirection::BGivenA,
        )?;
        let mut csv = String::from("x,y,z\n");
        for p in ell.surface_mesh(32, 64) {
            csv.push_str(&format!("{:.9},{:.9},{:.9}\n", p[0], p[1], p[2]));
        }
        std::fs::write(mesh_path, csv)
            .map_err(|e| Error::ParseError(format!("writing {}: {e}", mesh_path.display())))?;
    }
    emit(cli, &to_json(cli, &report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<ExitCode, Error> {
    let (header, rows) = match args.family.as_str() {
        "bd2param" => {
            let rows = report::sweep_bd2param(
                &GridRange::parse(&args.p)?,
                &GridRange::parse(&args.q)?,
            )?;
            (report::sweep_csv_header(&["p", "q"]), rows)
        }
        "bd" => {
            let linked_c2 = args.c2.trim() == "=c1";
            let linked_c3 = args.c3.trim() == "=c2";
            let one = GridRange::parse("0").unwrap();
            let c2 = if linked_c2 {
                one
            } else {
                GridRange::parse(&args.c2)?
            };
            let c3 = if linked_c3 {
                one
            } else {
                GridRange::parse(&args.c3)?
            };
            let rows = report::sweep_bd(
                &GridRange::parse(&args.c1)?,
                &c2,
                &c3,
                (linked_c2, linked_c3),
            )?;
            (report::sweep_csv_header(&["c1", "c2", "c3"]), rows)
        }
        other => {
            return Err(Error::BadGrid(format!(
                "unknown family `{other}`; expected bd or bd2param"
            )))
        }
    };
    let mut csv = header;
    csv.push('\n');
    for row in &rows {
        csv.push_str(&report::sweep_csv_row(row));
        csv.push('\n');
    }
    emit(cli, csv.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn parse_directions(text: &str) -> Result<Vec<nalgebra::Vector3<f64>>, Error> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|triple| {
            let parts: Vec<f64> = triple
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::ParseError(format!("direction component `{v}`")))
                })
                .collect::<Result<_, _>>()?;
            if parts.len() != 3 {
                return Err(Error::ParseError(format!(
                    "direction `{triple}` needs three components"
                )));
            }
            let v = nalgebra::Vector3::new(parts[0], parts[1], parts[2]);
            if v.norm() < 1e-12 {
                return Err(Error::ParseError("zero direction".into()));
            }
            Ok(v.normalize())
        })
        .collect()
}

#[derive(serde::Serialize)]
struct SteeringReport {
    check: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhs: Option<FeasibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<qcorr_core::steering::lhvlhs::LhvLhsModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ss_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<qcorr_core::steering::strength::SsCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unsteerable_part: Option<qcorr_core::assemblage::NoSignalingBox>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steerable_part: Option<qcorr_core::assemblage::NoSignalingBox>,
}

fn cmd_steering(cli: &Cli, args: &SteeringArgs) -> Result<ExitCode, Error> {
    // Assemble the box and the trusted directions.
    let (boxed, trusted) = if let Some(box_ref) = &args.r#box {
        let boxed = io::resolve_box_ref(box_ref)?;
        let trusted = match &args.trusted {
            Some(t) => parse_directions(t)?,
            None => match boxed.ny {
                2 => qcorr_core::assemblage::mub_pair().to_vec(),
                3 => qcorr_core::assemblage::mub_triple().to_vec(),
                n => {
                    return Err(Error::UnsupportedScenario(format!(
                        "no default trusted directions for {n} settings"
                    )))
                }
            },
        };
        (boxed, trusted)
    } else if let Some(state_ref) = &args.state {
        let rho = io::resolve_state_ref(state_ref)?;
        let alice_dirs = parse_directions(args.alice.as_deref().ok_or_else(|| {
            Error::InvalidMeasurement("--state requires --alice directions".into())
        })?)?;
        let bob_dirs = parse_directions(args.bob.as_deref().ok_or_else(|| {
            Error::InvalidMeasurement("--state requires --bob directions".into())
        })?)?;
        let alice: Vec<qcorr_core::QubitBasis> = alice_dirs
            .iter()
            .map(|d| qcorr_core::QubitBasis::new(*d))
            .collect::<Result<_, _>>()?;
        let bob: Vec<qcorr_core::QubitBasis> = bob_dirs
            .iter()
            .map(|d| qcorr_core::QubitBasis::new(*d))
            .collect::<Result<_, _>>()?;
        (
            qcorr_core::assemblage::box_from_state(&rho, &alice, &bob)?,
            bob_dirs,
        )
    } else {
        return Err(Error::InvalidMeasurement(
            "steering requires --box or --state".into(),
        ));
    };

    let mut out = SteeringReport {
        check: args.check.clone(),
        seed: cli.seed,
        lhs: None,
        verdict: None,
        best_residual: None,
        model: None,
        ss_value: None,
        certificate: None,
        unsteerable_part: None,
        steerable_part: None,
    };

    match args.check.as_str() {
        "1sdi" => {
            let f = lhs_feasibility_box(&boxed, &trusted, &LhsConfig::default())?;
            out.lhs = Some(FeasibilityReport::from(&f));
        }
        "1ssdi" => {
            let cfg = LhvLhsConfig {
                seed: cli.seed,
                d_lambda: args.d_lambda,
                exhaustive: args.exhaustive,
                ..Default::default()
            };
            if args.d_lambda == 2 {
                match superunsteerability_verdict(&boxed, &trusted, &cfg)? {
                    SuperunsteerabilityVerdict::NotApplicable { lhs_residual } => {
                        out.verdict = Some("not_applicable_1sdi_steerable".into());
                        out.best_residual = Some(lhs_residual);
                    }
                    SuperunsteerabilityVerdict::Superunsteerable { best_residual } => {
                        out.verdict = Some("superunsteerable".into());
                        out.best_residual = Some(best_residual);
                    }
                    SuperunsteerabilityVerdict::ModelFound(m) => {
                        out.verdict = Some("model_found".into());
                        out.best_residual = Some(m.residual);
                        out.model = Some(m);
                    }
                }
            } else {
                let (outcome, stats) = lhvlhs_search(&boxed, &trusted, &cfg)?;
                out.best_residual = Some(stats.best_residual);
                match outcome {
                    qcorr_core::steering::lhvlhs::LhvLhsOutcome::ModelFound(m) => {
                        out.verdict = Some("model_found".into());
                        out.model = Some(m);
                    }
                    qcorr_core::steering::lhvlhs::LhvLhsOutcome::NoModelFound { .. } => {
                        out.verdict = Some("no_model_found".into());
                    }
                }
            }
        }
        "ss" => {
            let cfg = SsConfig {
                seed: cli.seed,
                ..Default::default()
            };
            let r = schrodinger_strength_box(&boxed, &trusted, &cfg)?;
            out.ss_value = Some(r.value);
            out.certificate = Some(r.certificate.clone());
            out.steerable_part = Some(r.steerable_part.clone());
            out.unsteerable_part = Some(r.unsteerable_part.clone());
        }
        other => {
            return Err(Error::ParseError(format!(
                "unknown check `{other}`; expected 1sdi, 1ssdi, or ss"
            )))
        }
    }
    emit(cli, &to_json(cli, &out)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog(cli: &Cli) -> Result<ExitCode, Error> {
    let mut text = String::new();
    for entry in qcorr_core::catalog::entries() {
        text.push_str(&format!(
            "{:<16} [{}] {}\n",
            entry.id, entry.kind, entry.reference
        ));
        for p in &entry.parameters {
            text.push_str(&format!(
                "    {:<8} default {:<8} range [{}, {}]\n",
                p.name, p.default, p.range[0], p.range[1]
            ));
        }
    }
    emit(cli, text.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode, Error> {
    let mut overrides = std::collections::HashMap::new();
    for t in &args.tolerance {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::ParseError(format!("--tolerance `{t}` is not key=value")))?;
        let val: f64 = v
            .parse()
            .map_err(|_| Error::ParseError(format!("tolerance value `{v}`")))?;
        overrides.insert(k.to_string(), val);
    }
    let opts = VerifyOptions {
        seed: Some(cli.seed),
        only: args.only.clone(),
        tolerance_overrides: overrides,
        criteria: args.criterion.clone(),
    };
    let claims = verification::run(&opts)?;
    let mut text = String::new();
    let mut failures = 0;
    for claim in &claims {
        text.push_str(&claim.line());
        text.push('\n');
        if !claim.pass {
            failures += 1;
        }
    }
    text.push_str(&format!(
        "{} claims, {} passed, {} failed",
        claims.len(),
        claims.len() - failures,
        failures
    ));
    emit(cli, &text)?;
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
