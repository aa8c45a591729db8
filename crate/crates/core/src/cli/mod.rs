//! The `gaussmap` command line: verify, fit, classify, certify, cross-check.
//!
//! Exit status is 0 when every check in the report is within its threshold,
//! 1 when a check fails or the run errors, and 2 for malformed input.

pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::beltrami::{
    closed_form_q1, closed_form_q2, closed_form_sphere, identity_residuals_at, laplace_normal,
    laplace_scalar, ScalarField,
};
use crate::exactpoly::{
    audit_fg, feasibility, parse_rational, q, q_to_f64, q_to_string, Component, ExactQuadric, Q,
};
use crate::finitetype::{
    classify_family, fit_lambda, sample_points, ClassificationReport, Family, Tolerances,
    DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::surfaces::{zoo, SurfacePatch};

use config::{parse_grid, resolve_surface};
use report::{emit, sig17, to_json_string, to_value, Meta, Report};

/// Default per-point threshold for the identity suite.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Default threshold for cross-check comparisons.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "gaussmap", version, about = "Laplace–Beltrami checks for surface Gauss maps")]
pub struct Cli {
    /// Report file; defaults to $GAUSSMAP_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Report format; csv is only available for classify.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position and Gauss-map identities on sampled points.
    Verify(VerifyArgs),
    /// Least-squares Λ for one surface.
    Fit(FitArgs),
    /// Fit every cell of a quadric parameter grid.
    Classify(ClassifyArgs),
    /// Exact feasibility certificate for a rational quadric.
    Certify(CertifyArgs),
    /// Exact versus floating operator, and closed form versus generic.
    CrossCheck(CrossCheckArgs),
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Zoo name or surface file; repeatable. Defaults to the whole zoo.
    #[arg(long)]
    pub surface: Vec<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = IDENTITY_TOL)]
    pub tol_identity: f64,
}

#[derive(Debug, Args)]
pub struct FitTolArgs {
    #[arg(long)]
    pub tol_satisfy: Option<f64>,
    #[arg(long)]
    pub tol_fail: Option<f64>,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long)]
    pub tol_target: Option<f64>,
}

impl FitTolArgs {
    fn resolve(&self) -> Result<Tolerances, CliError> {
        let d = Tolerances::default();
        let t = Tolerances {
            satisfy: self.tol_satisfy.unwrap_or(d.satisfy),
            fail: self.tol_fail.unwrap_or(d.fail),
            rank_rtol: self.tol_rank.unwrap_or(d.rank_rtol),
            target_check: self.tol_target.unwrap_or(d.target_check),
        };
        let ok = [t.satisfy, t.fail, t.rank_rtol, t.target_check]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !ok || t.satisfy > t.fail {
            return Err(CliError::Config(format!(
                "tolerances must be positive with satisfy ≤ fail: {t:?}"
            )));
        }
        Ok(t)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Zoo name or surface file.
    #[arg(long)]
    pub surface: String,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub tol: FitTolArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub family: String,
    /// For example `a=0.5:2:4,b=0.5:2:4` or `a=-1.5;-1;1,b=-1,c=1;4`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: FitTolArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub kind: u8,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Debug, Args)]
pub struct CrossCheckArgs {
    /// 1 or 2; both when omitted.
    #[arg(long)]
    pub kind: Option<u8>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Rational points for the exact-versus-floating comparison.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Points for the closed-form-versus-generic comparison.
    #[arg(long, default_value_t = 200)]
    pub numeric_points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = CROSS_CHECK_TOL)]
    pub tol: f64,
}

/// A finished report: text, default file name, and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub file_name: String,
    pub passed: bool,
    pub summary: String,
}

fn json_outcome(
    command: &str,
    inputs: serde_json::Value,
    results: serde_json::Value,
    passed: bool,
    summary: String,
) -> Result<Outcome, CliError> {
    let report = Report {
        meta: Meta::new(command),
        inputs,
        results,
    };
    Ok(Outcome {
        text: to_json_string(&report)?,
        file_name: format!("{command}.json"),
        passed,
        summary,
    })
}

fn require_json(format: Option<Format>, command: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(CliError::Config(format!("{command} only writes json"))),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    points: usize,
    max_res_x: f64,
    max_res_n: f64,
    pass: bool,
}

pub fn verify(args: &VerifyArgs) -> Result<(serde_json::Value, serde_json::Value, bool), CliError> {
    let surfaces: Vec<SurfacePatch> = if args.surface.is_empty() {
        zoo()
    } else {
        args.surface
            .iter()
            .map(|s| resolve_surface(s))
            .collect::<Result<_, _>>()?
    };
    let mut rows = BTreeMap::new();
    let mut passed = true;
    for s in &surfaces {
        let points = sample_points(s, args.sampling.samples, args.sampling.seed)
            .map_err(|e| CliError::Config(format!("{s}: {e}")))?;
        let mut max_x: f64 = 0.0;
        let mut max_n: f64 = 0.0;
        for &(u, v) in &points {
            let frame = s
                .frame(u, v)
                .map_err(|e| CliError::Runtime(format!("{s}: {e}")))?;
            let res = identity_residuals_at(&frame)
                .map_err(|e| CliError::Runtime(format!("{s}: {e}")))?;
            let (x, n) = res.scaled();
            max_x = max_x.max(x);
            max_n = max_n.max(n);
        }
        let pass = max_x <= args.tol_identity && max_n <= args.tol_identity;
        passed &= pass;
        rows.insert(
            s.name.clone(),
            VerifyRow {
                points: points.len(),
                max_res_x: max_x,
                max_res_n: max_n,
                pass,
            },
        );
    }
    let inputs = json!({
        "surfaces": to_value(&surfaces)?,
        "samples": args.sampling.samples,
        "seed": args.sampling.seed,
        "tolerances": {"identity": args.tol_identity},
        "residual_scaling": "|Δx + 2Hn| / (1 + |Δx|) and |Δn − grad 2H − (4H² − 2K)n| / (1 + |Δn|)",
    });
    Ok((inputs, to_value(&rows)?, passed))
}

fn fit(args: &FitArgs) -> Result<(serde_json::Value, serde_json::Value, bool), CliError> {
    let tol = args.tol.resolve()?;
    let surface = resolve_surface(&args.surface)?;
    let points = sample_points(&surface, args.sampling.samples, args.sampling.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let inputs = json!({
        "surface": to_value(&surface)?,
        "samples": args.sampling.samples,
        "seed": args.sampling.seed,
        "tolerances": to_value(&tol)?,
    });
    let (results, passed) = match fit_lambda(&surface, &points, &tol) {
        Ok(f) => (json!({ surface.name.clone(): to_value(&f)? }), true),
        Err(e) => (json!({ surface.name.clone(): {"error": e.to_string()} }), false),
    };
    Ok((inputs, results, passed))
}

fn dichotomy_consistent(report: &ClassificationReport) -> bool {
    report.cells.iter().all(|cell| {
        let expected = match report.family {
            Family::Quadric1 => cell.a == -1.0 && cell.b == -1.0,
            Family::Quadric2 => false,
        };
        cell.error.is_none() && cell.flagged == expected
    })
}

fn cell_key(a: f64, b: f64, c: Option<f64>) -> String {
    match c {
        Some(c) => format!("a={a},b={b},c={c}"),
        None => format!("a={a},b={b}"),
    }
}

pub fn classification_csv(report: &ClassificationReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "family", "a", "b", "c", "verdict", "residual_rms", "design_rank", "condition",
    ];
    let lambda_cols: Vec<String> = (1..=3)
        .flat_map(|i| (1..=3).map(move |j| format!("lambda{i}{j}")))
        .collect();
    header.extend(lambda_cols.iter().map(String::as_str));
    header.extend(["flagged", "error"]);
    let csv_err = |e: csv::Error| CliError::Runtime(format!("writing csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for cell in &report.cells {
        let mut row = vec![
            report.family.to_string(),
            sig17(cell.a),
            sig17(cell.b),
            cell.c.map(sig17).unwrap_or_default(),
        ];
        match &cell.fit {
            Some(f) => {
                row.push(f.verdict.to_string());
                row.push(sig17(f.residual_rms));
                row.push(f.design_rank.to_string());
                row.push(sig17(f.condition));
                row.extend(f.lambda.iter().flatten().map(|&x| sig17(x)));
            }
            None => {
                row.push("error".to_string());
                row.extend(std::iter::repeat_n(String::new(), 12));
            }
        }
        row.push(cell.flagged.to_string());
        row.push(cell.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Runtime(format!("writing csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

fn classify(args: &ClassifyArgs, format: Option<Format>) -> Result<Outcome, CliError> {
    let tol = args.tol.resolve()?;
    let family: Family = args.family.parse().map_err(CliError::Config)?;
    let grid = parse_grid(&args.grid)?;
    let report = classify_family(family, &grid, args.samples, args.seed, &tol)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let passed = dichotomy_consistent(&report);
    let summary = format!(
        "classify {family}: {} cells, {} flagged, dichotomy {}",
        report.cells.len(),
        report.flagged_count,
        if passed { "consistent" } else { "violated" }
    );
    if format == Some(Format::Csv) {
        return Ok(Outcome {
            text: classification_csv(&report)?,
            file_name: format!("classify-{family}.csv"),
            passed,
            summary,
        });
    }
    let cells: Vec<serde_json::Value> = report
        .cells
        .iter()
        .map(|cell| {
            let mut v = to_value(cell)?;
            v["key"] = json!(cell_key(cell.a, cell.b, cell.c));
            Ok(v)
        })
        .collect::<Result<_, CliError>>()?;
    let inputs = json!({
        "family": family,
        "grid": to_value(&grid)?,
        "samples": args.samples,
        "seed": args.seed,
        "tolerances": to_value(&tol)?,
    });
    let results = json!({
        "cells": cells,
        "flagged_count": report.flagged_count,
        "dichotomy_consistent": passed,
    });
    let mut out = json_outcome("classify", inputs, results, passed, summary)?;
    out.file_name = format!("classify-{family}.json");
    Ok(out)
}

fn rational(name: &str, s: &str) -> Result<Q, CliError> {
    parse_rational(s).map_err(|_| CliError::Config(format!("--{name}: expected p/q, got {s:?}")))
}

fn certify(args: &CertifyArgs) -> Result<Outcome, CliError> {
    let a = rational("a", &args.a)?;
    let b = rational("b", &args.b)?;
    let c = args.c.as_deref().map(|c| rational("c", c)).transpose()?;
    let start = Instant::now();
    let cert = feasibility(args.kind, a, b, c).map_err(|e| CliError::Config(e.to_string()))?;
    let elapsed = start.elapsed();
    let verified = cert.verify();
    let summary = format!(
        "certify kind {}: {:?}, {} rows, rank {}, checked {} in {:.2?}",
        cert.kind, cert.outcome, cert.rows, cert.rank, verified, elapsed
    );
    let inputs = json!({ "kind": args.kind, "parameters": cert.inputs.clone() });
    let results = json!({ "certificate": to_value(&cert)?, "certificate_checked": verified });
    let mut out = json_outcome("certify", inputs, results, verified, summary)?;
    out.file_name = format!("certify-kind{}.json", args.kind);
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub points: usize,
    pub max_rel: f64,
    pub pass: bool,
}

/// `|x − y| / (1 + |y|)`.
pub fn rel_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + y.abs())
}

/// Seeded sample points snapped to the dyadic grid `k/1024`, so that they are
/// exact rationals and exact doubles at once.
pub fn rational_points(
    surface: &SurfacePatch,
    count: usize,
    seed: u64,
) -> Result<Vec<(Q, Q)>, CliError> {
    let raw = sample_points(surface, count.max(crate::finitetype::MIN_SAMPLES) * 2, seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let snap = |x: f64| q((x * 1024.0).round() as i64, 1024);
    let mut out = Vec::new();
    for (u, v) in raw {
        let (qu, qv) = (snap(u), snap(v));
        if surface.frame(q_to_f64(&qu), q_to_f64(&qv)).is_ok() && !out.contains(&(qu.clone(), qv.clone())) {
            out.push((qu, qv));
            if out.len() == count {
                break;
            }
        }
    }
    if out.len() < count {
        return Err(CliError::Config(format!(
            "only {} rational points found in the domain",
            out.len()
        )));
    }
    Ok(out)
}

struct KindInputs {
    kind: u8,
    a: Q,
    b: Q,
    c: Option<Q>,
}

fn cross_check_kind(k: &KindInputs, args: &CrossCheckArgs) -> Result<(serde_json::Value, bool), CliError> {
    let quadric = match k.kind {
        1 => ExactQuadric::kind1(k.a.clone(), k.b.clone(), k.c.clone().unwrap_or_else(|| q(1, 1))),
        _ => ExactQuadric::kind2(k.a.clone(), k.b.clone()),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    let (af, bf) = (q_to_f64(&k.a), q_to_f64(&k.b));
    let cf = k.c.as_ref().map(q_to_f64).unwrap_or(1.0);
    let surface = match k.kind {
        1 => SurfacePatch::quadric1(af, bf, cf),
        _ => SurfacePatch::quadric2(af, bf),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut symbolic = BTreeMap::new();
    let position = quadric.position();
    let fields = Component::ALL
        .iter()
        .map(|&c| (c.to_string(), quadric.normal(c)))
        .chain(
            position
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("x{}", i + 1), x.clone())),
        );
    for (name, f) in fields {
        let equal = quadric
            .generic_laplacian(&f)
            .map(|g| g.sub(&quadric.closed_form_laplacian(&f)).is_zero())
            .unwrap_or(false);
        symbolic.insert(name, equal);
    }
    let symbolic_pass = symbolic.values().all(|&x| x);

    let laps = Component::ALL.map(|c| quadric.laplacian_normal(c));
    let mut max_rel: f64 = 0.0;
    let points = rational_points(&surface, args.points, args.seed)?;
    for (qu, qv) in &points {
        let (u, v) = (q_to_f64(qu), q_to_f64(qv));
        let frame = surface
            .frame(u, v)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let numeric = laplace_normal(&frame).map_err(|e| CliError::Runtime(e.to_string()))?;
        for (lap, &y) in laps.iter().zip(&numeric) {
            max_rel = max_rel.max(rel_gap(lap.eval_rational_point(qu, qv), y));
        }
    }
    let exact_vs_float = Comparison {
        points: points.len(),
        max_rel,
        pass: max_rel <= args.tol,
    };

    let numeric_points = sample_points(&surface, args.numeric_points, args.seed ^ 0x9E37_79B9)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let sphere = k.kind == 1 && af == -1.0 && bf == -1.0;
    let mut max_closed: f64 = 0.0;
    let mut max_sphere: f64 = 0.0;
    for &(u, v) in &numeric_points {
        for i in 0..3 {
            for field in [ScalarField::Normal(i), ScalarField::Position(i)] {
                let generic = laplace_scalar(&surface, &field, u, v)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                let closed = match k.kind {
                    1 => closed_form_q1(af, bf, cf, &field, u, v),
                    _ => closed_form_q2(af, bf, &field, u, v),
                }
                .map_err(|e| CliError::Runtime(e.to_string()))?;
                max_closed = max_closed.max(rel_gap(closed, generic));
                if sphere {
                    let reduced = closed_form_sphere(cf, &field, u, v)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    max_sphere = max_sphere.max(rel_gap(reduced, generic));
                }
            }
        }
    }
    let closed_vs_generic = Comparison {
        points: numeric_points.len(),
        max_rel: max_closed,
        pass: max_closed <= args.tol,
    };
    let sphere_reduced = sphere.then_some(Comparison {
        points: numeric_points.len(),
        max_rel: max_sphere,
        pass: max_sphere <= args.tol,
    });

    let audit = if k.kind == 1 {
        Some(
            audit_fg(k.a.clone(), k.b.clone(), k.c.clone().unwrap_or_else(|| q(1, 1)))
                .map_err(|e| CliError::Config(e.to_string()))?,
        )
    } else {
        None
    };
    let audit_pass = audit.as_ref().is_none_or(|a| a.consistent);

    let pass = symbolic_pass
        && exact_vs_float.pass
        && closed_vs_generic.pass
        && sphere_reduced.as_ref().is_none_or(|s| s.pass)
        && audit_pass;
    let mut result = json!({
        "parameters": {
            "a": q_to_string(&k.a),
            "b": q_to_string(&k.b),
        },
        "symbolic_generic_equals_closed_form": symbolic,
        "exact_vs_floating": to_value(&exact_vs_float)?,
        "closed_form_vs_generic": to_value(&closed_vs_generic)?,
        "pass": pass,
    });
    if let Some(c) = &k.c {
        result["parameters"]["c"] = json!(q_to_string(c));
    }
    if let Some(s) = sphere_reduced {
        result["sphere_reduced_vs_generic"] = to_value(&s)?;
    }
    if let Some(a) = audit {
        result["fg_audit"] = to_value(&a)?;
    }
    Ok((result, pass))
}

fn cross_check(args: &CrossCheckArgs) -> Result<(serde_json::Value, serde_json::Value, bool), CliError> {
    let kinds: Vec<u8> = match args.kind {
        None => vec![1, 2],
        Some(k @ (1 | 2)) => vec![k],
        Some(other) => return Err(CliError::Config(format!("--kind must be 1 or 2, got {other}"))),
    };
    if args.kind.is_none() && (args.a.is_some() || args.b.is_some() || args.c.is_some()) {
        return Err(CliError::Config("parameters need an explicit --kind".into()));
    }
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", args.tol)));
    }
    let mut results = serde_json::Map::new();
    let mut passed = true;
    for kind in kinds {
        let (da, db, dc) = if kind == 1 { ("2", "1", Some("1")) } else { ("1", "1", None) };
        let inputs = KindInputs {
            kind,
            a: rational("a", args.a.as_deref().unwrap_or(da))?,
            b: rational("b", args.b.as_deref().unwrap_or(db))?,
            c: match kind {
                1 => Some(rational("c", args.c.as_deref().or(dc).unwrap_or("1"))?),
                _ => None,
            },
        };
        let (value, pass) = cross_check_kind(&inputs, args)?;
        passed &= pass;
        results.insert(format!("kind{kind}"), value);
    }
    let inputs = json!({
        "kind": args.kind,
        "points": args.points,
        "numeric_points": args.numeric_points,
        "seed": args.seed,
        "tolerances": {
            "cross_check": args.tol,
            "fg_audit": crate::exactpoly::audit::AUDIT_REL_TOL,
        },
        "gap": "|x − y| / (1 + |y|)",
    });
    Ok((inputs, serde_json::Value::Object(results), passed))
}

/// Builds the report for a parsed command line without writing it anywhere.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(args) => {
            require_json(cli.format, "verify")?;
            let (inputs, results, passed) = verify(args)?;
            let failing = results
                .as_object()
                .map(|m| m.values().filter(|r| r["pass"] == false).count())
                .unwrap_or(0);
            let summary = format!("verify: {failing} surface(s) over threshold");
            json_outcome("verify", inputs, results, passed, summary)
        }
        Command::Fit(args) => {
            require_json(cli.format, "fit")?;
            let (inputs, results, passed) = fit(args)?;
            let summary = match results.as_object().and_then(|m| m.values().next()) {
                Some(r) if r.get("verdict").is_some() => {
                    format!("fit: verdict {}, rank {}", r["verdict"], r["design_rank"])
                }
                Some(r) => format!("fit: {}", r["error"]),
                None => "fit: no result".to_string(),
            };
            json_outcome("fit", inputs, results, passed, summary)
        }
        Command::Classify(args) => classify(args, cli.format),
        Command::Certify(args) => {
            require_json(cli.format, "certify")?;
            certify(args)
        }
        Command::CrossCheck(args) => {
            require_json(cli.format, "cross-check")?;
            let (inputs, results, passed) = cross_check(args)?;
            let summary = format!("cross-check: {}", if passed { "all within tolerance" } else { "mismatch" });
            json_outcome("cross-check", inputs, results, passed, summary)
        }
    }
}

/// Runs the command, writes the report, and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = execute(cli).and_then(|out| {
        let path = emit(&out.text, cli.output.as_deref(), &out.file_name)?;
        Ok((out, path))
    });
    match outcome {
        Ok((out, path)) => {
            match path {
                Some(p) => eprintln!("{} -> {}", out.summary, p.display()),
                None => eprintln!("{}", out.summary),
            }
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("gaussmap: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gaussmap").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn negative_rationals_parse_as_values() {
        let cli = parse(&["certify", "--kind", "1", "--a", "-1", "--b", "-1/2", "--c", "9/4"]);
        let Command::Certify(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.b, "-1/2");
    }

    #[test]
    fn certify_sphere_report() {
        let cli = parse(&["certify", "--kind", "1", "--a", "-1", "--b", "-1", "--c", "4"]);
        let out = execute(&cli).unwrap();
        assert!(out.passed);
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        let lambda = &v["results"]["certificate"]["lambda"];
        assert_eq!(lambda[1][1], "1/2");
        assert_eq!(lambda[2][0], "0");
    }

    #[test]
    fn csv_only_for_classify() {
        let cli = parse(&["--format", "csv", "verify", "--surface", "plane"]);
        assert_eq!(execute(&cli).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn bad_rational_is_malformed() {
        let cli = parse(&["certify", "--kind", "1", "--a", "x", "--b", "1", "--c", "1"]);
        assert_eq!(execute(&cli).err().unwrap().exit_code(), 2);
        let cli = parse(&["certify", "--kind", "1", "--a", "0", "--b", "1", "--c", "1"]);
        assert_eq!(execute(&cli).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn classify_csv_columns() {
        let cli = parse(&[
            "--format", "csv", "classify", "--family", "quadric2", "--grid", "a=1,b=1;2", "--samples", "20",
        ]);
        let out = execute(&cli).unwrap();
        assert!(out.passed);
        let mut lines = out.text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("family,a,b,c,verdict,residual_rms,design_rank,condition,lambda11"));
        assert_eq!(lines.filter(|l| l.contains(",fails,")).count(), 2);
    }
}
