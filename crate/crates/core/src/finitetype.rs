//! Least-squares search for a constant `Λ` with `Δ^I n = Λ n`.
//!
//! The normal is sampled on a seeded low-discrepancy point set, each target
//! `Δ^I n` is checked against `grad 2H + (4H² − 2K) n` before use, and the
//! three component equations are fitted together through one SVD of the
//! stacked normals.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beltrami::{grad_at, laplace_normal, BeltramiError};
use crate::surfaces::{SurfaceError, SurfacePatch};

pub const MIN_SAMPLES: usize = 12;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Normalized residual at or below which a full-rank fit satisfies.
    pub satisfy: f64,
    /// Normalized residual above which a fit fails.
    pub fail: f64,
    /// Singular values below `rank_rtol · σ_max` are treated as zero.
    pub rank_rtol: f64,
    /// Allowed mismatch between `Δ^I n` and the curvature identity per sample.
    pub target_check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            satisfy: 1e-6,
            fail: 1e-3,
            rank_rtol: 1e-8,
            target_check: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiniteTypeError {
    #[error("need at least {need} sample points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("domain too small: placed {accepted} of {requested} points in {attempts} attempts")]
    DomainTooSmall {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Beltrami(#[from] BeltramiError),
    #[error("target at ({u}, {v}) misses the curvature identity by {residual:e}")]
    TargetMismatch { u: f64, v: f64, residual: f64 },
    #[error("least squares failed: {0}")]
    Numerical(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfies,
    Fails,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfies => "satisfies",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// How the fitted `Λ` acts on the span of the sampled normals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceAction {
    pub dim: usize,
    /// Orthonormal basis of the span, one vector per entry.
    pub basis: Vec<[f64; 3]>,
    /// `Bᵀ Λ B`, `dim × dim`.
    pub action: Vec<Vec<f64>>,
    /// `s` when the action is `s·I` up to the satisfy tolerance.
    pub isotropic_scale: Option<f64>,
    /// The fit is exact on the subspace.
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaFit {
    pub lambda: [[f64; 3]; 3],
    /// `rms|Λn − Δn| / (rms|Δn| + 1)`.
    pub residual_rms: f64,
    /// `rms|Λn − Δn|`.
    pub raw_residual_rms: f64,
    /// `rms|Δn|`.
    pub target_rms: f64,
    pub design_rank: usize,
    pub condition: f64,
    pub singular_values: [f64; 3],
    pub verdict: Verdict,
    pub note: String,
    pub subspace: Option<SubspaceAction>,
    pub samples: usize,
    /// Largest scaled identity mismatch seen while validating targets.
    pub max_target_check: f64,
}

/// One sampled point: the normal and `Δ^I n` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub u: f64,
    pub v: f64,
    pub normal: [f64; 3],
    pub target: [f64; 3],
    /// `|Δn − grad 2H − (4H² − 2K)n| / (1 + |Δn|)`.
    pub identity_check: f64,
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Seeded, randomly shifted Halton points inside the admissible domain.
pub fn sample_points(
    surface: &SurfacePatch,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>, FiniteTypeError> {
    if count < MIN_SAMPLES {
        return Err(FiniteTypeError::TooFewPoints {
            need: MIN_SAMPLES,
            got: count,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: (f64, f64) = (rng.gen(), rng.gen());
    let d = surface.domain;
    let max_attempts = 50 * count + 1000;
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0;
    for k in 1..=max_attempts as u64 {
        attempts = k as usize;
        let s = (halton(k, 2) + shift.0).fract();
        let t = (halton(k, 3) + shift.1).fract();
        let u = d.u_min + s * (d.u_max - d.u_min);
        let v = d.v_min + t * (d.v_max - d.v_min);
        if surface.frame(u, v).is_ok() {
            points.push((u, v));
            if points.len() == count {
                return Ok(points);
            }
        }
    }
    Err(FiniteTypeError::DomainTooSmall {
        requested: count,
        accepted: points.len(),
        attempts,
    })
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Normal and validated `Δ^I n` at each point.
pub fn sample_targets(
    surface: &SurfacePatch,
    points: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<Vec<Sample>, FiniteTypeError> {
    points
        .iter()
        .map(|&(u, v)| {
            let frame = surface.frame(u, v)?;
            let target = laplace_normal(&frame)?;
            let normal = frame.normal.map(|j| j.value());
            let h = frame.mean.value();
            let k = frame.gauss.value();
            let grad = grad_at(&frame, &frame.mean.scale(2.0))?;
            let shape = 4.0 * h * h - 2.0 * k;
            let diff = [0, 1, 2].map(|i| target[i] - grad[i] - shape * normal[i]);
            let identity_check = norm3(diff) / (1.0 + norm3(target));
            if !(identity_check <= tol.target_check) {
                return Err(FiniteTypeError::TargetMismatch {
                    u,
                    v,
                    residual: identity_check,
                });
            }
            Ok(Sample {
                u,
                v,
                normal,
                target,
                identity_check,
            })
        })
        .collect()
}

pub fn fit_lambda(
    surface: &SurfacePatch,
    points: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<LambdaFit, FiniteTypeError> {
    if points.len() < MIN_SAMPLES {
        return Err(FiniteTypeError::TooFewPoints {
            need: MIN_SAMPLES,
            got: points.len(),
        });
    }
    let samples = sample_targets(surface, points, tol)?;
    let normals: Vec<[f64; 3]> = samples.iter().map(|s| s.normal).collect();
    let targets: Vec<[f64; 3]> = samples.iter().map(|s| s.target).collect();
    let mut fit = fit_samples(&normals, &targets, tol)?;
    fit.max_target_check = samples
        .iter()
        .map(|s| s.identity_check)
        .fold(0.0, f64::max);
    Ok(fit)
}

/// Minimum-norm least squares for `targets[p] ≈ Λ normals[p]`.
pub fn fit_samples(
    normals: &[[f64; 3]],
    targets: &[[f64; 3]],
    tol: &Tolerances,
) -> Result<LambdaFit, FiniteTypeError> {
    let m = normals.len();
    if m < MIN_SAMPLES || targets.len() != m {
        return Err(FiniteTypeError::TooFewPoints {
            need: MIN_SAMPLES,
            got: m.min(targets.len()),
        });
    }
    let all_finite = normals
        .iter()
        .chain(targets)
        .all(|r| r.iter().all(|x| x.is_finite()));
    if !all_finite {
        return Err(FiniteTypeError::Numerical("non-finite sample".into()));
    }
    let a = DMatrix::from_fn(m, 3, |i, j| normals[i][j]);
    let b = DMatrix::from_fn(m, 3, |i, j| targets[i][j]);
    let svd = a.clone().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
        return Err(FiniteTypeError::Numerical("SVD did not return factors".into()));
    };
    // nalgebra does not promise an order; sort descending.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_rtol * sigma_max;
    let rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();

    // X = Σ_k v_k (u_kᵀ B) / σ_k over retained k; Λ = Xᵀ.
    let mut x = Matrix3::<f64>::zeros();
    let mut retained = Vec::new();
    for &k in order.iter().take(rank) {
        let s = svd.singular_values[k];
        let vk = v_t.row(k).transpose();
        let ub = u.column(k).transpose() * &b;
        for r in 0..3 {
            for c in 0..3 {
                x[(r, c)] += vk[r] * ub[c] / s;
            }
        }
        retained.push([vk[0], vk[1], vk[2]]);
    }
    let lambda_m = x.transpose();

    let fitted = &a * DMatrix::from_fn(3, 3, |i, j| x[(i, j)]);
    let resid = &fitted - &b;
    let mean_sq = |mat: &DMatrix<f64>| mat.iter().map(|e| e * e).sum::<f64>() / m as f64;
    let raw_residual_rms = mean_sq(&resid).sqrt();
    let target_rms = mean_sq(&b).sqrt();
    let residual_rms = raw_residual_rms / (target_rms + 1.0);
    let condition = if rank == 0 {
        f64::INFINITY
    } else {
        sigma_max / sigma[rank - 1]
    };

    let verdict = if rank < 3 {
        Verdict::Indeterminate
    } else if residual_rms <= tol.satisfy {
        Verdict::Satisfies
    } else if residual_rms > tol.fail {
        Verdict::Fails
    } else {
        Verdict::Indeterminate
    };

    let subspace = (rank > 0 && rank < 3).then(|| {
        let action: Vec<Vec<f64>> = retained
            .iter()
            .map(|bi| {
                retained
                    .iter()
                    .map(|bj| {
                        let lbj = lambda_m * nalgebra::Vector3::from(*bj);
                        bi[0] * lbj[0] + bi[1] * lbj[1] + bi[2] * lbj[2]
                    })
                    .collect()
            })
            .collect();
        let s = action[0][0];
        let isotropic = action.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, &e)| {
                let expected = if i == j { s } else { 0.0 };
                (e - expected).abs() <= tol.satisfy * (1.0 + s.abs())
            })
        });
        SubspaceAction {
            dim: rank,
            basis: retained.clone(),
            action,
            isotropic_scale: isotropic.then_some(s),
            satisfied: residual_rms <= tol.satisfy,
        }
    });

    let note = match (rank, verdict) {
        (0, _) => "no usable normals".to_string(),
        (r, _) if r < 3 && target_rms <= tol.satisfy => {
            "rank-deficient: condition holds trivially".to_string()
        }
        (r, _) if r < 3 && residual_rms <= tol.satisfy => {
            format!("rank-deficient: condition holds on the rank-{r} normal subspace")
        }
        (r, _) if r < 3 => {
            format!("rank-deficient: no constant action fits on the rank-{r} normal subspace")
        }
        (_, Verdict::Satisfies) => "constant Λ fits all samples".to_string(),
        (_, Verdict::Fails) => "no constant Λ fits the samples".to_string(),
        (_, Verdict::Indeterminate) => {
            "residual between the satisfy and fail thresholds".to_string()
        }
    };

    let mut lambda = [[0.0; 3]; 3];
    for (i, row) in lambda.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = lambda_m[(i, j)];
        }
    }
    let mut singular_values = [0.0; 3];
    for (dst, src) in singular_values.iter_mut().zip(&sigma) {
        *dst = *src;
    }
    Ok(LambdaFit {
        lambda,
        residual_rms,
        raw_residual_rms,
        target_rms,
        design_rank: rank,
        condition,
        singular_values,
        verdict,
        note,
        subspace,
        samples: m,
        max_target_check: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quadric1,
    Quadric2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Quadric1 => "quadric1",
            Family::Quadric2 => "quadric2",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadric1" | "1" => Ok(Family::Quadric1),
            "quadric2" | "2" => Ok(Family::Quadric2),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

/// Parameter values per axis; `c` is only read for kind I.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ParameterGrid {
    pub fn cells(&self, family: Family) -> Result<Vec<(f64, f64, Option<f64>)>, FiniteTypeError> {
        let bad = |msg: String| Err(FiniteTypeError::InvalidGrid(msg));
        if self.a.is_empty() || self.b.is_empty() {
            return bad("a and b need at least one value each".into());
        }
        let all = self.a.iter().chain(&self.b).chain(&self.c);
        if let Some(x) = all.clone().find(|x| !x.is_finite()) {
            return bad(format!("non-finite value {x}"));
        }
        match family {
            Family::Quadric1 => {
                if self.c.is_empty() {
                    return bad("quadric1 needs c values".into());
                }
                if let Some(x) = self.a.iter().chain(&self.b).find(|&&x| x == 0.0) {
                    return bad(format!("quadric1 needs ab ≠ 0, got {x}"));
                }
                if let Some(x) = self.c.iter().find(|&&x| x <= 0.0) {
                    return bad(format!("quadric1 needs c > 0, got {x}"));
                }
            }
            Family::Quadric2 => {
                if let Some(x) = self.a.iter().chain(&self.b).find(|&&x| x <= 0.0) {
                    return bad(format!("quadric2 needs a, b > 0, got {x}"));
                }
            }
        }
        let cs: Vec<Option<f64>> = match family {
            Family::Quadric1 => self.c.iter().map(|&c| Some(c)).collect(),
            Family::Quadric2 => vec![None],
        };
        let mut out = Vec::new();
        for &a in &self.a {
            for &b in &self.b {
                for &c in &cs {
                    out.push((a, b, c));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
    pub fit: Option<LambdaFit>,
    pub error: Option<String>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub family: Family,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub cells: Vec<CellResult>,
    pub flagged_count: usize,
}

fn classify_cell(
    family: Family,
    (a, b, c): (f64, f64, Option<f64>),
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> CellResult {
    let run = || -> Result<LambdaFit, FiniteTypeError> {
        let surface = match family {
            Family::Quadric1 => SurfacePatch::quadric1(a, b, c.unwrap_or(1.0))?,
            Family::Quadric2 => SurfacePatch::quadric2(a, b)?,
        };
        let points = sample_points(&surface, samples, seed)?;
        fit_lambda(&surface, &points, tol)
    };
    match run() {
        Ok(fit) => CellResult {
            a,
            b,
            c,
            flagged: fit.verdict == Verdict::Satisfies,
            fit: Some(fit),
            error: None,
        },
        Err(e) => CellResult {
            a,
            b,
            c,
            fit: None,
            error: Some(e.to_string()),
            flagged: false,
        },
    }
}

/// Fits every grid cell in parallel; cells come back in grid order.
pub fn classify_family(
    family: Family,
    grid: &ParameterGrid,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ClassificationReport, FiniteTypeError> {
    let cells = grid.cells(family)?;
    if samples < MIN_SAMPLES {
        return Err(FiniteTypeError::TooFewPoints {
            need: MIN_SAMPLES,
            got: samples,
        });
    }
    let results: Vec<CellResult> = cells
        .into_par_iter()
        .map(|cell| classify_cell(family, cell, samples, seed, tol))
        .collect();
    let flagged_count = results.iter().filter(|r| r.flagged).count();
    Ok(ClassificationReport {
        family,
        samples,
        seed,
        tolerances: *tol,
        cells: results,
        flagged_count,
    })
}
