//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use gaussmap::beltrami::{
    closed_form_q1, closed_form_q2, closed_form_sphere, identity_residuals_at, laplace_scalar,
    ScalarField,
};
use gaussmap::cli::{rational_points, rel_gap};
use gaussmap::exactpoly::{
    audit_fg, feasibility, parse_rational, q, q_to_f64, Component, ExactQuadric, Outcome, Q,
};
use gaussmap::finitetype::{fit_lambda, sample_points, Tolerances, Verdict, DEFAULT_SEED};
use gaussmap::surfaces::{zoo, SurfacePatch};

type Check = Result<String, String>;

fn rat(s: &str) -> Q {
    parse_rational(s).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sphere_certificates() -> Check {
    let mut slowest = Duration::ZERO;
    for c0 in ["1", "4", "9/4"] {
        let start = Instant::now();
        let cert = feasibility(1, q(-1, 1), q(-1, 1), Some(rat(c0))).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(cert.outcome == Outcome::Unique, format!("c={c0}: {:?}", cert.outcome))?;
        ensure(cert.verify(), format!("c={c0}: certificate does not re-check"))?;
        let two_over_c = q(2, 1) / rat(c0);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { two_over_c.clone() } else { q(0, 1) };
                ensure(
                    cert.lambda_entry(i, j) == Some(want),
                    format!("c={c0}: λ{}{} wrong", i + 1, j + 1),
                )?;
            }
        }
        ensure(took < Duration::from_secs(5), format!("c={c0} took {took:?}"))?;
    }
    Ok(format!("Λ = (2/c)I exactly for c ∈ {{1, 4, 9/4}}; slowest {slowest:.2?}"))
}

fn infeasible(kind: u8, cases: &[(&str, &str, Option<&str>)]) -> Check {
    let mut slowest = Duration::ZERO;
    for (a, b, c) in cases {
        let start = Instant::now();
        let cert = feasibility(kind, rat(a), rat(b), c.map(rat)).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(
            cert.outcome == Outcome::Infeasible,
            format!("({a},{b},{c:?}): {:?}", cert.outcome),
        )?;
        ensure(cert.verify(), format!("({a},{b},{c:?}): contradiction does not re-check"))?;
        ensure(took < Duration::from_secs(10), format!("({a},{b},{c:?}) took {took:?}"))?;
    }
    Ok(format!("{} instance(s) infeasible with verified contradictions; slowest {slowest:.2?}", cases.len()))
}

fn identity_suite() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for s in zoo() {
        let points = sample_points(&s, 100, DEFAULT_SEED).map_err(|e| format!("{s}: {e}"))?;
        for (u, v) in points {
            let frame = s.frame(u, v).map_err(|e| format!("{s}: {e}"))?;
            let (x, n) = identity_residuals_at(&frame).map_err(|e| format!("{s}: {e}"))?.scaled();
            worst = worst.max(x).max(n);
            ensure(x <= 1e-8 && n <= 1e-8, format!("{s} at ({u},{v}): {x:e}, {n:e}"))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    Ok(format!("8 zoo surfaces × 100 points, worst scaled residual {worst:.1e}, {took:.2?}"))
}

fn triangulation() -> Check {
    let fields: Vec<ScalarField> = (0..3)
        .flat_map(|i| [ScalarField::Normal(i), ScalarField::Position(i)])
        .collect();
    let mut worst: f64 = 0.0;
    let q1 = SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap();
    let q2 = SurfacePatch::quadric2(1.0, 1.0).unwrap();
    let sphere = SurfacePatch::quadric1(-1.0, -1.0, 4.0).unwrap();
    for (surface, tag) in [(&q1, 1), (&q2, 2), (&sphere, 3)] {
        let points = sample_points(surface, 200, 17).map_err(|e| e.to_string())?;
        for &(u, v) in &points {
            for f in &fields {
                let generic = laplace_scalar(surface, f, u, v).map_err(|e| e.to_string())?;
                let closed = match tag {
                    1 => closed_form_q1(2.0, 1.0, 1.0, f, u, v),
                    2 => closed_form_q2(1.0, 1.0, f, u, v),
                    _ => closed_form_q1(-1.0, -1.0, 4.0, f, u, v),
                }
                .map_err(|e| e.to_string())?;
                let mut gap = rel_gap(closed, generic);
                if tag == 3 {
                    let reduced = closed_form_sphere(4.0, f, u, v).map_err(|e| e.to_string())?;
                    gap = gap.max(rel_gap(reduced, generic));
                }
                worst = worst.max(gap);
                ensure(gap <= 1e-9, format!("{surface} at ({u},{v}): gap {gap:e}"))?;
            }
        }
    }
    Ok(format!(
        "closed forms vs generic at 200 points per surface (kind I, kind II, sphere reduced), worst {worst:.1e}"
    ))
}

fn fit_dichotomy() -> Check {
    let tol = Tolerances::default();
    let fit = |s: &SurfacePatch| {
        let points = sample_points(s, 100, DEFAULT_SEED).map_err(|e| format!("{s}: {e}"))?;
        fit_lambda(s, &points, &tol).map_err(|e| format!("{s}: {e}"))
    };
    for c in [1.0, 4.0] {
        let s = SurfacePatch::quadric1(-1.0, -1.0, c).unwrap();
        let f = fit(&s)?;
        ensure(f.verdict == Verdict::Satisfies, format!("{s}: {}", f.verdict))?;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 / c } else { 0.0 };
                ensure(
                    (f.lambda[i][j] - want).abs() < 1e-7,
                    format!("{s}: λ{}{} = {}", i + 1, j + 1, f.lambda[i][j]),
                )?;
            }
        }
    }
    let mut fails = Vec::new();
    for s in [
        SurfacePatch::quadric2(1.0, 1.0).unwrap(),
        SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap(),
    ] {
        let f = fit(&s)?;
        ensure(
            f.verdict == Verdict::Fails && f.residual_rms > 1e-3,
            format!("{s}: {} at {:e}", f.verdict, f.residual_rms),
        )?;
        fails.push(format!("{s} {:.3}", f.residual_rms));
    }
    for (s, rank) in [
        (SurfacePatch::plane(), 1),
        (SurfacePatch::circular_cylinder(2.0).unwrap(), 2),
    ] {
        let f = fit(&s)?;
        ensure(
            f.verdict == Verdict::Indeterminate && f.design_rank == rank,
            format!("{s}: {} rank {}", f.verdict, f.design_rank),
        )?;
        ensure(f.note.starts_with("rank-deficient"), format!("{s}: note {:?}", f.note))?;
    }
    Ok(format!(
        "sphere fibers satisfy with Λ = (2/c)I; fails: {}; plane rank 1 and cylinder rank 2 indeterminate",
        fails.join(", ")
    ))
}

fn numeric_symbolic() -> Check {
    let mut worst: f64 = 0.0;
    let cases = [
        (ExactQuadric::kind1(q(2, 1), q(1, 1), q(1, 1)).unwrap(), SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap()),
        (ExactQuadric::kind2(q(1, 1), q(1, 1)).unwrap(), SurfacePatch::quadric2(1.0, 1.0).unwrap()),
    ];
    for (exact, surface) in &cases {
        let laps = Component::ALL.map(|c| exact.laplacian_normal(c));
        let points = rational_points(surface, 20, 5).map_err(|e| e.to_string())?;
        ensure(points.len() == 20, "fewer than 20 rational points")?;
        for (qu, qv) in &points {
            let (u, v) = (q_to_f64(qu), q_to_f64(qv));
            for (i, lap) in laps.iter().enumerate() {
                let numeric = laplace_scalar(surface, &ScalarField::Normal(i), u, v)
                    .map_err(|e| e.to_string())?;
                let gap = rel_gap(lap.eval_rational_point(qu, qv), numeric);
                worst = worst.max(gap);
                ensure(gap <= 1e-9, format!("{surface} n{} at ({u},{v}): {gap:e}", i + 1))?;
            }
        }
    }
    Ok(format!("20 rational points per kind, worst gap {worst:.1e}"))
}

fn fg_audit() -> Check {
    let audit = audit_fg(q(2, 1), q(1, 1), q(1, 1)).map_err(|e| e.to_string())?;
    ensure(!audit.f_rows.is_empty() && !audit.g_rows.is_empty(), "empty report")?;
    ensure(audit.consistent, format!("bracket vs numeric gap {:e}", audit.numeric_max_rel))?;
    ensure(
        audit.slice.full_matches != audit.slice.slice_matches,
        "slice comparison does not separate the two displays",
    )?;
    let agree = |rows: &[gaussmap::exactpoly::MonomialRow]| rows.iter().filter(|r| r.agrees).count();
    Ok(format!(
        "f {}/{} and g {}/{} monomials agree; v² coefficient computed {} (full display {}, slice display {}): {}",
        agree(&audit.f_rows),
        audit.f_rows.len(),
        agree(&audit.g_rows),
        audit.g_rows.len(),
        audit.slice.computed,
        audit.slice.reference_full,
        audit.slice.reference_slice,
        audit.slice.verdict
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("sphere certificate (exact)", sphere_certificates),
        ("kind-I non-sphere infeasibility (exact)", || {
            infeasible(
                1,
                &[
                    ("1", "1", Some("1")),
                    ("-1", "-2", Some("1")),
                    ("2", "1", Some("1")),
                    ("-1/2", "-1", Some("3")),
                ],
            )
        }),
        ("kind-II infeasibility (exact)", || {
            infeasible(2, &[("1", "1", None), ("1", "2", None), ("2", "3", None)])
        }),
        ("identity suite (numeric)", identity_suite),
        ("operator triangulation (numeric)", triangulation),
        ("numeric fit dichotomy", fit_dichotomy),
        ("numeric-symbolic agreement", numeric_symbolic),
        ("f/g text audit", fg_audit),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", n + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} FAIL {name}: {why}", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
