//! Monomial-by-monomial comparison of the kind-I brackets against the
//! reference closed forms for `f(u, v)` and `g(u, v)`.
//!
//! With `P = a²b(a+1)²(b+1)u⁴ + f` and `R = ab²(a+1)(b+1)²v⁴ + g`,
//! `Δ n1 = −au·P / Φ^{7/2}` and `Δ n2 = −bv·R / Φ^{7/2}`. The computed side
//! comes from the exact operator; the reference side is typed in below and
//! is never taken as ground truth.

use std::collections::BTreeSet;

use num_traits::One;
use serde::Serialize;

use super::qpoly::QPoly;
use super::symbolic::{Component, ExactQuadric};
use super::{q, q_to_f64, q_to_string, ExactError, Q};
use crate::beltrami::laplace_normal;
use crate::surfaces::SurfacePatch;

#[derive(Debug, Clone, Serialize)]
pub struct MonomialRow {
    pub monomial: String,
    pub computed: String,
    pub reference: String,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceComparison {
    pub monomial: String,
    pub computed: String,
    /// `bc(b+1)(2a² + 2a + 3b + ab)`, as in the full display of `g`.
    pub reference_full: String,
    /// `bc(b+1)(2a² + 2a + 3ab + ab)`, as in the `u = 0` slice display.
    pub reference_slice: String,
    pub full_matches: bool,
    pub slice_matches: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FgAudit {
    pub a: String,
    pub b: String,
    pub c: String,
    pub f_rows: Vec<MonomialRow>,
    pub g_rows: Vec<MonomialRow>,
    pub f_agrees: bool,
    pub g_agrees: bool,
    pub slice: SliceComparison,
    /// Largest relative gap between the bracket form of `Δ n1, Δ n2` and the
    /// floating Laplacian, over the sample points that lie in the domain.
    pub numeric_max_rel: f64,
    pub numeric_points: usize,
    pub consistent: bool,
}

/// Tolerance of the numeric consistency check.
pub const AUDIT_REL_TOL: f64 = 1e-9;

fn mono(i: u32, j: u32, c: Q) -> QPoly {
    QPoly::monomial(i, j, c)
}

/// The reference `f(u, v)`.
pub fn reference_f(a: &Q, b: &Q, c: &Q) -> QPoly {
    let one = Q::one();
    let a1 = a + &one;
    let b1 = b + &one;
    let n = |k: i64| q(k, 1);
    let v4 = b * b * &b1 * &b1 * (n(4) * a * a - n(3) * a * b + n(3) * a - n(2) * b);
    let u2 = a * c * &a1 * (n(2) * b * b + n(2) * b + n(3) * a + a * b);
    let v2 = b * c * &b1 * (-n(3) * b * b - b + n(6) * a + n(8) * a * a - n(2) * a * b);
    let u2v2 = a * b * &a1 * &b1 * (-n(3) * b * b - b + n(3) * a + n(5) * a * b);
    let k = c * c * (n(3) * a * &a1 + b * &b1 + a * (a + b));
    &(&(&(&mono(0, 4, v4) + &mono(2, 0, u2)) + &mono(0, 2, v2)) + &mono(2, 2, u2v2)) + &mono(0, 0, k)
}

/// The reference `g(u, v)`.
pub fn reference_g(a: &Q, b: &Q, c: &Q) -> QPoly {
    let one = Q::one();
    let a1 = a + &one;
    let b1 = b + &one;
    let n = |k: i64| q(k, 1);
    let u4 = a * a * &a1 * &a1 * (n(4) * b * b - n(3) * a * b + n(3) * b - n(2) * a);
    let v2 = reference_v2_full(a, b, c);
    let u2 = a * c * &a1 * (-n(3) * a * a - a + n(6) * b + n(8) * b * b - n(2) * a * b);
    let u2v2 = a * b * &a1 * &b1 * (-n(3) * a * a - a + n(3) * b + n(5) * a * b);
    let k = c * c * (n(3) * b * &b1 + a * &a1 + b * (a + b));
    &(&(&(&mono(4, 0, u4) + &mono(0, 2, v2)) + &mono(2, 0, u2)) + &mono(2, 2, u2v2)) + &mono(0, 0, k)
}

fn reference_v2_full(a: &Q, b: &Q, c: &Q) -> Q {
    let n = |k: i64| q(k, 1);
    b * c * (b + Q::one()) * (n(2) * a * a + n(2) * a + n(3) * b + a * b)
}

fn reference_v2_slice(a: &Q, b: &Q, c: &Q) -> Q {
    let n = |k: i64| q(k, 1);
    b * c * (b + Q::one()) * (n(2) * a * a + n(2) * a + n(3) * a * b + a * b)
}

fn compare(computed: &QPoly, reference: &QPoly) -> Vec<MonomialRow> {
    let keys: BTreeSet<(u32, u32)> = computed
        .terms()
        .chain(reference.terms())
        .map(|(k, _)| *k)
        .collect();
    keys.into_iter()
        .map(|(i, j)| {
            let x = computed.coeff(i, j);
            let y = reference.coeff(i, j);
            MonomialRow {
                monomial: format!("u^{i}v^{j}"),
                computed: q_to_string(&x),
                reference: q_to_string(&y),
                agrees: x == y,
            }
        })
        .collect()
}

const SAMPLE_POINTS: [(f64, f64); 8] = [
    (0.3, -0.2),
    (-0.7, 0.45),
    (0.15, 0.6),
    (-0.4, -0.55),
    (0.8, 0.1),
    (-0.1, -0.9),
    (0.55, 0.35),
    (-0.25, 0.05),
];

pub fn audit_fg(a: Q, b: Q, c: Q) -> Result<FgAudit, ExactError> {
    let quadric = ExactQuadric::kind1(a.clone(), b.clone(), c.clone())?;
    let one = Q::one();
    let lead_f = &a * &a * &b * (&a + &one) * (&a + &one) * (&b + &one);
    let lead_g = &a * &b * &b * (&a + &one) * (&b + &one) * (&b + &one);
    let p = quadric.bracket(Component::N1)?;
    let r = quadric.bracket(Component::N2)?;
    let f = &p - &mono(4, 0, lead_f.clone());
    let g = &r - &mono(0, 4, lead_g.clone());
    let f_rows = compare(&f, &reference_f(&a, &b, &c));
    let g_rows = compare(&g, &reference_g(&a, &b, &c));

    let computed_v2 = g.coeff(0, 2);
    let full = reference_v2_full(&a, &b, &c);
    let slice = reference_v2_slice(&a, &b, &c);
    let full_matches = computed_v2 == full;
    let slice_matches = computed_v2 == slice;
    let verdict = match (full_matches, slice_matches) {
        (true, true) => "both displays agree with the computation at these parameters",
        (true, false) => "the full display matches; the slice display does not",
        (false, true) => "the slice display matches; the full display does not",
        (false, false) => "neither display matches the computation",
    }
    .to_string();

    let (af, bf, cf) = (q_to_f64(&a), q_to_f64(&b), q_to_f64(&c));
    let phi = quadric.phi().expect("kind 1");
    let mut numeric_max_rel: f64 = 0.0;
    let mut numeric_points = 0;
    if let Ok(patch) = SurfacePatch::quadric1(af, bf, cf) {
        for &(u, v) in &SAMPLE_POINTS {
            let Ok(frame) = patch.frame(u, v) else {
                continue;
            };
            let Ok(lap) = laplace_normal(&frame) else {
                continue;
            };
            let scale = phi.eval_f64(u, v).powf(3.5);
            let from_f = -af * u * (p.eval_f64(u, v)) / scale;
            let from_g = -bf * v * (r.eval_f64(u, v)) / scale;
            for (x, y) in [(from_f, lap[0]), (from_g, lap[1])] {
                numeric_max_rel = numeric_max_rel.max((x - y).abs() / (1.0 + y.abs()));
            }
            numeric_points += 1;
        }
    }

    Ok(FgAudit {
        a: q_to_string(&a),
        b: q_to_string(&b),
        c: q_to_string(&c),
        f_agrees: f_rows.iter().all(|r| r.agrees),
        g_agrees: g_rows.iter().all(|r| r.agrees),
        f_rows,
        g_rows,
        slice: SliceComparison {
            monomial: "u^0v^2".to_string(),
            computed: q_to_string(&computed_v2),
            reference_full: q_to_string(&full),
            reference_slice: q_to_string(&slice),
            full_matches,
            slice_matches,
            verdict,
        },
        numeric_max_rel,
        numeric_points,
        consistent: numeric_points > 0 && numeric_max_rel <= AUDIT_REL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_brackets_are_two_c_squared() {
        for c in [1, 4, 7] {
            let audit = audit_fg(q(-1, 1), q(-1, 1), q(c, 1)).unwrap();
            assert!(audit.f_agrees && audit.g_agrees);
            assert_eq!(audit.f_rows.len(), 1);
            assert_eq!(audit.f_rows[0].computed, q_to_string(&q(2 * c * c, 1)));
            assert_eq!(audit.g_rows[0].computed, q_to_string(&q(2 * c * c, 1)));
        }
    }

    #[test]
    fn generic_parameters_agree_with_full_display() {
        for (a, b, c) in [(2, 1, 1), (1, 1, 1), (-1, -2, 1), (3, -2, 5)] {
            let audit = audit_fg(q(a, 1), q(b, 1), q(c, 1)).unwrap();
            assert!(audit.f_agrees, "f at ({a},{b},{c}): {:?}", audit.f_rows);
            assert!(audit.g_agrees, "g at ({a},{b},{c}): {:?}", audit.g_rows);
            assert!(audit.slice.full_matches);
            assert!(audit.consistent, "{}", audit.numeric_max_rel);
        }
    }

    #[test]
    fn slice_display_differs_when_b_ne_ab() {
        let audit = audit_fg(q(2, 1), q(1, 1), q(1, 1)).unwrap();
        assert!(!audit.slice.slice_matches);
        assert_eq!(audit.slice.verdict, "the full display matches; the slice display does not");
        // a = 1: 3b = 3ab, so the two displays coincide.
        let audit = audit_fg(q(1, 1), q(2, 1), q(1, 1)).unwrap();
        assert!(audit.slice.full_matches && audit.slice.slice_matches);
    }

    #[test]
    fn leading_quartic() {
        let s = ExactQuadric::kind1(q(2, 1), q(1, 1), q(1, 1)).unwrap();
        assert_eq!(s.bracket(Component::N1).unwrap().coeff(4, 0), q(72, 1));
    }
}
