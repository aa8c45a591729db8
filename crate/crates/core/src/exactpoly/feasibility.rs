//! Exact decision of `Δ n = Λ n` for a constant rational `Λ` on one quadric.
//!
//! Each equation `Δ n_i − Σ_j λ_ij n_j = 0` is split into parity buckets,
//! every bucket numerator must vanish as a polynomial, and each monomial
//! coefficient becomes one linear equation in the nine `λ_ij`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::linsys::{Contradiction, ContradictionJson, LinearSystemQ, SolutionSet};
use super::radical::{align, RadExpr};
use super::symbolic::{Component, ExactQuadric, QuadricParams};
use super::{q, q_to_string, ExactError, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Unique,
    Infeasible,
    Underdetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionReport {
    /// `(row label, multiplier)` pairs whose weighted sum cancels every unknown.
    pub combination: Vec<(String, String)>,
    /// The derived equation, `0 = r` with `r ≠ 0`.
    pub derived_equation: String,
    #[serde(flatten)]
    pub raw: ContradictionJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineRestriction {
    pub equation: String,
    pub line: String,
    pub rows: usize,
    pub rank: usize,
    pub outcome: Outcome,
    /// Unknowns every solution on the line agrees on.
    pub forced: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: u8,
    pub inputs: BTreeMap<String, String>,
    pub bases: BTreeMap<String, String>,
    pub bucket_count: usize,
    pub unknowns: Vec<String>,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub outcome: Outcome,
    /// `Λ` row by row when unique; the forced entries (others `null`) when underdetermined.
    pub lambda: Option<Vec<Vec<Option<String>>>>,
    pub contradiction: Option<ContradictionReport>,
    pub line_restrictions: Vec<LineRestriction>,
    pub trace: Vec<String>,
    #[serde(skip)]
    pub system: LinearSystemQ,
    #[serde(skip)]
    pub exact_lambda: Option<Vec<Q>>,
    #[serde(skip)]
    pub exact_contradiction: Option<Contradiction>,
}

impl Certificate {
    /// Re-checks the claimed outcome against the stored system.
    pub fn verify(&self) -> bool {
        match self.outcome {
            Outcome::Unique => self
                .exact_lambda
                .as_ref()
                .is_some_and(|x| self.system.satisfies(x)),
            Outcome::Infeasible => self
                .exact_contradiction
                .as_ref()
                .is_some_and(|c| self.system.verify_contradiction(c)),
            Outcome::Underdetermined => self.rank < self.columns,
        }
    }

    /// `λ_ij` as an exact rational, when determined.
    pub fn lambda_entry(&self, i: usize, j: usize) -> Option<Q> {
        self.exact_lambda.as_ref().map(|x| x[3 * i + j].clone())
    }
}

fn lambda_names(rows: &[usize]) -> Vec<String> {
    rows.iter()
        .flat_map(|&i| (0..3).map(move |j| format!("λ{}{}", i + 1, j + 1)))
        .collect()
}

fn parity_label(expr_basis: &[String], low: &[i32]) -> String {
    let parts: Vec<String> = expr_basis
        .iter()
        .zip(low)
        .filter(|(_, &p)| p != 0)
        .map(|(n, p)| format!("{n}^({p}/2)"))
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("·")
    }
}

/// Appends the coefficient equations of `lap = Σ_j λ_{row,j} n_j` to `system`,
/// with `row` mapping to columns `offset..offset + 3`. Returns the number of
/// parity buckets involved.
fn push_equation(
    system: &mut LinearSystemQ,
    offset: usize,
    tag: &str,
    lap: &RadExpr,
    normals: &[RadExpr; 3],
) -> usize {
    let names = lap.basis().names().to_vec();
    let exprs = [lap, &normals[0], &normals[1], &normals[2]];
    let aligned = align(&exprs);
    let width = system.n_unknowns();
    for (low, nums) in aligned.values() {
        let mut monomials: Vec<(u32, u32)> = nums
            .iter()
            .flat_map(|p| p.terms().map(|(k, _)| *k).collect::<Vec<_>>())
            .collect();
        monomials.sort();
        monomials.dedup();
        let bucket = parity_label(&names, low);
        for (i, j) in monomials {
            let mut row = vec![q(0, 1); width];
            for k in 0..3 {
                row[offset + k] = nums[k + 1].coeff(i, j);
            }
            system.push(
                row,
                nums[0].coeff(i, j),
                format!("{tag} [{bucket}] u^{i}v^{j}"),
            );
        }
    }
    aligned.len()
}

fn restrict(expr: &RadExpr, on_u: bool) -> RadExpr {
    let zero = q(0, 1);
    if on_u {
        expr.substitute_u(&zero)
    } else {
        expr.substitute_v(&zero)
    }
}

fn line_restriction(
    quadric: &ExactQuadric,
    component: Component,
    on_u: bool,
) -> Result<LineRestriction, ExactError> {
    let i = component.index();
    let lap = restrict(&quadric.laplacian_normal(component), on_u);
    let normals = quadric.normals().map(|n| restrict(&n, on_u));
    if !lap.basis().radicals_independent() {
        return Err(ExactError::NotRepresentable(
            "restricted radicals are dependent".to_string(),
        ));
    }
    let unknowns = lambda_names(&[i]);
    let mut system = LinearSystemQ::new(unknowns.clone());
    let line = if on_u { "u = 0" } else { "v = 0" };
    push_equation(&mut system, 0, &format!("Δ{component}|{line}"), &lap, &normals);
    let solved = system.solve();
    let (outcome, forced) = match &solved.solution {
        SolutionSet::Unique(x) => (
            Outcome::Unique,
            unknowns.iter().cloned().zip(x.iter().map(q_to_string)).collect(),
        ),
        SolutionSet::Infeasible(_) => (Outcome::Infeasible, BTreeMap::new()),
        SolutionSet::Underdetermined { determined, .. } => (
            Outcome::Underdetermined,
            unknowns
                .iter()
                .zip(determined)
                .filter_map(|(n, d)| d.as_ref().map(|d| (n.clone(), q_to_string(d))))
                .collect(),
        ),
    };
    Ok(LineRestriction {
        equation: format!("Δ{component} = Σ_j λ{}j n_j", i + 1),
        line: line.to_string(),
        rows: system.n_rows(),
        rank: solved.rank,
        outcome,
        forced,
    })
}

pub fn feasibility_for(quadric: &ExactQuadric) -> Result<Certificate, ExactError> {
    let basis = quadric.basis();
    if !basis.radicals_independent() {
        return Err(ExactError::NotRepresentable(
            "a product of the radical bases is a perfect square".to_string(),
        ));
    }
    let mut inputs = BTreeMap::new();
    match quadric.params() {
        QuadricParams::Kind1 { a, b, c } => {
            inputs.insert("a".to_string(), q_to_string(a));
            inputs.insert("b".to_string(), q_to_string(b));
            inputs.insert("c".to_string(), q_to_string(c));
        }
        QuadricParams::Kind2 { a, b } => {
            inputs.insert("a".to_string(), q_to_string(a));
            inputs.insert("b".to_string(), q_to_string(b));
        }
    }
    let bases = (0..basis.len())
        .map(|k| (basis.names()[k].clone(), basis.base(k).to_string()))
        .collect();

    let unknowns = lambda_names(&[0, 1, 2]);
    let mut system = LinearSystemQ::new(unknowns.clone());
    let normals = quadric.normals();
    let mut trace = Vec::new();
    let mut parities = std::collections::BTreeSet::new();
    for component in Component::ALL {
        let lap = quadric.laplacian_normal(component);
        let before = system.n_rows();
        let buckets = push_equation(
            &mut system,
            3 * component.index(),
            &format!("Δ{component}"),
            &lap,
            &normals,
        );
        for (p, _) in lap.buckets() {
            parities.insert(p.clone());
        }
        for n in &normals {
            for (p, _) in n.buckets() {
                parities.insert(p.clone());
            }
        }
        trace.push(format!(
            "Δ{component} = {lap}: {buckets} parity bucket(s), {} coefficient equation(s)",
            system.n_rows() - before
        ));
    }

    let solved = system.solve();
    trace.push(format!(
        "fraction-free elimination: {} rows × {} unknowns, rank {}",
        system.n_rows(),
        system.n_unknowns(),
        solved.rank
    ));

    let mut lambda = None;
    let mut exact_lambda = None;
    let mut contradiction = None;
    let mut exact_contradiction = None;
    let outcome = match &solved.solution {
        SolutionSet::Unique(x) => {
            lambda = Some(
                x.chunks(3)
                    .map(|r| r.iter().map(|e| Some(q_to_string(e))).collect())
                    .collect(),
            );
            exact_lambda = Some(x.clone());
            trace.push("unique solution; substituted back into every row".to_string());
            Outcome::Unique
        }
        SolutionSet::Infeasible(c) => {
            let combination: Vec<(String, String)> = c
                .multipliers
                .iter()
                .map(|(i, y)| (system.labels[*i].clone(), q_to_string(y)))
                .collect();
            trace.push(format!(
                "inconsistent: a combination of {} row(s) reduces to 0 = {}",
                combination.len(),
                q_to_string(&c.rhs)
            ));
            contradiction = Some(ContradictionReport {
                combination,
                derived_equation: format!("0 = {}", q_to_string(&c.rhs)),
                raw: ContradictionJson::from(c),
            });
            exact_contradiction = Some(c.clone());
            Outcome::Infeasible
        }
        SolutionSet::Underdetermined { determined, .. } => {
            lambda = Some(
                determined
                    .chunks(3)
                    .map(|r| r.iter().map(|e| e.as_ref().map(q_to_string)).collect())
                    .collect(),
            );
            trace.push(format!(
                "consistent but rank {} < 9: Λ is not unique",
                solved.rank
            ));
            Outcome::Underdetermined
        }
    };

    let mut line_restrictions = Vec::new();
    for (component, on_u) in [(Component::N1, true), (Component::N2, false)] {
        let restriction = line_restriction(quadric, component, on_u)?;
        trace.push(format!(
            "{} on {}: forced {}",
            restriction.equation,
            restriction.line,
            if restriction.forced.is_empty() {
                "nothing".to_string()
            } else {
                restriction
                    .forced
                    .iter()
                    .map(|(k, v)| format!("{k} = {v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        ));
        line_restrictions.push(restriction);
    }

    let certificate = Certificate {
        kind: quadric.kind_number(),
        inputs,
        bases,
        bucket_count: parities.len(),
        unknowns,
        rows: system.n_rows(),
        columns: system.n_unknowns(),
        rank: solved.rank,
        outcome,
        lambda,
        contradiction,
        line_restrictions,
        trace,
        system,
        exact_lambda,
        exact_contradiction,
    };
    debug_assert!(certificate.verify());
    Ok(certificate)
}

/// Feasibility for kind 1 (`c` required) or kind 2 (`c` ignored).
pub fn feasibility(kind: u8, a: Q, b: Q, c: Option<Q>) -> Result<Certificate, ExactError> {
    let quadric = match kind {
        1 => {
            let c = c.ok_or_else(|| {
                ExactError::InvalidParameters("kind 1 needs a value for c".to_string())
            })?;
            ExactQuadric::kind1(a, b, c)?
        }
        2 => ExactQuadric::kind2(a, b)?,
        other => {
            return Err(ExactError::InvalidParameters(format!(
                "kind must be 1 or 2, got {other}"
            )))
        }
    };
    feasibility_for(&quadric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{parse_rational, QPoly};

    fn cert(kind: u8, a: &str, b: &str, c: Option<&str>) -> Certificate {
        feasibility(
            kind,
            parse_rational(a).unwrap(),
            parse_rational(b).unwrap(),
            c.map(|c| parse_rational(c).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn sphere_is_unique_two_over_c() {
        for c in ["1", "4", "9/4"] {
            let cert = cert(1, "-1", "-1", Some(c));
            assert_eq!(cert.outcome, Outcome::Unique);
            assert!(cert.verify());
            let two_over_c = q(2, 1) / parse_rational(c).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expected = if i == j { two_over_c.clone() } else { q(0, 1) };
                    assert_eq!(cert.lambda_entry(i, j).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn non_spheres_are_infeasible() {
        for (a, b, c) in [("1", "1", "1"), ("-1", "-2", "1"), ("2", "1", "1"), ("-1/2", "-1", "3")] {
            let cert = cert(1, a, b, Some(c));
            assert_eq!(cert.outcome, Outcome::Infeasible, "({a},{b},{c})");
            assert!(cert.verify());
        }
        for (a, b) in [("1", "1"), ("1", "2"), ("2", "3")] {
            let cert = cert(2, a, b, None);
            assert_eq!(cert.outcome, Outcome::Infeasible, "({a},{b})");
            assert!(cert.verify());
        }
    }

    #[test]
    fn lines_force_off_diagonal_zeros() {
        for (a, b, c) in [("1", "1", "1"), ("2", "1", "1"), ("-1", "-1", "4")] {
            let cert = cert(1, a, b, Some(c));
            let n1 = &cert.line_restrictions[0].forced;
            let n2 = &cert.line_restrictions[1].forced;
            for (map, keys) in [(n1, ["λ12", "λ13"]), (n2, ["λ21", "λ23"])] {
                for k in keys {
                    assert_eq!(map.get(k).map(String::as_str), Some("0"), "{k} at ({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn certificate_serializes() {
        let cert = cert(1, "-1", "-1", Some("4"));
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["outcome"], "unique");
        assert_eq!(json["lambda"][0][0], "1/2");
        assert_eq!(json["lambda"][0][1], "0");
        assert_eq!(json["columns"], 9);
    }

    #[test]
    fn rejects_bad_kind() {
        assert!(feasibility(3, q(1, 1), q(1, 1), None).is_err());
        assert!(feasibility(1, q(1, 1), q(1, 1), None).is_err());
    }

    #[test]
    fn bucket_soundness_on_constructed_zero() {
        let s = ExactQuadric::kind1(q(2, 1), q(1, 1), q(1, 1)).unwrap();
        let root = RadExpr::term(s.basis(), QPoly::one(), vec![1, 0]);
        let omega = RadExpr::poly(s.basis(), s.omega().unwrap());
        let zero = root.mul(&root).sub(&omega);
        assert_eq!(zero.bucket_count(), 0);
        let shifted = root.mul(&root).mul(&root).sub(&omega.mul(&root));
        assert!(shifted.is_zero());
    }
}
