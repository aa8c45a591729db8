//! Exact linear systems over `Q`, solved by integer-preserving elimination.
//!
//! Each rational row is first scaled to a primitive integer row. Elimination
//! then only forms integer combinations `p·r − e·s` and divides rows by their
//! content, so entries never leave `Z`. Every working row carries the integer
//! combination of original rows it came from, which makes an inconsistent
//! row a self-contained certificate: `Σ yᵢ·rowᵢ` has zero coefficients and a
//! nonzero right-hand side.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{q_to_string, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystemQ {
    pub unknowns: Vec<String>,
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
    /// Where each row came from, for traces.
    pub labels: Vec<String>,
}

/// `Σ multipliers[i] · row_i` has all-zero coefficients and right-hand side `rhs ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contradiction {
    pub multipliers: Vec<(usize, Q)>,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSet {
    Unique(Vec<Q>),
    Infeasible(Contradiction),
    /// `determined[k]` holds the value of unknown `k` when every solution agrees on it.
    Underdetermined {
        particular: Vec<Q>,
        free: Vec<usize>,
        determined: Vec<Option<Q>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub rank: usize,
    pub solution: SolutionSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionJson {
    pub multipliers: Vec<(usize, String)>,
    pub derived_rhs: String,
}

impl From<&Contradiction> for ContradictionJson {
    fn from(c: &Contradiction) -> Self {
        ContradictionJson {
            multipliers: c
                .multipliers
                .iter()
                .map(|(i, m)| (*i, q_to_string(m)))
                .collect(),
            derived_rhs: q_to_string(&c.rhs),
        }
    }
}

struct WorkRow {
    coeffs: Vec<BigInt>,
    rhs: BigInt,
    combo: Vec<BigInt>,
}

impl WorkRow {
    fn normalize(&mut self) {
        let mut g = BigInt::zero();
        for x in self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .chain(self.combo.iter())
        {
            if !x.is_zero() {
                g = g.gcd(x);
                if g.is_one() {
                    return;
                }
            }
        }
        if g.is_zero() || g.is_one() {
            return;
        }
        for x in self
            .coeffs
            .iter_mut()
            .chain(std::iter::once(&mut self.rhs))
            .chain(self.combo.iter_mut())
        {
            *x /= &g;
        }
    }

    /// `self ← p·self − e·other`.
    fn eliminate(&mut self, p: &BigInt, e: &BigInt, other: &WorkRow) {
        let apply = |x: &mut BigInt, y: &BigInt| *x = &*x * p - e * y;
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(x, y)| apply(x, y));
        apply(&mut self.rhs, &other.rhs);
        self.combo
            .iter_mut()
            .zip(&other.combo)
            .for_each(|(x, y)| apply(x, y));
        self.normalize();
    }
}

/// Least common multiple of the denominators in a rational row.
fn row_scale(row: &[Q], rhs: &Q) -> BigInt {
    row.iter()
        .chain(std::iter::once(rhs))
        .fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

impl LinearSystemQ {
    pub fn new(unknowns: Vec<String>) -> Self {
        LinearSystemQ {
            unknowns,
            rows: Vec::new(),
            rhs: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Adds `Σ coeffs[k]·x_k = rhs`; all-zero equations `0 = 0` are dropped.
    pub fn push(&mut self, coeffs: Vec<Q>, rhs: Q, label: impl Into<String>) {
        assert_eq!(coeffs.len(), self.unknowns.len(), "row width");
        if coeffs.iter().all(Zero::is_zero) && rhs.is_zero() {
            return;
        }
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        self.labels.push(label.into());
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn solve(&self) -> Solved {
        let n = self.unknowns.len();
        let m = self.rows.len();
        let mut work: Vec<WorkRow> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .enumerate()
            .map(|(i, (row, rhs))| {
                let scale = Q::from_integer(row_scale(row, rhs));
                let to_int = |x: &Q| (x * &scale).to_integer();
                let mut combo = vec![BigInt::zero(); m];
                combo[i] = scale.to_integer();
                let mut w = WorkRow {
                    coeffs: row.iter().map(to_int).collect(),
                    rhs: to_int(rhs),
                    combo,
                };
                w.normalize();
                w
            })
            .collect();

        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..n {
            if r == m {
                break;
            }
            // Smallest nonzero magnitude keeps growth down.
            let Some(p) = (r..m)
                .filter(|&i| !work[i].coeffs[col].is_zero())
                .min_by_key(|&i| work[i].coeffs[col].magnitude().clone())
            else {
                continue;
            };
            work.swap(r, p);
            let (before, rest) = work.split_at_mut(r);
            let (pivot_slot, after) = rest.split_at_mut(1);
            let pivot_row = &pivot_slot[0];
            let pivot = pivot_row.coeffs[col].clone();
            for row in before.iter_mut().chain(after.iter_mut()) {
                let e = row.coeffs[col].clone();
                if e.is_zero() {
                    continue;
                }
                let g = pivot.gcd(&e);
                row.eliminate(&(&pivot / &g), &(&e / &g), pivot_row);
            }
            pivots.push(col);
            r += 1;
        }
        let rank = r;

        if let Some(bad) = work[rank..].iter().find(|w| !w.rhs.is_zero()) {
            let multipliers = bad
                .combo
                .iter()
                .enumerate()
                .filter(|(_, y)| !y.is_zero())
                .map(|(i, y)| (i, Q::from_integer(y.clone())))
                .collect();
            return Solved {
                rank,
                solution: SolutionSet::Infeasible(Contradiction {
                    multipliers,
                    rhs: Q::from_integer(bad.rhs.clone()),
                }),
            };
        }

        let mut particular = vec![Q::zero(); n];
        let mut determined = vec![None; n];
        for (row, &col) in work[..rank].iter().zip(&pivots) {
            let value = Q::new(row.rhs.clone(), row.coeffs[col].clone());
            particular[col] = value.clone();
            let only_pivot = row
                .coeffs
                .iter()
                .enumerate()
                .all(|(k, x)| k == col || x.is_zero());
            if only_pivot {
                determined[col] = Some(value);
            }
        }
        let solution = if rank == n {
            SolutionSet::Unique(particular)
        } else {
            let free = (0..n).filter(|c| !pivots.contains(c)).collect();
            SolutionSet::Underdetermined {
                particular,
                free,
                determined,
            }
        };
        Solved { rank, solution }
    }

    /// Checks a contradiction against the rows exactly.
    pub fn verify_contradiction(&self, c: &Contradiction) -> bool {
        let n = self.unknowns.len();
        let mut combined = vec![Q::zero(); n];
        let mut rhs = Q::zero();
        for (i, y) in &c.multipliers {
            let Some(row) = self.rows.get(*i) else {
                return false;
            };
            for (acc, x) in combined.iter_mut().zip(row) {
                *acc += y * x;
            }
            rhs += y * &self.rhs[*i];
        }
        combined.iter().all(Zero::is_zero) && !rhs.is_zero() && rhs == c.rhs
    }

    /// Checks that `x` satisfies every row exactly.
    pub fn satisfies(&self, x: &[Q]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(row, b)| {
            row.iter()
                .zip(x)
                .fold(Q::zero(), |acc, (a, xi)| acc + a * xi)
                == *b
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::q;

    fn system(rows: &[(&[i64], i64)]) -> LinearSystemQ {
        let n = rows[0].0.len();
        let mut s = LinearSystemQ::new((0..n).map(|k| format!("x{k}")).collect());
        for (i, (row, rhs)) in rows.iter().enumerate() {
            s.push(row.iter().map(|&x| q(x, 1)).collect(), q(*rhs, 1), format!("r{i}"));
        }
        s
    }

    #[test]
    fn unique_rational_solution() {
        // 2x + y = 1, x − 3y = 4 → x = 1, y = −1; extra consistent row.
        let s = system(&[(&[2, 1], 1), (&[1, -3], 4), (&[3, -2], 5)]);
        let solved = s.solve();
        assert_eq!(solved.rank, 2);
        assert_eq!(solved.solution, SolutionSet::Unique(vec![q(1, 1), q(-1, 1)]));
    }

    #[test]
    fn rational_coefficients() {
        let mut s = LinearSystemQ::new(vec!["x".into()]);
        s.push(vec![q(3, 7)], q(1, 2), "r");
        assert_eq!(s.solve().solution, SolutionSet::Unique(vec![q(7, 6)]));
    }

    #[test]
    fn contradiction_certificate() {
        let s = system(&[(&[1, 1], 1), (&[2, 2], 3), (&[1, -1], 0)]);
        let solved = s.solve();
        let SolutionSet::Infeasible(c) = &solved.solution else {
            panic!("expected infeasible, got {:?}", solved.solution);
        };
        assert!(s.verify_contradiction(c));
        let mut tampered = c.clone();
        tampered.rhs = q(0, 1);
        assert!(!s.verify_contradiction(&tampered));
    }

    #[test]
    fn underdetermined_reports_forced_values() {
        // x0 free (no equation), x1 = 0, x2 = 0 from bv·x1 − x2 style rows.
        let s = system(&[(&[0, 2, 0], 0), (&[0, 0, 5], 0), (&[0, 1, 1], 0)]);
        let solved = s.solve();
        assert_eq!(solved.rank, 2);
        match solved.solution {
            SolutionSet::Underdetermined {
                free, determined, ..
            } => {
                assert_eq!(free, vec![0]);
                assert_eq!(determined, vec![None, Some(q(0, 1)), Some(q(0, 1))]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_rows_are_dropped() {
        let s = system(&[(&[0, 0], 0), (&[1, 0], 2)]);
        assert_eq!(s.n_rows(), 1);
    }
}
