//! Expressions `Σ N(u,v) · B₁^{p₁/2} · B₂^{p₂/2} ···` over a fixed list of
//! base polynomials `Bₖ`.
//!
//! Terms are grouped by the parity vector `(p₁ mod 2, p₂ mod 2, …)`. Inside a
//! parity bucket all terms are merged into a single numerator over the
//! smallest exponents present, so each bucket is exactly one [`RadTerm`].
//! Negative exponents play the role of denominators.
//!
//! Bucket separation is sound when no product of a nonempty subset of the
//! bases is a square in `Q(u, v)`. Constant bases that are rational squares
//! break that assumption, so they are folded into the numerator on
//! construction of every term.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::qpoly::QPoly;
use super::Q;

/// The base polynomials of a radical algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalBasis {
    names: Vec<String>,
    bases: Vec<QPoly>,
    du: Vec<QPoly>,
    dv: Vec<QPoly>,
    /// `Some(s)` when the base is the constant `s²`.
    const_root: Vec<Option<Q>>,
}

/// Square root of a nonnegative rational, if it is rational.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let int_root = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Q::new(int_root(x.numer())?, int_root(x.denom())?))
}

impl RadicalBasis {
    pub fn new(named: Vec<(&str, QPoly)>) -> Arc<Self> {
        let mut names = Vec::new();
        let mut bases = Vec::new();
        for (name, poly) in named {
            assert!(!poly.is_zero(), "radical base {name} is the zero polynomial");
            names.push(name.to_string());
            bases.push(poly);
        }
        let du = bases.iter().map(QPoly::derive_u).collect();
        let dv = bases.iter().map(QPoly::derive_v).collect();
        let const_root = bases
            .iter()
            .map(|b| b.as_constant().and_then(|c| rational_sqrt(&c)))
            .collect();
        Arc::new(RadicalBasis {
            names,
            bases,
            du,
            dv,
            const_root,
        })
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn base(&self, k: usize) -> &QPoly {
        &self.bases[k]
    }

    pub fn is_absorbed(&self, k: usize) -> bool {
        self.const_root[k].is_some()
    }

    /// True when no product of a nonempty subset of the non-absorbed bases is
    /// a square in `Q[u, v]`, so distinct parity buckets are linearly
    /// independent over rational functions.
    pub fn radicals_independent(&self) -> bool {
        let live: Vec<usize> = (0..self.len()).filter(|&k| !self.is_absorbed(k)).collect();
        (1u32..(1 << live.len())).all(|mask| {
            let product = live
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .fold(QPoly::one(), |acc, (_, &k)| &acc * &self.bases[k]);
            product.try_sqrt().is_none()
        })
    }

    /// Multiplies `num` by `B_k^{shift/2}`; `None` if that needs an inexact
    /// division or an irrational constant.
    pub fn shift_numerator(&self, num: &QPoly, k: usize, shift: i32) -> Option<QPoly> {
        if shift == 0 {
            return Some(num.clone());
        }
        if let Some(root) = &self.const_root[k] {
            let factor = if shift > 0 {
                num_traits::pow(root.clone(), shift as usize)
            } else {
                num_traits::pow(root.recip(), (-shift) as usize)
            };
            return Some(num.scale(&factor));
        }
        if shift % 2 != 0 {
            return None;
        }
        if shift > 0 {
            Some(num * &self.bases[k].pow((shift / 2) as u32))
        } else {
            let mut out = num.clone();
            for _ in 0..(-shift / 2) {
                out = out.div_exact(&self.bases[k])?;
            }
            Some(out)
        }
    }

    /// Applies `f` to every base.
    fn substituted(&self, f: impl Fn(&QPoly) -> QPoly) -> Arc<Self> {
        RadicalBasis::new(
            self.names
                .iter()
                .zip(&self.bases)
                .map(|(n, b)| (n.as_str(), f(b)))
                .collect(),
        )
    }
}

/// `numerator · Π B_k^{half_powers[k]/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadTerm {
    pub numerator: QPoly,
    pub half_powers: Vec<i32>,
}

impl RadTerm {
    pub fn parity(&self) -> Vec<u8> {
        self.half_powers.iter().map(|p| p.rem_euclid(2) as u8).collect()
    }

    /// `Π_{p_k<0} B_k^{⌈−p_k/2⌉}`: clearing it leaves only nonnegative powers.
    pub fn denominator(&self, basis: &RadicalBasis) -> QPoly {
        let mut out = QPoly::one();
        for (k, &p) in self.half_powers.iter().enumerate() {
            if p < 0 {
                out = &out * &basis.base(k).pow(((-p + 1) / 2) as u32);
            }
        }
        out
    }

    /// The numerator this term has when written over the exponents `target`
    /// (same parity); `None` if that needs an inexact division.
    pub fn numerator_at(&self, basis: &RadicalBasis, target: &[i32]) -> Option<QPoly> {
        let mut num = self.numerator.clone();
        for (k, (&p, &t)) in self.half_powers.iter().zip(target).enumerate() {
            num = basis.shift_numerator(&num, k, p - t)?;
        }
        Some(num)
    }
}

#[derive(Clone, PartialEq)]
pub struct RadExpr {
    basis: Arc<RadicalBasis>,
    buckets: BTreeMap<Vec<u8>, RadTerm>,
}

impl fmt::Debug for RadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadExpr({self})")
    }
}

impl fmt::Display for RadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.buckets.is_empty() {
            return f.write_str("0");
        }
        for (n, term) in self.buckets.values().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})", term.numerator)?;
            for (k, &p) in term.half_powers.iter().enumerate() {
                if p != 0 {
                    write!(f, "·{}^({}/2)", self.basis.names[k], p)?;
                }
            }
        }
        Ok(())
    }
}

impl RadExpr {
    pub fn zero(basis: &Arc<RadicalBasis>) -> Self {
        RadExpr {
            basis: Arc::clone(basis),
            buckets: BTreeMap::new(),
        }
    }

    pub fn poly(basis: &Arc<RadicalBasis>, p: QPoly) -> Self {
        Self::term(basis, p, vec![0; basis.len()])
    }

    pub fn constant(basis: &Arc<RadicalBasis>, c: Q) -> Self {
        Self::poly(basis, QPoly::constant(c))
    }

    pub fn term(basis: &Arc<RadicalBasis>, numerator: QPoly, half_powers: Vec<i32>) -> Self {
        assert_eq!(half_powers.len(), basis.len(), "half-power vector length");
        let mut out = Self::zero(basis);
        out.push(RadTerm {
            numerator,
            half_powers,
        });
        out
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    pub fn buckets(&self) -> impl Iterator<Item = (&Vec<u8>, &RadTerm)> {
        self.buckets.iter()
    }

    pub fn bucket(&self, parity: &[u8]) -> Option<&RadTerm> {
        self.buckets.get(parity)
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_zero(&self) -> bool {
        self.buckets.is_empty()
    }

    /// The only term, when the expression lives in one parity bucket.
    pub fn single_term(&self) -> Option<&RadTerm> {
        if self.buckets.len() == 1 {
            self.buckets.values().next()
        } else {
            None
        }
    }

    fn absorb_constants(&self, mut term: RadTerm) -> RadTerm {
        for k in 0..self.basis.len() {
            let p = term.half_powers[k];
            if p != 0 && self.basis.is_absorbed(k) {
                term.numerator = self
                    .basis
                    .shift_numerator(&term.numerator, k, p)
                    .expect("absorbed bases are rational squares");
                term.half_powers[k] = 0;
            }
        }
        term
    }

    fn push(&mut self, term: RadTerm) {
        if term.numerator.is_zero() {
            return;
        }
        let term = self.absorb_constants(term);
        let parity = term.parity();
        let merged = match self.buckets.remove(&parity) {
            None => term,
            Some(existing) => {
                let low: Vec<i32> = existing
                    .half_powers
                    .iter()
                    .zip(&term.half_powers)
                    .map(|(a, b)| *a.min(b))
                    .collect();
                let lift = |t: &RadTerm| {
                    let mut num = t.numerator.clone();
                    for k in 0..low.len() {
                        num = self
                            .basis
                            .shift_numerator(&num, k, t.half_powers[k] - low[k])
                            .expect("same-parity shifts are even and nonnegative");
                    }
                    num
                };
                RadTerm {
                    numerator: &lift(&existing) + &lift(&term),
                    half_powers: low,
                }
            }
        };
        if !merged.numerator.is_zero() {
            self.buckets.insert(parity, merged);
        }
    }

    fn same_basis(&self, other: &RadExpr) {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis,
            "radical expressions over different bases"
        );
    }

    pub fn add(&self, rhs: &RadExpr) -> RadExpr {
        self.same_basis(rhs);
        let mut out = self.clone();
        for t in rhs.buckets.values() {
            out.push(t.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &RadExpr) -> RadExpr {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> RadExpr {
        self.scale_poly(&QPoly::constant(-Q::one()))
    }

    pub fn scale_poly(&self, p: &QPoly) -> RadExpr {
        let mut out = RadExpr::zero(&self.basis);
        for t in self.buckets.values() {
            out.push(RadTerm {
                numerator: &t.numerator * p,
                half_powers: t.half_powers.clone(),
            });
        }
        out
    }

    pub fn mul(&self, rhs: &RadExpr) -> RadExpr {
        self.same_basis(rhs);
        let mut out = RadExpr::zero(&self.basis);
        for a in self.buckets.values() {
            for b in rhs.buckets.values() {
                out.push(RadTerm {
                    numerator: &a.numerator * &b.numerator,
                    half_powers: a
                        .half_powers
                        .iter()
                        .zip(&b.half_powers)
                        .map(|(x, y)| x + y)
                        .collect(),
                });
            }
        }
        out
    }

    fn derive(&self, along_u: bool) -> RadExpr {
        let mut out = RadExpr::zero(&self.basis);
        for t in self.buckets.values() {
            let dn = if along_u {
                t.numerator.derive_u()
            } else {
                t.numerator.derive_v()
            };
            out.push(RadTerm {
                numerator: dn,
                half_powers: t.half_powers.clone(),
            });
            for (k, &p) in t.half_powers.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let db = if along_u {
                    &self.basis.du[k]
                } else {
                    &self.basis.dv[k]
                };
                let mut powers = t.half_powers.clone();
                powers[k] -= 2;
                out.push(RadTerm {
                    numerator: (&t.numerator * db).scale(&Q::new(BigInt::from(p), BigInt::from(2))),
                    half_powers: powers,
                });
            }
        }
        out
    }

    pub fn derive_u(&self) -> RadExpr {
        self.derive(true)
    }

    pub fn derive_v(&self) -> RadExpr {
        self.derive(false)
    }

    /// Moves every factor of a base out of each numerator into the exponent.
    pub fn reduced(&self) -> RadExpr {
        let mut out = RadExpr::zero(&self.basis);
        for t in self.buckets.values() {
            let mut term = t.clone();
            for k in 0..self.basis.len() {
                if self.basis.base(k).as_constant().is_some() {
                    continue;
                }
                while let Some(q) = term.numerator.div_exact(self.basis.base(k)) {
                    term.numerator = q;
                    term.half_powers[k] += 2;
                }
            }
            out.push(term);
        }
        out
    }

    /// `1/self` for a single term whose reduced numerator is a constant.
    pub fn try_recip(&self) -> Option<RadExpr> {
        let reduced = self.reduced();
        let t = reduced.single_term()?;
        let c = t.numerator.as_constant()?;
        if c.is_zero() {
            return None;
        }
        Some(RadExpr::term(
            &self.basis,
            QPoly::constant(c.recip()),
            t.half_powers.iter().map(|p| -p).collect(),
        ))
    }

    /// `√self` for a single term with a rational-square constant numerator
    /// and even exponents.
    pub fn try_sqrt(&self) -> Option<RadExpr> {
        let reduced = self.reduced();
        let t = reduced.single_term()?;
        let root = rational_sqrt(&t.numerator.as_constant()?)?;
        if t.half_powers.iter().any(|p| p % 2 != 0) {
            return None;
        }
        Some(RadExpr::term(
            &self.basis,
            QPoly::constant(root),
            t.half_powers.iter().map(|p| p / 2).collect(),
        ))
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> f64 {
        let bases: Vec<f64> = self.basis.bases.iter().map(|b| b.eval_f64(u, v)).collect();
        self.buckets
            .values()
            .map(|t| {
                let radical: f64 = t
                    .half_powers
                    .iter()
                    .zip(&bases)
                    .map(|(&p, &b)| b.sqrt().powi(p))
                    .product();
                t.numerator.eval_f64(u, v) * radical
            })
            .sum()
    }

    /// Evaluates with exact numerators and exact base values, rounding only
    /// the final radicals.
    pub fn eval_rational_point(&self, u: &Q, v: &Q) -> f64 {
        let bases: Vec<Q> = self.basis.bases.iter().map(|b| b.eval(u, v)).collect();
        self.buckets
            .values()
            .map(|t| {
                let mut exact = t.numerator.eval(u, v);
                let mut radical = 1.0;
                for (&p, b) in t.half_powers.iter().zip(&bases) {
                    let whole = p.div_euclid(2);
                    exact *= if whole >= 0 {
                        num_traits::pow(b.clone(), whole as usize)
                    } else {
                        num_traits::pow(b.recip(), (-whole) as usize)
                    };
                    if p.rem_euclid(2) == 1 {
                        radical *= b.to_f64().unwrap_or(f64::NAN).sqrt();
                    }
                }
                exact.to_f64().unwrap_or(f64::NAN) * radical
            })
            .sum()
    }

    /// Fixes `u` to a rational value, re-bucketing over the restricted bases.
    pub fn substitute_u(&self, value: &Q) -> RadExpr {
        let basis = self.basis.substituted(|b| b.substitute_u(value));
        self.rebase(basis, |p| p.substitute_u(value))
    }

    /// Fixes `v` to a rational value, re-bucketing over the restricted bases.
    pub fn substitute_v(&self, value: &Q) -> RadExpr {
        let basis = self.basis.substituted(|b| b.substitute_v(value));
        self.rebase(basis, |p| p.substitute_v(value))
    }

    fn rebase(&self, basis: Arc<RadicalBasis>, f: impl Fn(&QPoly) -> QPoly) -> RadExpr {
        let mut out = RadExpr::zero(&basis);
        for t in self.buckets.values() {
            out.push(RadTerm {
                numerator: f(&t.numerator),
                half_powers: t.half_powers.clone(),
            });
        }
        out
    }
}

/// Rewrites several expressions over common exponents bucket by bucket.
///
/// For every parity class present in any input, returns the smallest
/// exponents found and each input's numerator lifted to them (zero when the
/// input has no term in that class).
pub fn align(exprs: &[&RadExpr]) -> BTreeMap<Vec<u8>, (Vec<i32>, Vec<QPoly>)> {
    let mut out = BTreeMap::new();
    let Some(first) = exprs.first() else {
        return out;
    };
    let basis = Arc::clone(&first.basis);
    let mut parities: Vec<Vec<u8>> = exprs
        .iter()
        .flat_map(|e| e.buckets.keys().cloned())
        .collect();
    parities.sort();
    parities.dedup();
    for parity in parities {
        let mut low: Option<Vec<i32>> = None;
        for e in exprs {
            if let Some(t) = e.buckets.get(&parity) {
                low = Some(match low {
                    None => t.half_powers.clone(),
                    Some(l) => l.iter().zip(&t.half_powers).map(|(a, b)| *a.min(b)).collect(),
                });
            }
        }
        let low = low.expect("parity taken from some input");
        let nums = exprs
            .iter()
            .map(|e| match e.buckets.get(&parity) {
                None => QPoly::zero(),
                Some(t) => {
                    let mut num = t.numerator.clone();
                    for k in 0..low.len() {
                        num = basis
                            .shift_numerator(&num, k, t.half_powers[k] - low[k])
                            .expect("same-parity shifts are even and nonnegative");
                    }
                    num
                }
            })
            .collect();
        out.insert(parity, (low, nums));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::q;

    fn omega() -> QPoly {
        // 1 + 2u² − v²
        QPoly::from_terms([((0, 0), q(1, 1)), ((2, 0), q(2, 1)), ((0, 2), q(-1, 1))])
    }

    #[test]
    fn square_of_root_cancels() {
        let basis = RadicalBasis::new(vec![("ω", omega())]);
        let root = RadExpr::term(&basis, QPoly::one(), vec![1]);
        let diff = root.mul(&root).sub(&RadExpr::poly(&basis, omega()));
        assert!(diff.is_zero());
    }

    #[test]
    fn distinct_parities_stay_apart() {
        let basis = RadicalBasis::new(vec![("ω", omega()), ("Φ", QPoly::constant(q(3, 1)))]);
        let a = RadExpr::term(&basis, QPoly::u(), vec![1, 0]);
        let b = RadExpr::term(&basis, QPoly::v(), vec![0, 1]);
        let c = RadExpr::term(&basis, QPoly::one(), vec![-1, -3]);
        let sum = a.add(&b).add(&c);
        assert_eq!(sum.bucket_count(), 3);
        assert!(sum.sub(&a).sub(&b).sub(&c).is_zero());
    }

    #[test]
    fn square_constant_base_is_absorbed() {
        let basis = RadicalBasis::new(vec![("Φ", QPoly::constant(q(9, 4)))]);
        let t = RadExpr::term(&basis, QPoly::u(), vec![-1]);
        let single = t.single_term().unwrap();
        assert_eq!(single.half_powers, vec![0]);
        assert_eq!(single.numerator, QPoly::monomial(1, 0, q(2, 3)));
    }

    #[test]
    fn derivative_matches_chain_rule() {
        let basis = RadicalBasis::new(vec![("ω", omega())]);
        // d/du √ω = ω_u / (2√ω) = 2u · ω^{-1/2}
        let root = RadExpr::term(&basis, QPoly::one(), vec![1]);
        let d = root.derive_u();
        let expected = RadExpr::term(&basis, QPoly::monomial(1, 0, q(2, 1)), vec![-1]);
        assert!(d.sub(&expected).is_zero());
        let value = d.eval_f64(0.3, 0.2);
        let fd = {
            let f = |u: f64| (1.0 + 2.0 * u * u - 0.04f64).sqrt();
            (f(0.3 + 1e-6) - f(0.3 - 1e-6)) / 2e-6
        };
        assert!((value - fd).abs() < 1e-8);
    }

    #[test]
    fn recip_and_sqrt_of_monomial_terms() {
        let basis = RadicalBasis::new(vec![("ω", omega())]);
        let w = RadExpr::poly(&basis, omega().scale(&q(4, 1)));
        let root = w.try_sqrt().unwrap();
        let expected = RadExpr::term(&basis, QPoly::constant(q(2, 1)), vec![1]);
        assert!(root.sub(&expected).is_zero());
        let inv = w.try_recip().unwrap();
        assert!(inv.mul(&w).sub(&RadExpr::constant(&basis, q(1, 1))).is_zero());
        assert!(RadExpr::poly(&basis, QPoly::u()).try_recip().is_none());
    }

    #[test]
    fn substitution_rebuckets() {
        // Φ = 4 + u² becomes the square 4 at u = 0, so √Φ turns rational.
        let phi = QPoly::from_terms([((0, 0), q(4, 1)), ((2, 0), q(1, 1))]);
        let basis = RadicalBasis::new(vec![("Φ", phi)]);
        let e = RadExpr::term(&basis, QPoly::v(), vec![1]).add(&RadExpr::poly(&basis, QPoly::v()));
        assert_eq!(e.bucket_count(), 2);
        let restricted = e.substitute_u(&q(0, 1));
        assert_eq!(restricted.bucket_count(), 1);
        assert_eq!(
            restricted.single_term().unwrap().numerator,
            QPoly::monomial(0, 1, q(3, 1))
        );
    }

    #[test]
    fn align_lifts_to_common_exponents() {
        let basis = RadicalBasis::new(vec![("ω", omega())]);
        let a = RadExpr::term(&basis, QPoly::one(), vec![1]);
        let b = RadExpr::term(&basis, QPoly::u(), vec![-1]);
        let aligned = align(&[&a, &b]);
        let (low, nums) = &aligned[&vec![1u8]];
        assert_eq!(low, &vec![-1]);
        assert_eq!(nums[0], omega());
        assert_eq!(nums[1], QPoly::u());
    }

    #[test]
    fn rational_exact_eval() {
        let basis = RadicalBasis::new(vec![("ω", omega())]);
        let e = RadExpr::term(&basis, QPoly::u(), vec![-3]);
        let got = e.eval_rational_point(&q(1, 2), &q(1, 3));
        let w: f64 = 1.0 + 0.5 - 1.0 / 9.0;
        assert!((got - 0.5 / w.powf(1.5)).abs() < 1e-15);
        assert!((e.eval_f64(0.5, 1.0 / 3.0) - got).abs() < 1e-14);
    }
}
