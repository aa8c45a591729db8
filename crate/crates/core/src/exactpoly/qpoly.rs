use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Q;

/// Sparse bivariate polynomial in `u, v` with exact rational coefficients.
///
/// Keys are `(deg_u, deg_v)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        QPoly::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        QPoly { terms }
    }

    pub fn u() -> Self {
        QPoly::monomial(1, 0, Q::one())
    }

    pub fn v() -> Self {
        QPoly::monomial(0, 1, Q::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Q)>) -> Self {
        let mut out = QPoly::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    fn add_term(&mut self, key: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no `u`/`v` dependence.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Coefficient of `u^i v^j`.
    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            terms: self.terms.iter().map(|(&m, c)| (m, c * k)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = QPoly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn derive_u(&self) -> Self {
        QPoly::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * Q::from_integer(BigInt::from(i)))),
        )
    }

    pub fn derive_v(&self) -> Self {
        QPoly::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * Q::from_integer(BigInt::from(j)))),
        )
    }

    /// Fixes `u` to a rational value.
    pub fn substitute_u(&self, value: &Q) -> Self {
        QPoly::from_terms(
            self.terms
                .iter()
                .map(|(&(i, j), c)| ((0, j), c * pow_q(value, i))),
        )
    }

    /// Fixes `v` to a rational value.
    pub fn substitute_v(&self, value: &Q) -> Self {
        QPoly::from_terms(
            self.terms
                .iter()
                .map(|(&(i, j), c)| ((i, 0), c * pow_q(value, j))),
        )
    }

    pub fn eval(&self, u: &Q, v: &Q) -> Q {
        self.terms
            .iter()
            .fold(Q::zero(), |acc, (&(i, j), c)| acc + c * pow_q(u, i) * pow_q(v, j))
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, (&(i, j), c)| {
            acc + c.to_f64().unwrap_or(f64::NAN) * u.powi(i as i32) * v.powi(j as i32)
        })
    }

    /// Divides by `u^i v^j`; `None` if some term has a smaller power.
    pub fn div_monomial(&self, i: u32, j: u32) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            if a < i || b < j {
                return None;
            }
            terms.insert((a - i, b - j), c.clone());
        }
        Some(QPoly { terms })
    }

    /// Leading term in lexicographic order (`u` before `v`).
    fn leading(&self) -> Option<((u32, u32), &Q)> {
        self.terms.iter().next_back().map(|(&k, c)| (k, c))
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &QPoly) -> Option<QPoly> {
        let (lead_key, lead_coeff) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quotient = QPoly::zero();
        while let Some(((a, b), c)) = rem.leading() {
            if a < lead_key.0 || b < lead_key.1 {
                return None;
            }
            let factor = QPoly::monomial(a - lead_key.0, b - lead_key.1, c / lead_coeff);
            rem = &rem - &(&factor * divisor);
            quotient = &quotient + &factor;
        }
        Some(quotient)
    }

    /// `R` with `R² = self`, if one exists in `Q[u, v]`.
    pub fn try_sqrt(&self) -> Option<QPoly> {
        let Some(((i, j), c)) = self.leading() else {
            return Some(QPoly::zero());
        };
        if i % 2 != 0 || j % 2 != 0 {
            return None;
        }
        let lead = ((i / 2, j / 2), super::radical::rational_sqrt(c)?);
        let twice_lead = &lead.1 * Q::from_integer(BigInt::from(2));
        let mut root = QPoly::monomial(lead.0 .0, lead.0 .1, lead.1.clone());
        let mut last = lead.0;
        loop {
            let rem = self - &(&root * &root);
            let Some(((a, b), rc)) = rem.leading() else {
                return Some(root);
            };
            if a < lead.0 .0 || b < lead.0 .1 {
                return None;
            }
            let key = (a - lead.0 .0, b - lead.0 .1);
            if key >= last {
                return None;
            }
            root = &root + &QPoly::monomial(key.0, key.1, rc / &twice_lead);
            last = key;
        }
    }
}

pub(crate) fn pow_q(base: &Q, exp: u32) -> Q {
    num_traits::pow(base.clone(), exp as usize)
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPoly({self})")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let unit = mag.is_one() && (i, j) != (0, 0);
            if !unit {
                write!(f, "{mag}")?;
            }
            let mut first = unit;
            for (name, p) in [("u", i), ("v", j)] {
                if p == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if p == 1 {
                    f.write_str(name)?;
                } else {
                    write!(f, "{name}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &rhs.terms {
                out.add_term((a + c, b + d), x * y);
            }
        }
        out
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for QPoly {
            type Output = QPoly;
            fn $method(self, rhs: QPoly) -> QPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        -&self
    }
}
