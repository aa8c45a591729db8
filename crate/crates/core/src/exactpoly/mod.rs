//! Exact rational computer algebra for the quadric Gauss-map problem.

pub mod audit;
pub mod feasibility;
pub mod linsys;
pub mod qpoly;
pub mod radical;
pub mod symbolic;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use audit::{audit_fg, FgAudit, MonomialRow, SliceComparison};
pub use feasibility::{feasibility, Certificate, Outcome};
pub use linsys::{Contradiction, LinearSystemQ, SolutionSet, Solved};
pub use qpoly::QPoly;
pub use radical::{align, RadExpr, RadTerm, RadicalBasis};
pub use symbolic::{symbolic_laplacian_q1, symbolic_laplacian_q2, Component, ExactQuadric};

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("expression leaves the radical algebra: {0}")]
    NotRepresentable(String),
}

/// `n/d`; panics when `d = 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Q, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        let whole: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| err())?
        };
        let frac_int: BigInt = frac.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Q::new(whole * &scale + frac_int, scale);
        return Ok(if negative { -mag } else { mag });
    }
    t.parse::<BigInt>().map(Q::from_integer).map_err(|_| err())
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("9/4").unwrap(), q(9, 4));
        assert_eq!(parse_rational("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), q(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn prints_lowest_terms() {
        assert_eq!(q_to_string(&q(6, 4)), "3/2");
        assert_eq!(q_to_string(&q(-4, 2)), "-2");
    }
}
