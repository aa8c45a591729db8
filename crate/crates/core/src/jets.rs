//! Bivariate truncated Taylor arithmetic.
//!
//! A [`Jet3`] carries a scalar function of `(u, v)` together with all of its
//! partial derivatives up to total order three at a fixed base point. The
//! coefficients are the raw partials `∂^{i+j} f / ∂u^i ∂v^j` (not divided by
//! factorials), so multiplication is the truncated Leibniz rule with binomial
//! weights.
//!
//! Jets also remember how many orders are trustworthy. Taking a partial
//! derivative of an order-3 jet yields an order-2 jet, and binary operations
//! keep the smaller of the two orders. This lets metric coefficients built
//! from first derivatives of the position be used safely in second-order
//! operators.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Highest total order carried by a jet.
pub const MAX_ORDER: usize = 3;

/// Number of stored coefficients (multi-indices with `i + j <= 3`).
pub const N_COEFFS: usize = 10;

/// Default magnitude floor below which a divisor is treated as singular.
pub const DEFAULT_DIV_FLOOR: f64 = 1e-300;

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("singular evaluation: divisor value {value:e} is below the floor {floor:e}")]
    Singular { value: f64, floor: f64 },
    #[error("{op} evaluated outside its domain (argument value {value})")]
    Domain { op: &'static str, value: f64 },
}

/// Storage slot for the multi-index `(i, j)`.
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

/// Multi-indices in storage order.
pub const MULTI_INDICES: [(usize, usize); N_COEFFS] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

#[derive(Clone, Copy, PartialEq)]
pub struct Jet3 {
    coeffs: [f64; N_COEFFS],
    order: u8,
}

impl fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_struct("Jet3");
        list.field("order", &self.order);
        for &(i, j) in MULTI_INDICES.iter() {
            if i + j <= self.order as usize {
                list.field(&format!("d{i}{j}"), &self.coeffs[index(i, j)]);
            }
        }
        list.finish()
    }
}

/// Which binary operation [`combine`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Univariate functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sqrt,
    Sin,
    Cos,
    Exp,
    PowInt(i32),
}

impl Jet3 {
    pub fn constant(value: f64) -> Self {
        let mut coeffs = [0.0; N_COEFFS];
        coeffs[0] = value;
        Jet3 {
            coeffs,
            order: MAX_ORDER as u8,
        }
    }

    /// The coordinate function `u` seeded at `u0`.
    pub fn var_u(u0: f64) -> Self {
        let mut jet = Self::constant(u0);
        jet.coeffs[index(1, 0)] = 1.0;
        jet
    }

    /// The coordinate function `v` seeded at `v0`.
    pub fn var_v(v0: f64) -> Self {
        let mut jet = Self::constant(v0);
        jet.coeffs[index(0, 1)] = 1.0;
        jet
    }

    /// Builds a jet from raw partials in storage order (see [`MULTI_INDICES`]).
    pub fn from_partials(coeffs: [f64; N_COEFFS], order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut jet = Jet3 {
            coeffs,
            order: order as u8,
        };
        jet.clear_above_order();
        jet
    }

    fn clear_above_order(&mut self) {
        for (slot, &(i, j)) in MULTI_INDICES.iter().enumerate() {
            if i + j > self.order as usize {
                self.coeffs[slot] = 0.0;
            }
        }
    }

    /// Number of derivative orders carried exactly.
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The partial `∂^{i+j} f / ∂u^i ∂v^j`.
    ///
    /// Panics when `i + j` exceeds the order carried by this jet.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        assert!(
            i + j <= self.order as usize,
            "partial ({i},{j}) requested from an order-{} jet",
            self.order
        );
        self.coeffs[index(i, j)]
    }

    pub fn du(&self) -> f64 {
        self.partial(1, 0)
    }

    pub fn dv(&self) -> f64 {
        self.partial(0, 1)
    }

    pub fn duu(&self) -> f64 {
        self.partial(2, 0)
    }

    pub fn duv(&self) -> f64 {
        self.partial(1, 1)
    }

    pub fn dvv(&self) -> f64 {
        self.partial(0, 2)
    }

    pub fn coeffs(&self) -> &[f64; N_COEFFS] {
        &self.coeffs
    }

    /// Drops information above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = *self;
        out.order = out.order.min(order as u8);
        out.clear_above_order();
        out
    }

    /// The jet of `∂f/∂u`; one order lower than `self`.
    pub fn derive_u(&self) -> Self {
        self.shift(1, 0)
    }

    /// The jet of `∂f/∂v`; one order lower than `self`.
    pub fn derive_v(&self) -> Self {
        self.shift(0, 1)
    }

    fn shift(&self, di: usize, dj: usize) -> Self {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let order = self.order as usize - 1;
        let mut coeffs = [0.0; N_COEFFS];
        for &(i, j) in MULTI_INDICES.iter() {
            if i + j <= order {
                coeffs[index(i, j)] = self.coeffs[index(i + di, j + dj)];
            }
        }
        Jet3 {
            coeffs,
            order: order as u8,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out
    }

    fn leibniz(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut coeffs = [0.0; N_COEFFS];
        for &(i, j) in MULTI_INDICES.iter() {
            if i + j > order as usize {
                continue;
            }
            let mut acc = 0.0;
            for k in 0..=i {
                for l in 0..=j {
                    acc += BINOM[i][k]
                        * BINOM[j][l]
                        * self.coeffs[index(k, l)]
                        * rhs.coeffs[index(i - k, j - l)];
                }
            }
            coeffs[index(i, j)] = acc;
        }
        Jet3 { coeffs, order }
    }

    /// Composes a univariate function with `self`, given the function's value
    /// and first three derivatives at `self.value()`.
    pub fn compose(&self, derivs: [f64; 4]) -> Self {
        let mut delta = *self;
        delta.coeffs[0] = 0.0;
        let mut out = Jet3::constant(derivs[0]);
        out.order = self.order;
        let mut power = delta;
        let mut factorial = 1.0;
        for (k, &d) in derivs.iter().enumerate().skip(1) {
            if k > self.order as usize {
                break;
            }
            factorial *= k as f64;
            out += power.scale(d / factorial);
            power = power.leibniz(&delta);
        }
        out
    }

    /// Reciprocal `1/f`, failing when `|f| < floor`.
    pub fn recip_with_floor(&self, floor: f64) -> Result<Self, JetError> {
        let x = self.value();
        if !(x.abs() >= floor) {
            return Err(JetError::Singular { value: x, floor });
        }
        let r = 1.0 / x;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        self.recip_with_floor(DEFAULT_DIV_FLOOR)
    }

    pub fn div_with_floor(&self, rhs: &Self, floor: f64) -> Result<Self, JetError> {
        Ok(self.leibniz(&rhs.recip_with_floor(floor)?))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, JetError> {
        self.div_with_floor(rhs, DEFAULT_DIV_FLOOR)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        elementary(Elementary::Sqrt, self)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        elementary(Elementary::PowInt(n), self)
    }

    /// Dot product of two 3-vectors of jets.
    pub fn dot3(a: &[Jet3; 3], b: &[Jet3; 3]) -> Jet3 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    /// Cross product of two 3-vectors of jets.
    pub fn cross3(a: &[Jet3; 3], b: &[Jet3; 3]) -> [Jet3; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
}

/// The two coordinate jets at `(u0, v0)`.
pub fn seed_vars(u0: f64, v0: f64) -> (Jet3, Jet3) {
    (Jet3::var_u(u0), Jet3::var_v(v0))
}

/// Applies `op` to two jets; division uses [`DEFAULT_DIV_FLOOR`].
pub fn combine(op: BinaryOp, lhs: &Jet3, rhs: &Jet3) -> Result<Jet3, JetError> {
    combine_with_floor(op, lhs, rhs, DEFAULT_DIV_FLOOR)
}

pub fn combine_with_floor(
    op: BinaryOp,
    lhs: &Jet3,
    rhs: &Jet3,
    floor: f64,
) -> Result<Jet3, JetError> {
    Ok(match op {
        BinaryOp::Add => *lhs + *rhs,
        BinaryOp::Sub => *lhs - *rhs,
        BinaryOp::Mul => *lhs * *rhs,
        BinaryOp::Div => lhs.div_with_floor(rhs, floor)?,
    })
}

pub fn elementary(func: Elementary, x: &Jet3) -> Result<Jet3, JetError> {
    let x0 = x.value();
    Ok(match func {
        Elementary::Sqrt => {
            if !(x0 > 0.0) {
                return Err(JetError::Domain {
                    op: "sqrt",
                    value: x0,
                });
            }
            let s = x0.sqrt();
            x.compose([
                s,
                0.5 / s,
                -0.25 / (s * x0),
                0.375 / (s * x0 * x0),
            ])
        }
        Elementary::Sin => x.sin(),
        Elementary::Cos => x.cos(),
        Elementary::Exp => x.exp(),
        Elementary::PowInt(n) => {
            if n < 0 && x0 == 0.0 {
                return Err(JetError::Singular {
                    value: x0,
                    floor: 0.0,
                });
            }
            let nf = n as f64;
            let pow = |k: i32| if n - k >= 0 || x0 != 0.0 { x0.powi(n - k) } else { 0.0 };
            x.compose([
                pow(0),
                nf * pow(1),
                nf * (nf - 1.0) * pow(2),
                nf * (nf - 1.0) * (nf - 2.0) * pow(3),
            ])
        }
    })
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Jet3 {
    fn add_assign(&mut self, rhs: Jet3) {
        self.order = self.order.min(rhs.order);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
        self.clear_above_order();
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for Jet3 {
    fn sub_assign(&mut self, rhs: Jet3) {
        self.order = self.order.min(rhs.order);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= b;
        }
        self.clear_above_order();
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        self.leibniz(&rhs)
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        self.scale(rhs)
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        rhs.scale(self)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: f64) -> Jet3 {
        let mut out = self;
        out.coeffs[0] += rhs;
        out
    }
}

impl Sub<f64> for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: f64) -> Jet3 {
        self + (-rhs)
    }
}

impl Add<Jet3> for f64 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        rhs + self
    }
}

impl Sub<Jet3> for f64 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        -rhs + self
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}
