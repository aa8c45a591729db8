//! The two quadric families over exact rational parameters, and the
//! Laplace–Beltrami operator applied to radical expressions on them.
//!
//! Kind I is `x = (u, v, √ω)` over the bases `[ω, Φ]`; kind II is
//! `x = (u, v, (a/2)u² + (b/2)v²)` over the single base `[g]`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::qpoly::QPoly;
use super::radical::{RadExpr, RadicalBasis};
use super::{is_positive, q, q_to_string, ExactError, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    N1,
    N2,
    N3,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::N1, Component::N2, Component::N3];

    pub fn index(self) -> usize {
        match self {
            Component::N1 => 0,
            Component::N2 => 1,
            Component::N3 => 2,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.index() + 1)
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n1" | "1" => Ok(Component::N1),
            "n2" | "2" => Ok(Component::N2),
            "n3" | "3" => Ok(Component::N3),
            other => Err(format!("unknown normal component {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadricParams {
    Kind1 { a: Q, b: Q, c: Q },
    Kind2 { a: Q, b: Q },
}

#[derive(Debug, Clone)]
pub struct ExactQuadric {
    params: QuadricParams,
    basis: Arc<RadicalBasis>,
}

fn quadratic(c0: Q, cu: Q, cv: Q) -> QPoly {
    QPoly::from_terms([((0, 0), c0), ((2, 0), cu), ((0, 2), cv)])
}

impl ExactQuadric {
    /// `z² − ax² − by² = c` with `ab ≠ 0`, `c > 0`.
    pub fn kind1(a: Q, b: Q, c: Q) -> Result<Self, ExactError> {
        if a.is_zero() || b.is_zero() || !is_positive(&c) {
            return Err(ExactError::InvalidParameters(format!(
                "kind 1 needs ab ≠ 0 and c > 0, got a={}, b={}, c={}",
                q_to_string(&a),
                q_to_string(&b),
                q_to_string(&c)
            )));
        }
        let omega = quadratic(c.clone(), a.clone(), b.clone());
        let phi = quadratic(
            c.clone(),
            &a * (&a + Q::one()),
            &b * (&b + Q::one()),
        );
        let basis = RadicalBasis::new(vec![("ω", omega), ("Φ", phi)]);
        Ok(ExactQuadric {
            params: QuadricParams::Kind1 { a, b, c },
            basis,
        })
    }

    /// `z = (a/2)x² + (b/2)y²` with `a, b > 0`.
    pub fn kind2(a: Q, b: Q) -> Result<Self, ExactError> {
        if !is_positive(&a) || !is_positive(&b) {
            return Err(ExactError::InvalidParameters(format!(
                "kind 2 needs a, b > 0, got a={}, b={}",
                q_to_string(&a),
                q_to_string(&b)
            )));
        }
        let g = quadratic(Q::one(), &a * &a, &b * &b);
        let basis = RadicalBasis::new(vec![("g", g)]);
        Ok(ExactQuadric {
            params: QuadricParams::Kind2 { a, b },
            basis,
        })
    }

    pub fn params(&self) -> &QuadricParams {
        &self.params
    }

    pub fn kind_number(&self) -> u8 {
        match self.params {
            QuadricParams::Kind1 { .. } => 1,
            QuadricParams::Kind2 { .. } => 2,
        }
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    fn ab(&self) -> (&Q, &Q) {
        match &self.params {
            QuadricParams::Kind1 { a, b, .. } | QuadricParams::Kind2 { a, b } => (a, b),
        }
    }

    /// `ω = c + au² + bv²` (kind I).
    pub fn omega(&self) -> Option<QPoly> {
        matches!(self.params, QuadricParams::Kind1 { .. }).then(|| self.basis.base(0).clone())
    }

    /// `Φ = c + a(a+1)u² + b(b+1)v²` (kind I).
    pub fn phi(&self) -> Option<QPoly> {
        matches!(self.params, QuadricParams::Kind1 { .. }).then(|| self.basis.base(1).clone())
    }

    /// `Ψ = ac + bc + ab(a+1)u² + ab(b+1)v²` (kind I).
    pub fn psi(&self) -> Option<QPoly> {
        let QuadricParams::Kind1 { a, b, c } = &self.params else {
            return None;
        };
        Some(quadratic(
            a * c + b * c,
            a * b * (a + Q::one()),
            a * b * (b + Q::one()),
        ))
    }

    /// `g = 1 + a²u² + b²v²` (kind II).
    pub fn g(&self) -> Option<QPoly> {
        matches!(self.params, QuadricParams::Kind2 { .. }).then(|| self.basis.base(0).clone())
    }

    /// `X = 1 + a²u²` (kind II).
    pub fn x_poly(&self) -> Option<QPoly> {
        let QuadricParams::Kind2 { a, .. } = &self.params else {
            return None;
        };
        Some(quadratic(Q::one(), a * a, Q::zero()))
    }

    /// `Y = 1 + b²v²` (kind II).
    pub fn y_poly(&self) -> Option<QPoly> {
        let QuadricParams::Kind2 { b, .. } = &self.params else {
            return None;
        };
        Some(quadratic(Q::one(), Q::zero(), b * b))
    }

    fn radical(&self, numerator: QPoly, half_powers: Vec<i32>) -> RadExpr {
        RadExpr::term(&self.basis, numerator, half_powers)
    }

    pub fn position(&self) -> [RadExpr; 3] {
        let p = |x: QPoly| RadExpr::poly(&self.basis, x);
        let third = match &self.params {
            QuadricParams::Kind1 { .. } => self.radical(QPoly::one(), vec![1, 0]),
            QuadricParams::Kind2 { a, b } => p(quadratic(Q::zero(), a * q(1, 2), b * q(1, 2))),
        };
        [p(QPoly::u()), p(QPoly::v()), third]
    }

    /// Unit normal `x_u × x_v / |x_u × x_v|`.
    pub fn normal(&self, component: Component) -> RadExpr {
        let (a, b) = self.ab();
        let root_inv = match self.params {
            QuadricParams::Kind1 { .. } => vec![0, -1],
            QuadricParams::Kind2 { .. } => vec![-1],
        };
        match component {
            Component::N1 => self.radical(QPoly::monomial(1, 0, -a.clone()), root_inv),
            Component::N2 => self.radical(QPoly::monomial(0, 1, -b.clone()), root_inv),
            Component::N3 => match self.params {
                QuadricParams::Kind1 { .. } => self.radical(QPoly::one(), vec![1, -1]),
                QuadricParams::Kind2 { .. } => self.radical(QPoly::one(), root_inv),
            },
        }
    }

    pub fn normals(&self) -> [RadExpr; 3] {
        Component::ALL.map(|c| self.normal(c))
    }

    /// The family's explicit second-order operator.
    ///
    /// Kind I: `−Φ⁻¹[(ω + b²v²)f_uu − 2abuv f_uv + (ω + a²u²)f_vv] + ΨΦ⁻²(au f_u + bv f_v)`.
    /// Kind II: `−g⁻¹[Y f_uu + X f_vv − 2abuv f_uv] + (aY + bX)g⁻²(au f_u + bv f_v)`.
    pub fn closed_form_laplacian(&self, f: &RadExpr) -> RadExpr {
        let (a, b) = self.ab();
        let fu = f.derive_u();
        let fv = f.derive_v();
        let fuu = fu.derive_u();
        let fuv = fu.derive_v();
        let fvv = fv.derive_v();
        let uv = QPoly::monomial(1, 1, -(a * b * q(2, 1)));
        let au = QPoly::monomial(1, 0, a.clone());
        let bv = QPoly::monomial(0, 1, b.clone());
        let first = fu.scale_poly(&au).add(&fv.scale_poly(&bv));
        let (c_uu, c_vv, inv1, drift) = match &self.params {
            QuadricParams::Kind1 { .. } => {
                let omega = self.basis.base(0);
                (
                    omega + &QPoly::monomial(0, 2, b * b),
                    omega + &QPoly::monomial(2, 0, a * a),
                    self.radical(QPoly::one(), vec![0, -2]),
                    self.radical(self.psi().expect("kind 1"), vec![0, -4]),
                )
            }
            QuadricParams::Kind2 { .. } => {
                let x = self.x_poly().expect("kind 2");
                let y = self.y_poly().expect("kind 2");
                let coeff = &y.scale(a) + &x.scale(b);
                (
                    y,
                    x,
                    self.radical(QPoly::one(), vec![-2]),
                    self.radical(coeff, vec![-4]),
                )
            }
        };
        let second = fuu
            .scale_poly(&c_uu)
            .add(&fuv.scale_poly(&uv))
            .add(&fvv.scale_poly(&c_vv));
        inv1.mul(&second).neg().add(&drift.mul(&first))
    }

    /// Coordinate divergence form built from the position alone:
    /// `−(1/√detg)[∂_u(√detg(g^{uu}f_u + g^{uv}f_v)) + ∂_v(√detg(g^{uv}f_u + g^{vv}f_v))]`.
    pub fn generic_laplacian(&self, f: &RadExpr) -> Result<RadExpr, ExactError> {
        let x = self.position();
        let xu: Vec<RadExpr> = x.iter().map(RadExpr::derive_u).collect();
        let xv: Vec<RadExpr> = x.iter().map(RadExpr::derive_v).collect();
        let dot = |p: &[RadExpr], r: &[RadExpr]| {
            p.iter()
                .zip(r)
                .fold(RadExpr::zero(&self.basis), |acc, (s, t)| acc.add(&s.mul(t)))
        };
        let e = dot(&xu, &xu);
        let ff = dot(&xu, &xv);
        let g = dot(&xv, &xv);
        let detg = e.mul(&g).sub(&ff.mul(&ff)).reduced();
        let fail = |what: &str| ExactError::NotRepresentable(format!("{what} of detg = {detg}"));
        let sqrt_detg = detg.try_sqrt().ok_or_else(|| fail("square root"))?;
        let inv_detg = detg.try_recip().ok_or_else(|| fail("reciprocal"))?;
        let inv_sqrt = sqrt_detg.try_recip().ok_or_else(|| fail("reciprocal square root"))?;
        let guu = g.mul(&inv_detg);
        let guv = ff.mul(&inv_detg).neg();
        let gvv = e.mul(&inv_detg);
        let fu = f.derive_u();
        let fv = f.derive_v();
        let flux_u = sqrt_detg.mul(&guu.mul(&fu).add(&guv.mul(&fv)));
        let flux_v = sqrt_detg.mul(&guv.mul(&fu).add(&gvv.mul(&fv)));
        Ok(inv_sqrt
            .mul(&flux_u.derive_u().add(&flux_v.derive_v()))
            .neg())
    }

    /// `Δ n_i` through the closed form.
    pub fn laplacian_normal(&self, component: Component) -> RadExpr {
        self.closed_form_laplacian(&self.normal(component))
    }

    /// For `n1` (resp. `n2`): the polynomial `B` with
    /// `Δ n1 = −au·B / Φ^{7/2}` on kind I, `−au·B / g^{7/2}` on kind II
    /// (resp. `−bv·B`).
    pub fn bracket(&self, component: Component) -> Result<QPoly, ExactError> {
        let (a, b) = self.ab();
        let factor = match component {
            Component::N1 => QPoly::monomial(1, 0, -a.clone()),
            Component::N2 => QPoly::monomial(0, 1, -b.clone()),
            Component::N3 => {
                return Err(ExactError::NotRepresentable(
                    "no bracket form for n3".to_string(),
                ))
            }
        };
        let target = match self.params {
            QuadricParams::Kind1 { .. } => vec![0, -7],
            QuadricParams::Kind2 { .. } => vec![-7],
        };
        let lap = self.laplacian_normal(component);
        if lap.is_zero() {
            return Ok(QPoly::zero());
        }
        let not_single = || {
            ExactError::NotRepresentable(format!(
                "Δ{component} is not a single term over {target:?}: {lap}"
            ))
        };
        let term = lap.single_term().ok_or_else(not_single)?;
        let numerator = term
            .numerator_at(&self.basis, &target)
            .ok_or_else(not_single)?;
        numerator.div_exact(&factor).ok_or_else(not_single)
    }
}

/// `Δ n_i` on `z² − au² − bv² = c`.
pub fn symbolic_laplacian_q1(component: Component, a: Q, b: Q, c: Q) -> Result<RadExpr, ExactError> {
    Ok(ExactQuadric::kind1(a, b, c)?.laplacian_normal(component))
}

/// `Δ n_i` on `z = (a/2)u² + (b/2)v²`.
pub fn symbolic_laplacian_q2(component: Component, a: Q, b: Q) -> Result<RadExpr, ExactError> {
    Ok(ExactQuadric::kind2(a, b)?.laplacian_normal(component))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beltrami::{closed_form_q1, closed_form_q2, laplace_normal};
    use crate::exactpoly::q_to_f64;
    use crate::surfaces::SurfacePatch;

    fn k1(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> ExactQuadric {
        ExactQuadric::kind1(q(a.0, a.1), q(b.0, b.1), q(c.0, c.1)).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ExactQuadric::kind1(q(0, 1), q(1, 1), q(1, 1)).is_err());
        assert!(ExactQuadric::kind1(q(1, 1), q(1, 1), q(0, 1)).is_err());
        assert!(ExactQuadric::kind2(q(-1, 1), q(1, 1)).is_err());
    }

    #[test]
    fn sphere_eigen_relations() {
        let s1 = k1((-1, 1), (-1, 1), (1, 1));
        let lap = s1.laplacian_normal(Component::N1);
        let expected = s1.normal(Component::N1).scale_poly(&QPoly::constant(q(2, 1)));
        assert!(lap.sub(&expected).is_zero(), "{lap}");
        let single = lap.single_term().unwrap();
        assert_eq!(single.numerator, QPoly::monomial(1, 0, q(2, 1)));

        let s4 = k1((-1, 1), (-1, 1), (4, 1));
        let lap3 = s4.laplacian_normal(Component::N3);
        let expected3 = s4.normal(Component::N3).scale_poly(&QPoly::constant(q(1, 2)));
        assert!(lap3.sub(&expected3).is_zero(), "{lap3}");
    }

    #[test]
    fn sphere_with_irrational_radius() {
        let s = k1((-1, 1), (-1, 1), (2, 1));
        for c in Component::ALL {
            let lap = s.laplacian_normal(c);
            assert!(lap.sub(&s.normal(c)).is_zero(), "{c}: {lap}");
        }
    }

    #[test]
    fn kind1_quartic_leading_coefficient() {
        let s = k1((2, 1), (1, 1), (1, 1));
        let lap = s.laplacian_normal(Component::N1);
        assert_eq!(lap.bucket_count(), 1);
        assert_eq!(lap.single_term().unwrap().parity(), vec![0, 1]);
        let bracket = s.bracket(Component::N1).unwrap();
        assert_eq!(bracket.coeff(4, 0), q(72, 1));
    }

    #[test]
    fn kind2_bracket_at_origin() {
        let s = ExactQuadric::kind2(q(1, 1), q(1, 1)).unwrap();
        let bracket = s.bracket(Component::N1).unwrap();
        assert_eq!(bracket.coeff(0, 0), q(6, 1));
        let s = ExactQuadric::kind2(q(2, 1), q(3, 1)).unwrap();
        // 4a² + ab + b²
        assert_eq!(s.bracket(Component::N1).unwrap().coeff(0, 0), q(16 + 6 + 9, 1));
    }

    #[test]
    fn kind2_n1_is_one_odd_bucket() {
        let s = ExactQuadric::kind2(q(1, 1), q(2, 1)).unwrap();
        let lap = s.laplacian_normal(Component::N1);
        let term = lap.single_term().expect("one bucket");
        assert_eq!(term.parity(), vec![1]);
    }

    #[test]
    fn constants_are_harmonic() {
        for s in [
            k1((2, 1), (1, 1), (1, 1)),
            ExactQuadric::kind2(q(1, 1), q(1, 1)).unwrap(),
        ] {
            let one = RadExpr::constant(s.basis(), q(1, 1));
            assert!(s.closed_form_laplacian(&one).is_zero());
            assert!(s.generic_laplacian(&one).unwrap().is_zero());
        }
    }

    #[test]
    fn generic_equals_closed_form() {
        let surfaces = [
            k1((2, 1), (1, 1), (1, 1)),
            k1((-1, 2), (-1, 1), (3, 1)),
            k1((-1, 1), (-1, 1), (4, 1)),
            k1((1, 1), (-2, 1), (5, 2)),
            ExactQuadric::kind2(q(1, 1), q(1, 1)).unwrap(),
            ExactQuadric::kind2(q(2, 1), q(3, 1)).unwrap(),
        ];
        for s in &surfaces {
            let mut fields: Vec<RadExpr> = s.normals().to_vec();
            fields.extend(s.position());
            for f in &fields {
                let closed = s.closed_form_laplacian(f);
                let generic = s.generic_laplacian(f).unwrap();
                assert!(closed.sub(&generic).is_zero(), "{f}: {closed} vs {generic}");
            }
        }
    }

    #[test]
    fn matches_floating_operator() {
        let s = k1((2, 1), (1, 1), (1, 1));
        let patch = SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap();
        for &(u, v) in &[(0.3, -0.2), (-1.1, 0.7), (0.05, 1.4)] {
            let frame = patch.frame(u, v).unwrap();
            let numeric = laplace_normal(&frame).unwrap();
            for c in Component::ALL {
                let exact = s.laplacian_normal(c).eval_f64(u, v);
                let closed = closed_form_q1(
                    2.0,
                    1.0,
                    1.0,
                    &crate::beltrami::ScalarField::Normal(c.index()),
                    u,
                    v,
                )
                .unwrap();
                assert!((exact - numeric[c.index()]).abs() < 1e-9 * (1.0 + exact.abs()));
                assert!((exact - closed).abs() < 1e-9 * (1.0 + exact.abs()));
            }
        }
        let s = ExactQuadric::kind2(q(1, 2), q(3, 2)).unwrap();
        for &(u, v) in &[(0.3, -0.2), (-1.1, 0.7)] {
            for c in Component::ALL {
                let exact = s.laplacian_normal(c).eval_rational_point(
                    &crate::exactpoly::parse_rational(&u.to_string()).unwrap(),
                    &crate::exactpoly::parse_rational(&v.to_string()).unwrap(),
                );
                let closed = closed_form_q2(
                    0.5,
                    1.5,
                    &crate::beltrami::ScalarField::Normal(c.index()),
                    u,
                    v,
                )
                .unwrap();
                assert!((exact - closed).abs() < 1e-9 * (1.0 + exact.abs()));
            }
        }
    }

    #[test]
    fn auxiliary_polynomials() {
        let s = k1((2, 1), (1, 1), (1, 1));
        let phi3 = s.phi().unwrap().pow(3);
        assert_eq!(phi3.coeff(6, 0), q(216, 1));
        assert_eq!(s.omega().unwrap().derive_u(), QPoly::monomial(1, 0, q(4, 1)));
        assert!(s.g().is_none());
        let psi = s.psi().unwrap();
        assert_eq!(q_to_f64(&psi.coeff(0, 0)), 3.0);
    }
}
