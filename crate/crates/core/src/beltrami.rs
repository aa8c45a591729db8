//! The Beltrami–Laplace operator `Δ^I` of the first fundamental form.
//!
//! Sign convention: `Δ^I = −div∘grad`, so the round sphere of radius `r` has
//! positive eigenvalue `2/r²` on its coordinate functions. In coordinates
//!
//! ```text
//! Δ^I f = −(1/√g) [ ∂_u(√g (g^{uu} f_u + g^{uv} f_v)) + ∂_v(√g (g^{uv} f_u + g^{vv} f_v)) ]
//! ```
//!
//! The closed-form operators for the two quadric kinds are implemented
//! separately from explicit coefficient formulas and serve as an independent
//! route to the same numbers.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::jets::{seed_vars, Jet3, JetError};
use crate::surfaces::{LocalFrame, SurfaceError, SurfaceKind, SurfacePatch, PHI_MIN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeltramiError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("field carries order-{got} jets, operator needs order {needed}")]
    InsufficientOrder { needed: usize, got: usize },
    #[error("vector component index {0} is out of range")]
    InvalidComponent(usize),
    #[error("closed form does not apply: {0}")]
    NotApplicable(String),
}

type FieldFn = dyn Fn(Jet3, Jet3) -> Result<Jet3, JetError> + Send + Sync;

/// A scalar function of `(u, v)` supplied by the caller.
#[derive(Clone)]
pub struct UserField {
    name: String,
    func: Arc<FieldFn>,
}

impl UserField {
    pub fn new(
        name: impl Into<String>,
        func: impl Fn(Jet3, Jet3) -> Result<Jet3, JetError> + Send + Sync + 'static,
    ) -> Self {
        UserField {
            name: name.into(),
            func: Arc::new(func),
        }
    }
}

impl fmt::Debug for UserField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UserField({})", self.name)
    }
}

/// Scalar fields the operators can be applied to.
#[derive(Debug, Clone)]
pub enum ScalarField {
    /// Component `k` of the position vector.
    Position(usize),
    /// Component `k` of the Gauss map.
    Normal(usize),
    /// Mean curvature `H` (order 1 only, enough for gradients).
    MeanCurvature,
    User(UserField),
}

impl ScalarField {
    pub fn user(
        name: impl Into<String>,
        func: impl Fn(Jet3, Jet3) -> Result<Jet3, JetError> + Send + Sync + 'static,
    ) -> Self {
        ScalarField::User(UserField::new(name, func))
    }

    pub fn jet(&self, frame: &LocalFrame) -> Result<Jet3, BeltramiError> {
        match self {
            ScalarField::Position(k) => frame
                .position
                .get(*k)
                .copied()
                .ok_or(BeltramiError::InvalidComponent(*k)),
            ScalarField::Normal(k) => frame
                .normal
                .get(*k)
                .copied()
                .ok_or(BeltramiError::InvalidComponent(*k)),
            ScalarField::MeanCurvature => Ok(frame.mean),
            ScalarField::User(field) => {
                let (u, v) = seed_vars(frame.u, frame.v);
                Ok((field.func)(u, v)?)
            }
        }
    }
}

fn require_order(f: &Jet3, needed: usize) -> Result<(), BeltramiError> {
    if f.order() < needed {
        Err(BeltramiError::InsufficientOrder {
            needed,
            got: f.order(),
        })
    } else {
        Ok(())
    }
}

/// `Δ^I f` at the frame's point in divergence form.
pub fn laplace_at(frame: &LocalFrame, f: &Jet3) -> Result<f64, BeltramiError> {
    require_order(f, 2)?;
    let fu = f.derive_u();
    let fv = f.derive_v();
    let [guu, guv, gvv] = frame.metric.inverse;
    let sg = frame.sqrt_detg;
    let flux_u = sg * (guu * fu + guv * fv);
    let flux_v = sg * (guv * fu + gvv * fv);
    Ok(-(flux_u.du() + flux_v.dv()) / sg.value())
}

/// Surface gradient of `f` expressed in ambient coordinates.
pub fn grad_at(frame: &LocalFrame, f: &Jet3) -> Result<[f64; 3], BeltramiError> {
    require_order(f, 1)?;
    let [guu, guv, gvv] = frame.metric.inverse.map(|j| j.value());
    let (fu, fv) = (f.du(), f.dv());
    let cu = guu * fu + guv * fv;
    let cv = guv * fu + gvv * fv;
    let xu = frame.xu.map(|j| j.value());
    let xv = frame.xv.map(|j| j.value());
    Ok([
        cu * xu[0] + cv * xv[0],
        cu * xu[1] + cv * xv[1],
        cu * xu[2] + cv * xv[2],
    ])
}

pub fn laplace_scalar(
    surface: &SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64, BeltramiError> {
    let frame = surface.frame(u, v)?;
    laplace_at(&frame, &field.jet(&frame)?)
}

pub fn grad_surface(
    surface: &SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<[f64; 3], BeltramiError> {
    let frame = surface.frame(u, v)?;
    grad_at(&frame, &field.jet(&frame)?)
}

/// Componentwise `Δ^I` of the position vector.
pub fn laplace_position(frame: &LocalFrame) -> Result<[f64; 3], BeltramiError> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = laplace_at(frame, &frame.position[k])?;
    }
    Ok(out)
}

/// Componentwise `Δ^I` of the Gauss map.
pub fn laplace_normal(frame: &LocalFrame) -> Result<[f64; 3], BeltramiError> {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = laplace_at(frame, &frame.normal[k])?;
    }
    Ok(out)
}

fn field_on_kind(
    surface: SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<Jet3, BeltramiError> {
    let frame = surface.frame(u, v)?;
    let f = field.jet(&frame)?;
    require_order(&f, 2)?;
    Ok(f)
}

/// Kind-I operator from its explicit coefficients:
///
/// ```text
/// −(1/Φ)[(ω + b²v²)∂²_u − 2abuv ∂²_{uv} + (ω + a²u²)∂²_v] + (Ψ/Φ²)[au ∂_u + bv ∂_v]
/// ```
///
/// with `ω = c + au² + bv²`, `Φ = c + a(a+1)u² + b(b+1)v²` and
/// `Ψ = ac + bc + ab(a+1)u² + ab(b+1)v²`.
pub fn closed_form_q1(
    a: f64,
    b: f64,
    c: f64,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64, BeltramiError> {
    let f = field_on_kind(SurfacePatch::quadric1(a, b, c)?, field, u, v)?;
    let omega = c + a * u * u + b * v * v;
    let phi = c + a * (a + 1.0) * u * u + b * (b + 1.0) * v * v;
    if phi < PHI_MIN {
        return Err(BeltramiError::Surface(SurfaceError::OutOfDomain {
            u,
            v,
            reason: format!("Φ = {phi} below {PHI_MIN}"),
        }));
    }
    let psi = a * c + b * c + a * b * (a + 1.0) * u * u + a * b * (b + 1.0) * v * v;
    let second = (omega + b * b * v * v) * f.duu() - 2.0 * a * b * u * v * f.duv()
        + (omega + a * a * u * u) * f.dvv();
    let first = a * u * f.du() + b * v * f.dv();
    Ok(-second / phi + psi / (phi * phi) * first)
}

/// The kind-I operator specialised to `a = b = −1` (a sphere of radius `√c`):
///
/// ```text
/// (1/c)[(u² − c)∂²_u + 2uv ∂²_{uv} + (v² − c)∂²_v + 2u ∂_u + 2v ∂_v]
/// ```
pub fn closed_form_sphere(
    c: f64,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64, BeltramiError> {
    let f = field_on_kind(SurfacePatch::quadric1(-1.0, -1.0, c)?, field, u, v)?;
    Ok(((u * u - c) * f.duu()
        + 2.0 * u * v * f.duv()
        + (v * v - c) * f.dvv()
        + 2.0 * u * f.du()
        + 2.0 * v * f.dv())
        / c)
}

/// Kind-II operator from its explicit coefficients:
///
/// ```text
/// −(1/g)[Y ∂²_u + X ∂²_v − 2abuv ∂²_{uv}] + ((aY + bX)/g²)[au ∂_u + bv ∂_v]
/// ```
///
/// with `X = 1 + a²u²`, `Y = 1 + b²v²`, `g = 1 + a²u² + b²v²`.
pub fn closed_form_q2(
    a: f64,
    b: f64,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64, BeltramiError> {
    let f = field_on_kind(SurfacePatch::quadric2(a, b)?, field, u, v)?;
    let x = 1.0 + a * a * u * u;
    let y = 1.0 + b * b * v * v;
    let g = 1.0 + a * a * u * u + b * b * v * v;
    let second = y * f.duu() + x * f.dvv() - 2.0 * a * b * u * v * f.duv();
    let first = a * u * f.du() + b * v * f.dv();
    Ok(-second / g + (a * y + b * x) / (g * g) * first)
}

/// Closed-form operator matching `surface`'s kind, if it has one.
pub fn closed_form(
    surface: &SurfacePatch,
    field: &ScalarField,
    u: f64,
    v: f64,
) -> Result<f64, BeltramiError> {
    match surface.kind {
        SurfaceKind::Quadric1 { a, b, c } => {
            surface.check_domain(u, v)?;
            closed_form_q1(a, b, c, field, u, v)
        }
        SurfaceKind::Quadric2 { a, b } => {
            surface.check_domain(u, v)?;
            closed_form_q2(a, b, field, u, v)
        }
        _ => Err(BeltramiError::NotApplicable(format!(
            "{} has no closed-form operator",
            surface.kind.tag()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `|Δ^I x + 2H n|`
    pub res_x: f64,
    /// `|Δ^I n − grad^I 2H − (4H² − 2K) n|`
    pub res_n: f64,
    /// `|Δ^I x|`
    pub lap_x_norm: f64,
    /// `|Δ^I n|`
    pub lap_n_norm: f64,
}

impl IdentityResiduals {
    /// Residuals divided by `1 + |Δ^I x|` and `1 + |Δ^I n|`.
    pub fn scaled(&self) -> (f64, f64) {
        (
            self.res_x / (1.0 + self.lap_x_norm),
            self.res_n / (1.0 + self.lap_n_norm),
        )
    }
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn identity_residuals_at(frame: &LocalFrame) -> Result<IdentityResiduals, BeltramiError> {
    let lap_x = laplace_position(frame)?;
    let lap_n = laplace_normal(frame)?;
    let n = frame.normal.map(|j| j.value());
    let h = frame.mean.value();
    let k = frame.gauss.value();
    let grad_2h = grad_at(frame, &frame.mean.scale(2.0))?;
    let shape = 4.0 * h * h - 2.0 * k;
    let mut dx = [0.0; 3];
    let mut dn = [0.0; 3];
    for i in 0..3 {
        dx[i] = lap_x[i] + 2.0 * h * n[i];
        dn[i] = lap_n[i] - grad_2h[i] - shape * n[i];
    }
    Ok(IdentityResiduals {
        res_x: norm3(dx),
        res_n: norm3(dn),
        lap_x_norm: norm3(lap_x),
        lap_n_norm: norm3(lap_n),
    })
}

pub fn identity_residuals(
    surface: &SurfacePatch,
    u: f64,
    v: f64,
) -> Result<IdentityResiduals, BeltramiError> {
    identity_residuals_at(&surface.frame(u, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn constant_field_is_harmonic() {
        let one = ScalarField::user("one", |_, _| Ok(Jet3::constant(1.0)));
        for s in crate::surfaces::zoo() {
            let d = s.domain;
            let (u, v) = (0.5 * (d.u_min + d.u_max) + 0.1, 0.5 * (d.v_min + d.v_max) + 0.2);
            assert_eq!(laplace_scalar(&s, &one, u, v).unwrap(), 0.0);
            assert_eq!(grad_surface(&s, &one, u, v).unwrap(), [0.0; 3]);
        }
        assert_eq!(closed_form_q1(2.0, 1.0, 1.0, &one, 0.3, 0.2).unwrap(), 0.0);
        assert_eq!(closed_form_q2(2.0, 1.0, &one, 0.3, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn unit_sphere_eigenvalue_is_plus_two() {
        let s = SurfacePatch::quadric1(-1.0, -1.0, 1.0).unwrap();
        for &(u, v) in &[(0.0, 0.0), (0.3, -0.4), (-0.6, 0.2)] {
            for k in 0..3 {
                let lap = laplace_scalar(&s, &ScalarField::Position(k), u, v).unwrap();
                let x = s.evaluate(u, v).unwrap()[k].value();
                assert!((lap - 2.0 * x).abs() < 1e-12, "component {k}");
            }
        }
        let s = SurfacePatch::sphere(1.0).unwrap();
        let frame = s.frame(1.0, 0.3).unwrap();
        let lap = laplace_position(&frame).unwrap();
        for k in 0..3 {
            assert!((lap[k] - 2.0 * frame.position[k].value()).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_matches_closed_form_q1_point() {
        let s = SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap();
        let f = ScalarField::Normal(0);
        let generic = laplace_scalar(&s, &f, 0.3, -0.2).unwrap();
        let closed = closed_form_q1(2.0, 1.0, 1.0, &f, 0.3, -0.2).unwrap();
        assert!(rel(generic, closed) < 1e-10);
    }

    #[test]
    fn sphere_height_function() {
        // z = √ω is an eigenfunction with eigenvalue 2/c, so Δ(−√ω) = −2√ω/c.
        for c in [1.0, 2.5, 4.0] {
            let neg_root = ScalarField::user("-sqrt(omega)", move |u, v| {
                Ok(-(c - u * u - v * v).sqrt()?)
            });
            for &(u, v) in &[(0.1, 0.2), (-0.5, 0.3), (0.0, 0.0)] {
                let omega = c - u * u - v * v;
                let got = closed_form_q1(-1.0, -1.0, c, &neg_root, u, v).unwrap();
                assert!((got + 2.0 * omega.sqrt() / c).abs() < 1e-12);
                let reduced = closed_form_sphere(c, &neg_root, u, v).unwrap();
                assert!(rel(got, reduced) < 1e-13);
            }
        }
    }

    #[test]
    fn paraboloid_vertex_n3() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (a, b) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            let got = closed_form_q2(a, b, &ScalarField::Normal(2), 0.0, 0.0).unwrap();
            assert!(rel(got, a * a + b * b) < 1e-13);
        }
    }

    #[test]
    fn generic_matches_closed_form_q2_point() {
        let s = SurfacePatch::quadric2(1.0, 1.0).unwrap();
        let f = ScalarField::Normal(0);
        let generic = laplace_scalar(&s, &f, 0.5, 0.5).unwrap();
        let closed = closed_form_q2(1.0, 1.0, &f, 0.5, 0.5).unwrap();
        assert!(rel(generic, closed) < 1e-10);
    }

    #[test]
    fn sphere_mean_curvature_gradient_vanishes() {
        let s = SurfacePatch::sphere(2.0).unwrap();
        let g = grad_surface(&s, &ScalarField::MeanCurvature, 1.0, 0.4).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-14));
    }

    // grad^I(2H) against central differences of H pushed through the inverse metric.
    #[test]
    fn gradient_against_finite_differences() {
        let s = SurfacePatch::quadric2(1.0, 1.0).unwrap();
        let (u, v, h) = (0.4, 0.1, 1e-5);
        let two_h = |u: f64, v: f64| 2.0 * s.curvatures(u, v).unwrap().mean;
        let fu = (two_h(u + h, v) - two_h(u - h, v)) / (2.0 * h);
        let fv = (two_h(u, v + h) - two_h(u, v - h)) / (2.0 * h);
        let cd = s.curvatures(u, v).unwrap();
        let (guu, guv, gvv) = (cd.g / cd.detg, -cd.f / cd.detg, cd.e / cd.detg);
        let (a, b) = (1.0, 1.0);
        let xu = [1.0, 0.0, a * u];
        let xv = [0.0, 1.0, b * v];
        let cu = guu * fu + guv * fv;
        let cv = guv * fu + gvv * fv;
        let expected: Vec<f64> = (0..3).map(|k| cu * xu[k] + cv * xv[k]).collect();

        let frame = s.frame(u, v).unwrap();
        let got = grad_at(&frame, &frame.mean.scale(2.0)).unwrap();
        for k in 0..3 {
            assert!((got[k] - expected[k]).abs() < 1e-6);
        }
        let n = cd.normal;
        assert!((got[0] * n[0] + got[1] * n[1] + got[2] * n[2]).abs() < 1e-10);
    }

    #[test]
    fn mean_curvature_laplacian_needs_more_order() {
        let s = SurfacePatch::quadric2(1.0, 1.0).unwrap();
        assert!(matches!(
            laplace_scalar(&s, &ScalarField::MeanCurvature, 0.1, 0.1),
            Err(BeltramiError::InsufficientOrder { needed: 2, got: 1 })
        ));
        assert!(matches!(
            laplace_scalar(&s, &ScalarField::Normal(3), 0.1, 0.1),
            Err(BeltramiError::InvalidComponent(3))
        ));
    }

    #[test]
    fn identity_examples() {
        let r = identity_residuals(&SurfacePatch::plane(), 0.2, 0.3).unwrap();
        assert_eq!((r.res_x, r.res_n), (0.0, 0.0));

        let cat = SurfacePatch::catenoid(1.0).unwrap();
        for &(u, v) in &[(0.5, 0.3), (3.0, -1.1)] {
            let frame = cat.frame(u, v).unwrap();
            let r = identity_residuals_at(&frame).unwrap();
            assert!(r.res_x <= 1e-9);
            assert!(r.lap_x_norm <= 1e-9, "minimal: Δx = 0");
        }

        let s = SurfacePatch::quadric1(-1.0, -1.0, 4.0).unwrap();
        let frame = s.frame(0.7, -0.5).unwrap();
        let r = identity_residuals_at(&frame).unwrap();
        assert!(r.res_n <= 1e-9);
        let lap_n = laplace_normal(&frame).unwrap();
        for k in 0..3 {
            assert!((lap_n[k] - 0.5 * frame.normal[k].value()).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_dispatch() {
        let f = ScalarField::Normal(1);
        assert!(closed_form(&SurfacePatch::plane(), &f, 0.0, 0.0).is_err());
        let q = SurfacePatch::quadric1(-1.0, -1.0, 1.0).unwrap();
        assert!(closed_form(&q, &f, 1.0, 0.5).is_err());
    }
}
