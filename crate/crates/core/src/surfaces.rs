//! Parametric surfaces, their fundamental forms and curvatures.
//!
//! Every surface is a map `(u, v) -> R³` evaluated with [`Jet3`] arithmetic so
//! that the position carries partials to order three. The unit normal is
//! always oriented as `x_u × x_v / |x_u × x_v|`; second-form coefficients use
//! that normal, so the signs of `H` and of the principal curvatures follow
//! from it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::jets::{seed_vars, Jet3, JetError};

/// Lower bound on `ω = c + au² + bv²` for kind-I quadric samples.
pub const OMEGA_MIN: f64 = 0.05;
/// Lower bound on `Φ = c + a(a+1)u² + b(b+1)v²` for kind-I quadric samples.
pub const PHI_MIN: f64 = 0.05;
/// Smallest accepted determinant of the first fundamental form.
pub const DETG_FLOOR: f64 = 1e-12;
/// Distance kept from the seams of angular charts.
pub const SEAM_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("invalid surface parameters: {0}")]
    InvalidParameters(String),
    #[error("point ({u}, {v}) is outside the admissible domain: {reason}")]
    OutOfDomain { u: f64, v: f64, reason: String },
    #[error("degenerate metric at ({u}, {v}): det g = {detg:e}")]
    DegenerateMetric { u: f64, v: f64, detg: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// One monomial `coeff · u^i · v^j` of a graph surface height function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphTerm {
    pub i: u32,
    pub j: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// `z² − a x² − b y² = c`, charted as `(u, v, √(c + au² + bv²))`.
    Quadric1 { a: f64, b: f64, c: f64 },
    /// `z = (a/2) x² + (b/2) y²`.
    Quadric2 { a: f64, b: f64 },
    Plane,
    CircularCylinder { radius: f64 },
    /// Longitude/latitude chart of a round sphere.
    Sphere { radius: f64 },
    Torus { major: f64, minor: f64 },
    Catenoid { waist: f64 },
    Helicoid { pitch: f64 },
    /// `z = Σ coeff · u^i v^j`.
    Graph { terms: Vec<GraphTerm> },
}

impl SurfaceKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SurfaceKind::Quadric1 { .. } => "quadric1",
            SurfaceKind::Quadric2 { .. } => "quadric2",
            SurfaceKind::Plane => "plane",
            SurfaceKind::CircularCylinder { .. } => "circular_cylinder",
            SurfaceKind::Sphere { .. } => "sphere",
            SurfaceKind::Torus { .. } => "torus",
            SurfaceKind::Catenoid { .. } => "catenoid",
            SurfaceKind::Helicoid { .. } => "helicoid",
            SurfaceKind::Graph { .. } => "graph",
        }
    }
}

/// Closed rectangle of admissible parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Domain {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self, SurfaceError> {
        let finite = [u_min, u_max, v_min, v_max].iter().all(|x| x.is_finite());
        if !finite || u_min >= u_max || v_min >= v_max {
            return Err(SurfaceError::InvalidParameters(format!(
                "empty or non-finite domain [{u_min}, {u_max}] x [{v_min}, {v_max}]"
            )));
        }
        Ok(Domain {
            u_min,
            u_max,
            v_min,
            v_max,
        })
    }

    fn square(half: f64) -> Self {
        Domain {
            u_min: -half,
            u_max: half,
            v_min: -half,
            v_max: half,
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

const ANGLE_MIN: f64 = SEAM_MARGIN;
const ANGLE_MAX: f64 = 2.0 * PI - SEAM_MARGIN;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfacePatch {
    pub name: String,
    #[serde(flatten)]
    pub kind: SurfaceKind,
    pub domain: Domain,
}

impl fmt::Display for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn positive(name: &str, x: f64) -> Result<(), SurfaceError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(SurfaceError::InvalidParameters(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

impl SurfacePatch {
    /// Validates the parameters and attaches the default domain.
    pub fn new(name: impl Into<String>, kind: SurfaceKind) -> Result<Self, SurfaceError> {
        let domain = match &kind {
            SurfaceKind::Quadric1 { a, b, c } => {
                if !(a.is_finite() && b.is_finite() && a * b != 0.0) {
                    return Err(SurfaceError::InvalidParameters(format!(
                        "quadric1 requires a·b ≠ 0, got a = {a}, b = {b}"
                    )));
                }
                positive("quadric1 c", *c)?;
                Domain::square(2.0)
            }
            SurfaceKind::Quadric2 { a, b } => {
                positive("quadric2 a", *a)?;
                positive("quadric2 b", *b)?;
                Domain::square(2.0)
            }
            SurfaceKind::Plane => Domain::square(2.0),
            SurfaceKind::CircularCylinder { radius } => {
                positive("cylinder radius", *radius)?;
                Domain {
                    u_min: ANGLE_MIN,
                    u_max: ANGLE_MAX,
                    v_min: -2.0,
                    v_max: 2.0,
                }
            }
            SurfaceKind::Sphere { radius } => {
                positive("sphere radius", *radius)?;
                Domain {
                    u_min: ANGLE_MIN,
                    u_max: ANGLE_MAX,
                    v_min: -FRAC_PI_2 + SEAM_MARGIN,
                    v_max: FRAC_PI_2 - SEAM_MARGIN,
                }
            }
            SurfaceKind::Torus { major, minor } => {
                positive("torus minor radius", *minor)?;
                if !(major.is_finite() && major > minor) {
                    return Err(SurfaceError::InvalidParameters(format!(
                        "torus needs major > minor, got {major} <= {minor}"
                    )));
                }
                Domain {
                    u_min: ANGLE_MIN,
                    u_max: ANGLE_MAX,
                    v_min: ANGLE_MIN,
                    v_max: ANGLE_MAX,
                }
            }
            SurfaceKind::Catenoid { waist } => {
                positive("catenoid waist", *waist)?;
                Domain {
                    u_min: ANGLE_MIN,
                    u_max: ANGLE_MAX,
                    v_min: -1.5,
                    v_max: 1.5,
                }
            }
            SurfaceKind::Helicoid { pitch } => {
                if !(pitch.is_finite() && *pitch != 0.0) {
                    return Err(SurfaceError::InvalidParameters(format!(
                        "helicoid pitch must be nonzero, got {pitch}"
                    )));
                }
                Domain {
                    u_min: ANGLE_MIN,
                    u_max: ANGLE_MAX,
                    v_min: -2.0,
                    v_max: 2.0,
                }
            }
            SurfaceKind::Graph { terms } => {
                if terms.iter().any(|t| !t.coeff.is_finite()) {
                    return Err(SurfaceError::InvalidParameters(
                        "graph coefficients must be finite".into(),
                    ));
                }
                Domain::square(2.0)
            }
        };
        Ok(SurfacePatch {
            name: name.into(),
            kind,
            domain,
        })
    }

    pub fn quadric1(a: f64, b: f64, c: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("quadric1(a={a},b={b},c={c})"),
            SurfaceKind::Quadric1 { a, b, c },
        )
    }

    pub fn quadric2(a: f64, b: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("quadric2(a={a},b={b})"),
            SurfaceKind::Quadric2 { a, b },
        )
    }

    pub fn plane() -> Self {
        Self::new("plane", SurfaceKind::Plane).expect("plane has no parameters")
    }

    pub fn circular_cylinder(radius: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("cylinder(r={radius})"),
            SurfaceKind::CircularCylinder { radius },
        )
    }

    pub fn sphere(radius: f64) -> Result<Self, SurfaceError> {
        Self::new(format!("sphere(r={radius})"), SurfaceKind::Sphere { radius })
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("torus(R={major},r={minor})"),
            SurfaceKind::Torus { major, minor },
        )
    }

    pub fn catenoid(waist: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("catenoid(c={waist})"),
            SurfaceKind::Catenoid { waist },
        )
    }

    pub fn helicoid(pitch: f64) -> Result<Self, SurfaceError> {
        Self::new(
            format!("helicoid(p={pitch})"),
            SurfaceKind::Helicoid { pitch },
        )
    }

    pub fn graph(terms: Vec<GraphTerm>) -> Result<Self, SurfaceError> {
        Self::new("graph", SurfaceKind::Graph { terms })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces the rectangle. Parameters of angular charts are not clipped,
    /// so a caller may deliberately include a seam.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Checks the rectangle and, for kind-I quadrics, the `ω`/`Φ` floors.
    pub fn check_domain(&self, u: f64, v: f64) -> Result<(), SurfaceError> {
        if !self.domain.contains(u, v) {
            return Err(SurfaceError::OutOfDomain {
                u,
                v,
                reason: "outside the parameter rectangle".into(),
            });
        }
        if let SurfaceKind::Quadric1 { a, b, c } = self.kind {
            let omega = c + a * u * u + b * v * v;
            if omega < OMEGA_MIN {
                return Err(SurfaceError::OutOfDomain {
                    u,
                    v,
                    reason: format!("ω = {omega} below {OMEGA_MIN}"),
                });
            }
            let phi = c + a * (a + 1.0) * u * u + b * (b + 1.0) * v * v;
            if phi < PHI_MIN {
                return Err(SurfaceError::OutOfDomain {
                    u,
                    v,
                    reason: format!("Φ = {phi} below {PHI_MIN}"),
                });
            }
        }
        Ok(())
    }

    /// Position `x(u, v)` with partials to order three.
    pub fn evaluate(&self, u0: f64, v0: f64) -> Result<[Jet3; 3], SurfaceError> {
        self.check_domain(u0, v0)?;
        Ok(self.position_unchecked(u0, v0)?)
    }

    pub(crate) fn position_unchecked(&self, u0: f64, v0: f64) -> Result<[Jet3; 3], JetError> {
        let (u, v) = seed_vars(u0, v0);
        Ok(match &self.kind {
            SurfaceKind::Quadric1 { a, b, c } => {
                let omega = u * u * *a + v * v * *b + *c;
                [u, v, omega.sqrt()?]
            }
            SurfaceKind::Quadric2 { a, b } => [u, v, u * u * (a / 2.0) + v * v * (b / 2.0)],
            SurfaceKind::Plane => [u, v, Jet3::constant(0.0)],
            SurfaceKind::CircularCylinder { radius } => [u.cos() * *radius, u.sin() * *radius, v],
            SurfaceKind::Sphere { radius } => {
                let rc = v.cos() * *radius;
                [rc * u.cos(), rc * u.sin(), v.sin() * *radius]
            }
            SurfaceKind::Torus { major, minor } => {
                let ring = v.cos() * *minor + *major;
                [ring * u.cos(), ring * u.sin(), v.sin() * *minor]
            }
            SurfaceKind::Catenoid { waist } => {
                let (ep, em) = (v.exp(), (-v).exp());
                let cosh = (ep + em) * 0.5;
                [cosh * u.cos() * *waist, cosh * u.sin() * *waist, v * *waist]
            }
            SurfaceKind::Helicoid { pitch } => [v * u.cos(), v * u.sin(), u * *pitch],
            SurfaceKind::Graph { terms } => {
                let mut z = Jet3::constant(0.0);
                for t in terms {
                    z += u.powi(t.i as i32)? * v.powi(t.j as i32)? * t.coeff;
                }
                [u, v, z]
            }
        })
    }

    /// All local differential-geometric quantities at `(u, v)`.
    pub fn frame(&self, u: f64, v: f64) -> Result<LocalFrame, SurfaceError> {
        let position = self.evaluate(u, v)?;
        LocalFrame::from_position(position, u, v)
    }

    pub fn metric(&self, u: f64, v: f64) -> Result<Metric, SurfaceError> {
        Ok(self.frame(u, v)?.metric)
    }

    /// Unit normal `x_u × x_v / √det g` with partials to order two.
    pub fn gauss_map(&self, u: f64, v: f64) -> Result<[Jet3; 3], SurfaceError> {
        Ok(self.frame(u, v)?.normal)
    }

    pub fn curvatures(&self, u: f64, v: f64) -> Result<CurvatureData, SurfaceError> {
        Ok(self.frame(u, v)?.curvature_data())
    }
}

/// First fundamental form and its inverse, carried as order-2 jets.
#[derive(Debug, Clone, Copy)]
pub struct Metric {
    pub e: Jet3,
    pub f: Jet3,
    pub g: Jet3,
    pub detg: Jet3,
    /// `(g^{uu}, g^{uv}, g^{vv})`.
    pub inverse: [Jet3; 3],
}

/// Everything needed to apply first- and second-order surface operators.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub u: f64,
    pub v: f64,
    pub position: [Jet3; 3],
    pub xu: [Jet3; 3],
    pub xv: [Jet3; 3],
    pub metric: Metric,
    pub sqrt_detg: Jet3,
    /// Order 2.
    pub normal: [Jet3; 3],
    /// Second fundamental form `L, M, N`, order 1.
    pub second: [Jet3; 3],
    /// Mean curvature, order 1.
    pub mean: Jet3,
    /// Gauss curvature, order 1.
    pub gauss: Jet3,
}

impl LocalFrame {
    pub fn from_position(position: [Jet3; 3], u: f64, v: f64) -> Result<Self, SurfaceError> {
        let xu = position.map(|c| c.derive_u());
        let xv = position.map(|c| c.derive_v());
        let e = Jet3::dot3(&xu, &xu);
        let f = Jet3::dot3(&xu, &xv);
        let g = Jet3::dot3(&xv, &xv);
        let detg = e * g - f * f;
        if !(detg.value() > DETG_FLOOR) {
            return Err(SurfaceError::DegenerateMetric {
                u,
                v,
                detg: detg.value(),
            });
        }
        let inv_det = detg.recip()?;
        let inverse = [g * inv_det, -(f * inv_det), e * inv_det];
        let sqrt_detg = detg.sqrt()?;
        let inv_sqrt = sqrt_detg.recip()?;
        let normal = Jet3::cross3(&xu, &xv).map(|c| c * inv_sqrt);

        let xuu = xu.map(|c| c.derive_u());
        let xuv = xu.map(|c| c.derive_v());
        let xvv = xv.map(|c| c.derive_v());
        let l = Jet3::dot3(&xuu, &normal);
        let m = Jet3::dot3(&xuv, &normal);
        let n = Jet3::dot3(&xvv, &normal);
        let mean = (e * n - f * m * 2.0 + g * l) * inv_det * 0.5;
        let gauss = (l * n - m * m) * inv_det;

        Ok(LocalFrame {
            u,
            v,
            position,
            xu,
            xv,
            metric: Metric {
                e,
                f,
                g,
                detg,
                inverse,
            },
            sqrt_detg,
            normal,
            second: [l, m, n],
            mean,
            gauss,
        })
    }

    pub fn curvature_data(&self) -> CurvatureData {
        let h = self.mean.value();
        let k = self.gauss.value();
        let disc = (h * h - k).max(0.0).sqrt();
        CurvatureData {
            e: self.metric.e.value(),
            f: self.metric.f.value(),
            g: self.metric.g.value(),
            detg: self.metric.detg.value(),
            l: self.second[0].value(),
            m: self.second[1].value(),
            n: self.second[2].value(),
            mean: h,
            gauss: k,
            kappa1: h + disc,
            kappa2: h - disc,
            normal: self.normal.map(|c| c.value()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureData {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub detg: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    /// Mean curvature `H`.
    pub mean: f64,
    /// Gauss curvature `K`.
    pub gauss: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub normal: [f64; 3],
}

/// The reference surfaces used by the identity suite.
pub fn zoo() -> Vec<SurfacePatch> {
    vec![
        SurfacePatch::plane(),
        SurfacePatch::circular_cylinder(2.0).unwrap(),
        SurfacePatch::sphere(2.0).unwrap(),
        SurfacePatch::torus(3.0, 1.0).unwrap(),
        SurfacePatch::catenoid(1.0).unwrap(),
        SurfacePatch::helicoid(1.0).unwrap(),
        SurfacePatch::quadric1(2.0, 1.0, 1.0).unwrap(),
        SurfacePatch::quadric2(1.0, 1.0).unwrap(),
    ]
}

/// Looks up a zoo surface by its short name (`plane`, `cylinder`, `sphere`,
/// `torus`, `catenoid`, `helicoid`, `quadric1`, `quadric2`).
pub fn zoo_surface(name: &str) -> Option<SurfacePatch> {
    let index = match name {
        "plane" => 0,
        "cylinder" | "circular_cylinder" => 1,
        "sphere" => 2,
        "torus" => 3,
        "catenoid" => 4,
        "helicoid" => 5,
        "quadric1" => 6,
        "quadric2" => 7,
        _ => return None,
    };
    zoo().into_iter().nth(index).map(|s| s.with_name(name))
}
