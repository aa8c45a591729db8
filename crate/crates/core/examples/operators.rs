//! Three routes to the same Laplacian on the quadrics: generic divergence
//! form on jets, the explicit closed forms, and exact symbolic expressions.
//!
//! ```bash
//! cargo run --example operators
//! ```

use gaussmap::beltrami::{closed_form_q1, closed_form_sphere, laplace_scalar, ScalarField};
use gaussmap::exactpoly::{q, Component, ExactQuadric};
use gaussmap::surfaces::SurfacePatch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let surface = SurfacePatch::quadric1(2.0, 1.0, 1.0)?;
    let exact = ExactQuadric::kind1(q(2, 1), q(1, 1), q(1, 1))?;
    let (u, v) = (0.375, -0.25);
    for c in Component::ALL {
        let field = ScalarField::Normal(c.index());
        let generic = laplace_scalar(&surface, &field, u, v)?;
        let closed = closed_form_q1(2.0, 1.0, 1.0, &field, u, v)?;
        let symbolic = exact.laplacian_normal(c).eval_rational_point(&q(3, 8), &q(-1, 4));
        println!("Δ{c}: generic {generic:+.15}  closed {closed:+.15}  exact {symbolic:+.15}");
    }

    println!("\nΔn1 on z² − 2x² − y² = 1:\n  {}", exact.laplacian_normal(Component::N1));

    let sphere = SurfacePatch::quadric1(-1.0, -1.0, 4.0)?;
    let f = ScalarField::Normal(2);
    println!(
        "\nsphere c = 4, Δn3 at (0.5, 0.3): generic {:+.15}, reduced form {:+.15}",
        laplace_scalar(&sphere, &f, 0.5, 0.3)?,
        closed_form_sphere(4.0, &f, 0.5, 0.3)?
    );
    Ok(())
}
