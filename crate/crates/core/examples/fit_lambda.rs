//! Least-squares search for a constant Λ with Δn = Λn.
//!
//! ```bash
//! cargo run --example fit_lambda
//! ```

use gaussmap::finitetype::{fit_lambda, sample_points, Tolerances, DEFAULT_SEED};
use gaussmap::surfaces::SurfacePatch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let surfaces = [
        SurfacePatch::quadric1(-1.0, -1.0, 4.0)?,
        SurfacePatch::plane(),
        SurfacePatch::circular_cylinder(2.0)?,
        SurfacePatch::quadric2(1.0, 1.0)?,
        SurfacePatch::quadric1(2.0, 1.0, 1.0)?,
        SurfacePatch::helicoid(1.0)?,
    ];
    let tol = Tolerances::default();
    for s in &surfaces {
        let points = sample_points(s, 100, DEFAULT_SEED)?;
        let fit = fit_lambda(s, &points, &tol)?;
        println!(
            "{:<26} {:<13} rank {}  residual {:.3e}  {}",
            s.name, fit.verdict, fit.design_rank, fit.residual_rms, fit.note
        );
        if let Some(sub) = &fit.subspace {
            println!("{:<26} subspace action {:?}", "", sub.isotropic_scale);
        }
    }
    Ok(())
}
