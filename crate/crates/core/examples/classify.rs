//! Parallel sweep of both quadric families.
//!
//! ```bash
//! cargo run --release --example classify
//! ```

use gaussmap::finitetype::{classify_family, Family, ParameterGrid, Tolerances, DEFAULT_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let kind1 = ParameterGrid {
        a: vec![-1.5, -1.0, -0.5, 1.0],
        b: vec![-1.5, -1.0, -0.5, 1.0],
        c: vec![1.0, 4.0],
    };
    let kind2 = ParameterGrid {
        a: vec![0.5, 1.0, 2.0],
        b: vec![0.5, 1.0, 2.0],
        c: vec![],
    };
    for (family, grid) in [(Family::Quadric1, kind1), (Family::Quadric2, kind2)] {
        let report = classify_family(family, &grid, 60, DEFAULT_SEED, &tol)?;
        println!("{family}: {} of {} cells satisfy", report.flagged_count, report.cells.len());
        for cell in report.cells.iter().filter(|c| c.flagged) {
            let fit = cell.fit.as_ref().expect("flagged cells have fits");
            println!(
                "  a={} b={} c={:?}  λ11={:.12}  residual {:.1e}",
                cell.a, cell.b, cell.c, fit.lambda[0][0], fit.residual_rms
            );
        }
    }
    Ok(())
}
