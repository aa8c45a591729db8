//! Fundamental forms, Gauss map and curvatures across the surface zoo.
//!
//! ```bash
//! cargo run --example curvatures
//! ```

use gaussmap::surfaces::zoo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<24} {:>12} {:>12} {:>12} {:>12}", "surface", "H", "K", "κ1", "κ2");
    for s in zoo() {
        let d = s.domain;
        let (u, v) = (
            d.u_min + 0.37 * (d.u_max - d.u_min),
            d.v_min + 0.61 * (d.v_max - d.v_min),
        );
        let c = s.curvatures(u, v)?;
        println!(
            "{:<24} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            s.name, c.mean, c.gauss, c.kappa1, c.kappa2
        );
    }
    Ok(())
}
