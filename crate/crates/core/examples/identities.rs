//! `Δx = −2Hn` and `Δn = grad 2H + (4H² − 2K)n` on every zoo surface.
//!
//! ```bash
//! cargo run --example identities
//! ```

use gaussmap::beltrami::identity_residuals_at;
use gaussmap::finitetype::sample_points;
use gaussmap::surfaces::zoo;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in zoo() {
        let mut worst = (0.0f64, 0.0f64);
        for (u, v) in sample_points(&s, 100, 1)? {
            let (x, n) = identity_residuals_at(&s.frame(u, v)?)?.scaled();
            worst = (worst.0.max(x), worst.1.max(n));
        }
        println!("{:<24} position {:.2e}   normal {:.2e}", s.name, worst.0, worst.1);
    }
    Ok(())
}
