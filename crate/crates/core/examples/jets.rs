//! Third-order bivariate jets: arithmetic, elementary functions, partials.
//!
//! ```bash
//! cargo run --example jets
//! ```

use gaussmap::jets::{seed_vars, Jet3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (u, v) = seed_vars(0.3, -0.2);

    // f = sin(u)·exp(v) / √(1 + u² + v²)
    let f = u.sin() * v.exp();
    let g = (1.0 + u * u + v * v).sqrt()?;
    let h = f.div(&g)?;

    println!("value  {:+.15}", h.value());
    for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (1, 2)] {
        println!("∂u^{i}∂v^{j}  {:+.15}", h.partial(i, j));
    }

    // Differentiating a jet drops one order of validity.
    let hu = h.derive_u();
    println!("order of h_u: {} (h_uu from it: {:+.15})", hu.order(), hu.du());

    let c = Jet3::constant(2.0);
    println!("powi: (2)^5 = {}", c.powi(5)?.value());
    Ok(())
}
