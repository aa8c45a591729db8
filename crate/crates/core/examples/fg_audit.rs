//! Per-monomial audit of the displayed f(u,v) and g(u,v) brackets.
//!
//! ```bash
//! cargo run --example fg_audit -- 2 1 1
//! ```

use gaussmap::exactpoly::{audit_fg, parse_rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, d: &str| parse_rational(args.get(i).map(String::as_str).unwrap_or(d));
    let audit = audit_fg(get(0, "2")?, get(1, "1")?, get(2, "1")?)?;
    println!("a={} b={} c={}", audit.a, audit.b, audit.c);
    for (name, rows) in [("f", &audit.f_rows), ("g", &audit.g_rows)] {
        for r in rows {
            let mark = if r.agrees { "ok" } else { "MISMATCH" };
            println!("  {name} {:<8} computed {:>10} reference {:>10} {mark}", r.monomial, r.computed, r.reference);
        }
    }
    let s = &audit.slice;
    println!(
        "v² coefficient: computed {}, full display {}, slice display {}\n  {}",
        s.computed, s.reference_full, s.reference_slice, s.verdict
    );
    println!("numeric consistency: max gap {:.1e} over {} points", audit.numeric_max_rel, audit.numeric_points);
    Ok(())
}
