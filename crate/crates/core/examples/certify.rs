//! Exact feasibility certificates over rational parameters.
//!
//! ```bash
//! cargo run --example certify
//! ```

use gaussmap::exactpoly::{feasibility, parse_rational, Outcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: [(u8, &str, &str, Option<&str>); 6] = [
        (1, "-1", "-1", Some("9/4")),
        (1, "1", "1", Some("1")),
        (1, "-1/2", "-1", Some("3")),
        (1, "-1", "-2", Some("1")),
        (2, "1", "1", None),
        (2, "2", "3", None),
    ];
    for (kind, a, b, c) in cases {
        let cert = feasibility(
            kind,
            parse_rational(a)?,
            parse_rational(b)?,
            c.map(parse_rational).transpose()?,
        )?;
        print!("kind {kind} a={a} b={b} c={}: ", c.unwrap_or("-"));
        match cert.outcome {
            Outcome::Unique => {
                let lambda = cert.lambda.as_ref().expect("unique outcome carries Λ");
                let diag: Vec<&str> = (0..3).map(|i| lambda[i][i].as_deref().unwrap_or("?")).collect();
                println!("unique, diag(Λ) = {diag:?}");
            }
            Outcome::Infeasible => {
                let c = cert.contradiction.as_ref().expect("infeasible outcome carries a row");
                println!("infeasible, {} from {} rows", c.derived_equation, c.combination.len());
            }
            Outcome::Underdetermined => println!("underdetermined, rank {}", cert.rank),
        }
        for line in &cert.line_restrictions {
            println!("    {} on {}: {:?}", line.equation, line.line, line.forced);
        }
    }
    Ok(())
}
