//! Decomposition of a bounded-variation function on the whole real line,
//! glued at the origin.
//!
//! ```text
//! cargo run --example unbounded_domain
//! ```

use mixmono::{Domain, ScalarFunction, TvOptions, UnboundedDecomposition};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let f = ScalarFunction::parse("x1*sin(x1)", Domain::Unbounded)?;
    let g = UnboundedDecomposition::new(&f, &TvOptions::default())?;

    for x in [-6.0, -2.0, 0.0, 1.5, 4.0] {
        println!("x = {x:>4}: g1 = {:>10.6}  g2 = {:>10.6}  g(x, x) - f(x) = {:.1e}", g.g1(x)?, g.g2(x)?, g.eval(x, x)? - f.eval(x)?);
    }

    let (lo, hi) = (-3.0, 5.0);
    println!("f on [{lo}, {hi}] lies in [{:.6}, {:.6}]", g.eval(lo, hi)?, g.eval(hi, lo)?);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
