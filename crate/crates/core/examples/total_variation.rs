//! Total variation and the Jordan split of univariate functions, and the
//! decomposition built from them.
//!
//! ```text
//! cargo run --example total_variation
//! ```

use std::f64::consts::PI;

use mixmono::{jordan_split, total_variation, Domain, Interval, ScalarFunction, TvOptions};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let opts = TvOptions::default();

    let sin = ScalarFunction::on("sin(x1)", 0.0, 2.0 * PI)?;
    let split = jordan_split(&sin, &opts)?;
    println!("TV(sin, [0, 2pi]) = {:.9}", split.total_variation());
    for k in 0..=4 {
        let x = k as f64 * PI / 2.0;
        println!("  x = {x:.4}: f+ = {:.6}, f- = {:.6}", split.plus(x)?, split.minus(x)?);
    }
    println!("  bounds = {}", split.bounds()?);

    let kinked = ScalarFunction::parse("abs(x1 - 0.3) + max(x1, 0.5)", Domain::Unbounded)?;
    let tv = total_variation(&kinked, Interval::new(0.0, 1.0)?, &opts)?;
    println!("TV(|x - 0.3| + max(x, 0.5), [0, 1]) = {tv:.9}");

    let sq = ScalarFunction::on("x1^2", -1.0, 1.0)?;
    let split = jordan_split(&sq, &opts)?;
    for (x, y) in [(1.0, -1.0), (-1.0, 1.0), (0.5, 0.5)] {
        println!("x^2: g({x}, {y}) = {:.9}", split.decomposition(x, y)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
