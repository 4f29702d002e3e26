//! The expression language: parsing, derivatives, point and interval
//! evaluation.
//!
//! ```text
//! cargo run --example expressions
//! ```

use mixmono::{parse, BoxDomain, IntervalOptions};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let e = parse("x1^2*cos(x2) - exp(-x1)/(1 + x2^2)", 2)?;
    println!("f = {e}");
    for j in 1..=2 {
        println!("df/dx{j} = {}", e.differentiate(j));
    }
    println!("f(0.5, 1) = {}", e.eval(&[0.5, 1.0])?);

    let b = BoxDomain::from_corners(&[-1.0, 0.0], &[1.0, 1.0])?;
    println!("natural extension on {b}: {}", e.eval_interval(&b, &IntervalOptions::default())?);

    match parse("x1 + * x2", 2) {
        Err(err) => println!("parse error: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
