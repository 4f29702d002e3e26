//! Jacobian bounds, sign cases and the closed-form decomposition of a small
//! nonlinear field.
//!
//! ```text
//! cargo run --example decompose
//! ```

use mixmono::{build_decomposition, eval_decomposition, jacobian_bounds, BoxDomain, VectorField};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let f = VectorField::parse(2, &["x1^2 + x2", "x1*sin(x2) - x2"])?;
    let domain = BoxDomain::from_corners(&[-1.0, 0.0], &[1.0, 2.0])?;
    let jb = jacobian_bounds(&f, &domain, 1e-9)?;
    let spec = build_decomposition(&jb, 0.0)?;

    for i in 0..f.m() {
        for j in 0..f.n() {
            println!(
                "df{}/dx{} in {}  {}  z={}  alpha={} beta={}",
                i + 1,
                j + 1,
                jb.get(i, j),
                spec.case(i, j),
                spec.selector(i, j),
                spec.alpha(i, j),
                spec.beta(i, j)
            );
        }
        println!("g{} = {}", i + 1, spec.closed_form(&f, i));
    }

    let x = [0.3, 1.1];
    let diag = eval_decomposition(&spec, &f, &x, &x)?;
    assert_eq!(diag, f.eval(&x)?);
    println!("g(x, x) = f(x) = {diag:?}");
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
