//! Range bounds from decompositions, tightened by bisection.
//!
//! ```text
//! cargo run --example range_bounds
//! ```

use mixmono::{refine_bounds, BoundOptions, BoxDomain, VectorField};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let exact = BoundOptions { epsilon: 0.0, slack: 0.0 };

    let sq = VectorField::parse(1, &["x1^2"])?;
    let unit = BoxDomain::from_corners(&[-1.0], &[1.0])?;
    for depth in 0..3 {
        let r = refine_bounds(&sq, &unit, depth, &exact)?;
        println!("x^2 on [-1, 1], depth {depth}: {}", r[0]);
    }

    let f = VectorField::parse(2, &["x1*sin(x1) + x2^2", "exp(-x1)*x2"])?;
    let b = BoxDomain::from_corners(&[-2.0, -1.0], &[2.0, 1.0])?;
    let mut prev = None;
    for depth in [0, 2, 4, 8] {
        let r = refine_bounds(&f, &b, depth, &BoundOptions::default())?;
        println!("depth {depth}: f1 in {}, f2 in {}", r[0], r[1]);
        if let Some(p) = prev.replace(r.clone()) {
            let p: Vec<mixmono::Interval> = p;
            assert!(p.iter().zip(&r).all(|(a, b)| a.encloses(b)));
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
