//! Reach tube of a linear Metzler system from the embedding system, checked
//! against sampled trajectories.
//!
//! ```text
//! cargo run --example reach_tube
//! ```

use mixmono::{
    build_decomposition, build_embedding, integrate_embedding, jacobian_bounds, sample_flow, BoxDomain,
    VectorField,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let f = VectorField::parse(2, &["-x1 + x2", "x1 - x2"])?;
    let init = BoxDomain::from_corners(&[-1.0, -1.0], &[1.0, 1.0])?;
    let spec = build_decomposition(&jacobian_bounds(&f, &init, 1e-9)?, 0.0)?;
    let sys = build_embedding(&f, &spec)?;

    println!("embedding system:");
    for (k, c) in sys.expressions().components().iter().enumerate() {
        println!("  d/dt s{} = {}", k + 1, c);
    }

    let tube = integrate_embedding(&sys, &init.lower(), &init.upper(), 1.0, 0.01)?;
    let end = tube.last();
    println!("t = {}: lower {:?}, upper {:?}", end.t, end.lower, end.upper);

    for x0 in init.corners() {
        let x = sample_flow(&f, &x0, 1.0, 0.01)?;
        for ((lo, hi), v) in end.lower.iter().zip(&end.upper).zip(&x) {
            assert!(lo - 1e-9 <= *v && *v <= hi + 1e-9);
        }
    }
    println!("all corner trajectories stay inside the tube");
    print!("{}", tube.to_csv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
