//! Runs every example's `run` so the examples stay working.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;
    };
}

example!(decompose, "../examples/decompose.rs");
example!(range_bounds, "../examples/range_bounds.rs");
example!(reach_tube, "../examples/reach_tube.rs");
example!(total_variation, "../examples/total_variation.rs");
example!(unbounded_domain, "../examples/unbounded_domain.rs");
example!(expressions, "../examples/expressions.rs");

#[test]
fn examples_run() {
    decompose::run().unwrap();
    range_bounds::run().unwrap();
    reach_tube::run().unwrap();
    total_variation::run().unwrap();
    unbounded_domain::run().unwrap();
    expressions::run().unwrap();
}
