//! Embedding systems and reach tubes.
//!
//! For `dx/dt = f(x)` with decomposition `g`, the embedding system on pairs
//! `(x, y)` is
//!
//! ```text
//! dx/dt = g(x, y)
//! dy/dt = g(y, x)
//! ```
//!
//! Its vector field is monotone for the order `(x1, y1) ⪰ (x2, y2)` iff
//! `x1 ⪰ x2` and `y1 ⪯ y2`, and the diagonal `x = y` carries the original
//! dynamics. Started from `(lower, upper)` of an initial box, the `x` half
//! bounds every trajectory from below and the `y` half from above.
//!
//! Integration is classical fixed-step RK4. Tubes are numerical
//! approximations, not validated enclosures; the step is recorded with each
//! tube. Forward completeness and invariance of the decomposition's box are
//! assumed, not checked.

use crate::decomp::{eval_decomposition, DecompositionSpec, Selector};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::interval::leq_orthant;
use crate::jacbounds::VectorField;

pub const DEFAULT_MAGNITUDE_CAP: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct EmbeddingSystem {
    f: VectorField,
    spec: DecompositionSpec,
    magnitude_cap: f64,
}

pub fn build_embedding(f: &VectorField, spec: &DecompositionSpec) -> Result<EmbeddingSystem> {
    if f.m() != f.n() {
        return Err(Error::Dimension { expected: f.n(), found: f.m() });
    }
    if spec.m() != f.m() || spec.n() != f.n() {
        return Err(Error::Dimension { expected: f.n(), found: spec.n() });
    }
    Ok(EmbeddingSystem { f: f.clone(), spec: spec.clone(), magnitude_cap: DEFAULT_MAGNITUDE_CAP })
}

impl EmbeddingSystem {
    /// Replaces the state magnitude at which integration fails.
    pub fn with_magnitude_cap(mut self, cap: f64) -> Self {
        self.magnitude_cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.f.n()
    }

    pub fn field(&self) -> &VectorField {
        &self.f
    }

    pub fn spec(&self) -> &DecompositionSpec {
        &self.spec
    }

    /// `(g(x, y), g(y, x))`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((eval_decomposition(&self.spec, &self.f, x, y)?, eval_decomposition(&self.spec, &self.f, y, x)?))
    }

    /// The `2n`-dimensional field as expressions over `x1..x2n`, where
    /// `x(n+k)` stands for `y_k`.
    pub fn expressions(&self) -> VectorField {
        let n = self.dim();
        let half = |swap: bool| -> Vec<Expr> {
            let (xo, yo) = if swap { (n, 0) } else { (0, n) };
            (0..n)
                .map(|i| {
                    let mut g = self.f.component(i).substitute(&|k| match self.spec.selector(i, k - 1) {
                        Selector::FirstArg => Expr::Var(k + xo),
                        Selector::SecondArg => Expr::Var(k + yo),
                    });
                    for j in 0..n {
                        let c = self.spec.alpha(i, j) - self.spec.beta(i, j);
                        if c != 0.0 {
                            let diff = Expr::Binary(
                                crate::expr::BinaryOp::Sub,
                                Box::new(Expr::Var(j + 1 + xo)),
                                Box::new(Expr::Var(j + 1 + yo)),
                            );
                            let term = Expr::Binary(crate::expr::BinaryOp::Mul, Box::new(Expr::Const(c)), Box::new(diff));
                            g = Expr::Binary(crate::expr::BinaryOp::Add, Box::new(g), Box::new(term));
                        }
                    }
                    g
                })
                .collect()
        };
        let mut comps = half(false);
        comps.extend(half(true));
        VectorField::new(2 * n, comps).expect("embedding expressions use x1..x2n")
    }

    fn stacked(&self, state: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let (dx, dy) = self.eval(&state[..n], &state[n..])?;
        Ok([dx, dy].concat())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeSample {
    pub t: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachTube {
    pub samples: Vec<TubeSample>,
    pub step: f64,
    pub integrator: &'static str,
}

impl ReachTube {
    pub fn last(&self) -> &TubeSample {
        self.samples.last().expect("a tube has at least the initial sample")
    }

    /// Sample whose time is closest to `t`.
    pub fn at(&self, t: f64) -> &TubeSample {
        self.samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("nonempty tube")
    }

    /// CSV with header `t,lower_1..lower_n,upper_1..upper_n`, full precision.
    pub fn to_csv(&self) -> String {
        let n = self.samples.first().map_or(0, |s| s.lower.len());
        let mut out = String::from("t");
        for k in 1..=n {
            out.push_str(&format!(",lower_{k}"));
        }
        for k in 1..=n {
            out.push_str(&format!(",upper_{k}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&crate::numfmt::format_sig9(s.t));
            for v in s.lower.iter().chain(&s.upper) {
                out.push(',');
                out.push_str(&crate::numfmt::format_sig9(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Time grid `0, h, 2h, ..., t_end`. When `h` does not divide `t_end` the
/// last step is shortened.
pub fn time_grid(t_end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidDomain(format!("step must be positive, got {step}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidDomain(format!("t_end must be >= 0, got {t_end}")));
    }
    let ratio = t_end / step;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { ratio.ceil() } as usize;
    Ok((0..=steps).map(|k| if k == steps { t_end } else { k as f64 * step }).collect())
}

fn rk4_step(field: &dyn Fn(&[f64]) -> Result<Vec<f64>>, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| a.iter().zip(b).map(|(a, b)| a + s * b).collect::<Vec<_>>();
    let k1 = field(y)?;
    let k2 = field(&axpy(y, 0.5 * h, &k1))?;
    let k3 = field(&axpy(y, 0.5 * h, &k2))?;
    let k4 = field(&axpy(y, h, &k3))?;
    Ok((0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

fn integrate(
    field: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    y0: Vec<f64>,
    t_end: f64,
    step: f64,
    cap: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = time_grid(t_end, step)?;
    let mut out = Vec::with_capacity(grid.len());
    out.push((0.0, y0));
    for w in grid.windows(2) {
        let prev = &out.last().expect("seeded").1;
        let next = match rk4_step(field, prev, w[1] - w[0]) {
            Ok(v) => v,
            Err(Error::Eval(_)) => return Err(Error::Blowup { time: w[1], cap }),
            Err(e) => return Err(e),
        };
        if next.iter().any(|v| !v.is_finite() || v.abs() > cap) {
            return Err(Error::Blowup { time: w[1], cap });
        }
        out.push((w[1], next));
    }
    Ok(out)
}

/// Integrates the embedding system from `(x_lo, x_hi)` and returns the tube
/// of `(lower, upper)` pairs at every step and at `t_end`.
pub fn integrate_embedding(sys: &EmbeddingSystem, x_lo: &[f64], x_hi: &[f64], t_end: f64, step: f64) -> Result<ReachTube> {
    let n = sys.dim();
    for p in [x_lo, x_hi] {
        if p.len() != n {
            return Err(Error::Dimension { expected: n, found: p.len() });
        }
    }
    if !leq_orthant(x_lo, x_hi)? {
        return Err(Error::InvalidDomain("initial lower corner is not below the upper corner".into()));
    }
    let field = |s: &[f64]| sys.stacked(s);
    let path = integrate(&field, [x_lo, x_hi].concat(), t_end, step, sys.magnitude_cap)?;
    let samples = path
        .into_iter()
        .map(|(t, s)| TubeSample { t, lower: s[..n].to_vec(), upper: s[n..].to_vec() })
        .collect();
    Ok(ReachTube { samples, step, integrator: "rk4" })
}

/// Trajectory of `dx/dt = f(x)` on the same time grid as
/// [`integrate_embedding`].
pub fn sample_trajectory(f: &VectorField, x0: &[f64], t_end: f64, step: f64) -> Result<Vec<(f64, Vec<f64>)>> {
    if f.m() != f.n() {
        return Err(Error::Dimension { expected: f.n(), found: f.m() });
    }
    if x0.len() != f.n() {
        return Err(Error::Dimension { expected: f.n(), found: x0.len() });
    }
    integrate(&|s| f.eval(s), x0.to_vec(), t_end, step, DEFAULT_MAGNITUDE_CAP)
}

/// State at `t_end` of `dx/dt = f(x)` from `x0`.
pub fn sample_flow(f: &VectorField, x0: &[f64], t_end: f64, step: f64) -> Result<Vec<f64>> {
    Ok(sample_trajectory(f, x0, t_end, step)?.pop().expect("nonempty").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::build_decomposition;
    use crate::interval::BoxDomain;
    use crate::jacbounds::jacobian_bounds;

    fn system(n: usize, comps: &[&str], lo: &[f64], hi: &[f64]) -> EmbeddingSystem {
        let f = VectorField::parse(n, comps).unwrap();
        let b = BoxDomain::from_corners(lo, hi).unwrap();
        let spec = build_decomposition(&jacobian_bounds(&f, &b, 1e-9).unwrap(), 0.0).unwrap();
        build_embedding(&f, &spec).unwrap()
    }

    #[test]
    fn decay_embedding_swaps_halves() {
        let sys = system(1, &["-x1"], &[-5.0], &[5.0]);
        assert_eq!(sys.expressions().components().iter().map(|e| e.to_string()).collect::<Vec<_>>(), ["-x2", "-x1"]);
        assert_eq!(sys.eval(&[0.25], &[2.0]).unwrap(), (vec![-2.0], vec![-0.25]));
    }

    #[test]
    fn metzler_embedding_expressions() {
        let sys = system(2, &["-x1 + x2", "x1 - x2"], &[0.0, 0.0], &[1.0, 1.0]);
        let e: Vec<String> = sys.expressions().components().iter().map(|e| e.to_string()).collect();
        // x3, x4 are y1, y2.
        assert_eq!(e, ["-x3 + x2", "x1 - x4", "-x1 + x4", "x3 - x2"]);
        let (dx, dy) = sys.eval(&[0.3, 0.7], &[0.3, 0.7]).unwrap();
        let f = sys.field().eval(&[0.3, 0.7]).unwrap();
        assert_eq!(dx, f);
        assert_eq!(dy, f);
    }

    #[test]
    fn non_square_field_rejected() {
        let f = VectorField::parse(2, &["x1"]).unwrap();
        let b = BoxDomain::from_corners(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let spec = build_decomposition(&jacobian_bounds(&f, &b, 1e-9).unwrap(), 0.0).unwrap();
        assert!(matches!(build_embedding(&f, &spec), Err(Error::Dimension { .. })));
    }

    #[test]
    fn time_grid_shapes() {
        assert_eq!(time_grid(1.0, 1e-3).unwrap().len(), 1001);
        assert_eq!(time_grid(0.0, 0.1).unwrap(), vec![0.0]);
        let g = time_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(time_grid(1.0, 0.0).is_err());
        assert!(time_grid(-1.0, 0.1).is_err());
    }

    #[test]
    fn flow_examples() {
        let decay = VectorField::parse(1, &["-x1"]).unwrap();
        let v = sample_flow(&decay, &[1.0], 1.0, 1e-3).unwrap();
        assert!((v[0] - (-1f64).exp()).abs() < 1e-9);
        assert_eq!(sample_flow(&decay, &[0.7], 0.0, 1e-3).unwrap(), vec![0.7]);
        let eq = VectorField::parse(1, &["-x1 + 0*x1"]).unwrap();
        for t in [0.5, 1.0, 3.0] {
            assert_eq!(sample_flow(&eq, &[0.0], t, 1e-2).unwrap(), vec![0.0]);
        }
    }

    #[test]
    fn blowup_is_reported_with_time() {
        let f = VectorField::parse(1, &["x1^2"]).unwrap();
        match sample_flow(&f, &[1.0], 2.0, 1e-3) {
            Err(Error::Blowup { time, .. }) => assert!(time > 0.9 && time < 1.01, "{time}"),
            other => panic!("{other:?}"),
        }
        let sys = system(1, &["x1"], &[0.0], &[1.0]).with_magnitude_cap(10.0);
        assert!(matches!(integrate_embedding(&sys, &[0.0], &[1.0], 5.0, 1e-2), Err(Error::Blowup { .. })));
    }

    #[test]
    fn initial_box_must_be_ordered() {
        let sys = system(1, &["-x1"], &[0.0], &[1.0]);
        assert!(integrate_embedding(&sys, &[1.0], &[0.0], 1.0, 0.1).is_err());
        assert!(integrate_embedding(&sys, &[0.0, 0.0], &[1.0, 1.0], 1.0, 0.1).is_err());
    }

    #[test]
    fn csv_layout() {
        let sys = system(1, &["-x1"], &[0.0], &[1.0]);
        let tube = integrate_embedding(&sys, &[0.0], &[1.0], 0.0, 1e-3).unwrap();
        assert_eq!(tube.to_csv(), "t,lower_1,upper_1\n0,0,1\n");
    }
}
