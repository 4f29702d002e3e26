//! Decomposition functions built from Jacobian sign cases.
//!
//! For each output `i` the decomposition is
//!
//! ```text
//! g_i(x, y) = f_i(z) + (alpha_i - beta_i) . (x - y)
//! ```
//!
//! where `z_j` is `x_j` for sign cases 1-2 and `y_j` for cases 3-4, and the
//! offsets `alpha`, `beta` cancel the wrong-signed part of sign-unstable
//! partial derivatives. Evaluating `g` at the box corners brackets the range
//! of `f` over the box.

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::{BoxDomain, Interval};
use crate::jacbounds::{jacobian_bounds, JacobianBounds, SignCase, VectorField};
use crate::numfmt::format_sig9;

/// Which argument of `g(x, y)` feeds coordinate `j` of `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    FirstArg,
    SecondArg,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::FirstArg => "x",
            Selector::SecondArg => "y",
        })
    }
}

/// Selectors and offsets realizing `g` for an `m x n` field. All matrices are
/// row-major; row `i` belongs to output `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSpec {
    m: usize,
    n: usize,
    cases: Vec<SignCase>,
    selectors: Vec<Selector>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    epsilon: f64,
}

impl DecompositionSpec {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn case(&self, i: usize, j: usize) -> SignCase {
        self.cases[i * self.n + j]
    }

    pub fn selector(&self, i: usize, j: usize) -> Selector {
        self.selectors[i * self.n + j]
    }

    /// Nonnegative offset; nonzero only in case 2.
    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.alpha[i * self.n + j]
    }

    /// Nonpositive offset; nonzero only in case 3.
    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta[i * self.n + j]
    }

    /// `g_i` in closed form over `x1..xn, y1..yn`, e.g. `x1^2 + 2*x1 - 2*y1`.
    pub fn closed_form(&self, f: &VectorField, i: usize) -> String {
        let n = self.n;
        let z = f.component(i).substitute(&|k| match self.selector(i, k - 1) {
            Selector::FirstArg => crate::expr::Expr::Var(k),
            Selector::SecondArg => crate::expr::Expr::Var(n + k),
        });
        let names = |k: usize| if k <= n { format!("x{}", k) } else { format!("y{}", k - n) };
        let mut out = z.display_with(&names).to_string();
        for j in 0..n {
            let c = self.alpha(i, j) - self.beta(i, j);
            if c != 0.0 {
                let c = format_sig9(c);
                out.push_str(&format!(" + {c}*x{k} - {c}*y{k}", k = j + 1));
            }
        }
        out
    }
}

/// Applies the case table to every entry of `jb`.
pub fn build_decomposition(jb: &JacobianBounds, epsilon: f64) -> Result<DecompositionSpec> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", epsilon)));
    }
    let (m, n) = (jb.m(), jb.n());
    let mut spec = DecompositionSpec {
        m,
        n,
        cases: Vec::with_capacity(m * n),
        selectors: Vec::with_capacity(m * n),
        alpha: Vec::with_capacity(m * n),
        beta: Vec::with_capacity(m * n),
        epsilon,
    };
    for i in 0..m {
        for j in 0..n {
            let case = jb.case(i, j)?;
            let e = jb.get(i, j);
            let (sel, alpha, beta) = match case {
                SignCase::Case1 => (Selector::FirstArg, 0.0, 0.0),
                SignCase::Case2 => (Selector::FirstArg, e.lo().abs() + epsilon, 0.0),
                SignCase::Case3 => (Selector::SecondArg, 0.0, -e.hi().abs() - epsilon),
                SignCase::Case4 => (Selector::SecondArg, 0.0, 0.0),
            };
            spec.cases.push(case);
            spec.selectors.push(sel);
            spec.alpha.push(alpha);
            spec.beta.push(beta);
        }
    }
    Ok(spec)
}

fn check_shape(spec: &DecompositionSpec, f: &VectorField) -> Result<()> {
    if spec.m != f.m() {
        return Err(Error::Dimension { expected: spec.m, found: f.m() });
    }
    if spec.n != f.n() {
        return Err(Error::Dimension { expected: spec.n, found: f.n() });
    }
    Ok(())
}

fn eval_row(spec: &DecompositionSpec, f: &VectorField, i: usize, x: &[f64], y: &[f64], z: &mut [f64]) -> Result<f64> {
    let mut offset = 0.0;
    for j in 0..spec.n {
        z[j] = match spec.selector(i, j) {
            Selector::FirstArg => x[j],
            Selector::SecondArg => y[j],
        };
        let c = spec.alpha(i, j) - spec.beta(i, j);
        if c != 0.0 {
            offset += c * (x[j] - y[j]);
        }
    }
    Ok(f.eval_component(i, z)? + offset)
}

/// `g(x, y)`.
pub fn eval_decomposition(spec: &DecompositionSpec, f: &VectorField, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_shape(spec, f)?;
    for p in [x, y] {
        if p.len() != spec.n {
            return Err(Error::Dimension { expected: spec.n, found: p.len() });
        }
    }
    let mut z = vec![0.0; spec.n];
    (0..spec.m).map(|i| eval_row(spec, f, i, x, y, &mut z)).collect()
}

/// `[g_i(lower, upper), g_i(upper, lower)]` for every output `i`.
pub fn bound_box(spec: &DecompositionSpec, f: &VectorField, b: &BoxDomain) -> Result<Vec<Interval>> {
    check_shape(spec, f)?;
    if b.dim() != spec.n {
        return Err(Error::Dimension { expected: spec.n, found: b.dim() });
    }
    let (lo, hi) = (b.lower(), b.upper());
    let mut z = vec![0.0; spec.n];
    (0..spec.m)
        .map(|i| {
            let a = eval_row(spec, f, i, &lo, &hi, &mut z)?;
            let c = eval_row(spec, f, i, &hi, &lo, &mut z)?;
            Interval::new(a, c).map_err(|_| Error::Eval(format!("decomposition bound for f{} is inverted: [{}, {}]", i + 1, a, c)))
        })
        .collect()
}

/// Knobs shared by the Jacobian-based bounding routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub epsilon: f64,
    /// Widening of each Jacobian enclosure.
    pub slack: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { epsilon: 0.0, slack: 1e-9 }
    }
}

/// Jacobian bounds, decomposition and corner evaluation on one box.
pub fn bound_once(f: &VectorField, b: &BoxDomain, opts: &BoundOptions) -> Result<Vec<Interval>> {
    let jb = jacobian_bounds(f, b, opts.slack)?;
    let spec = build_decomposition(&jb, opts.epsilon)?;
    bound_box(&spec, f, b)
}

/// Range bounds refined by `depth` levels of widest-axis bisection.
///
/// Each level hulls the two children and intersects with the parent's own
/// bound, so deeper results are always nested inside shallower ones. A child
/// whose Jacobian enclosure is unbounded inherits the parent's bound. Boxes
/// with no positive-width side are not split further.
pub fn refine_bounds(f: &VectorField, b: &BoxDomain, depth: u32, opts: &BoundOptions) -> Result<Vec<Interval>> {
    let parent = bound_once(f, b, opts);
    if depth == 0 {
        return parent;
    }
    let axis = b.widest_axis();
    if b.side(axis).width() <= 0.0 {
        return parent;
    }
    let (left, right) = b.split(axis)?;
    let (l, r) = rayon::join(
        || refine_bounds(f, &left, depth - 1, opts),
        || refine_bounds(f, &right, depth - 1, opts),
    );
    let inherit = |child: Result<Vec<Interval>>| match (child, &parent) {
        (Err(Error::UnboundedDerivative { .. }), Ok(p)) => Ok(p.clone()),
        (child, _) => child,
    };
    let (l, r) = (inherit(l)?, inherit(r)?);
    let hull: Vec<Interval> = l.iter().zip(&r).map(|(a, b)| a.hull(b)).collect();
    match parent {
        Ok(p) => Ok(hull
            .iter()
            .zip(&p)
            .map(|(h, p)| h.intersect(p).unwrap_or(*h))
            .collect()),
        Err(Error::UnboundedDerivative { .. }) => Ok(hull),
        Err(e) => Err(e),
    }
}
