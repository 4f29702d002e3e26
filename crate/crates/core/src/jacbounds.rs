//! Interval enclosures of Jacobian entries over a box, and their sign
//! classification.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, IntervalOptions};
use crate::interval::{BoxDomain, Interval};

/// `f: R^n -> R^m` given by `m` component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    n: usize,
    components: Vec<Expr>,
    /// `partials[i][j]` is `d f_(i+1) / d x_(j+1)`.
    partials: Vec<Vec<Expr>>,
}

impl VectorField {
    pub fn new(n: usize, components: Vec<Expr>) -> Result<Self> {
        for c in &components {
            c.check_dim(n)?;
        }
        let partials = components
            .iter()
            .map(|c| (1..=n).map(|j| c.differentiate(j)).collect())
            .collect();
        Ok(Self { n, components, partials })
    }

    /// Parses each component with [`parse`].
    pub fn parse(n: usize, components: &[&str]) -> Result<Self> {
        let exprs = components.iter().map(|s| parse(s, n)).collect::<Result<Vec<_>>>()?;
        Self::new(n, exprs)
    }

    /// Input dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output dimension.
    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    pub fn partial(&self, i: usize, j: usize) -> &Expr {
        &self.partials[i][j]
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: p.len() });
        }
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    pub fn eval_component(&self, i: usize, p: &[f64]) -> Result<f64> {
        self.components[i].eval(p)
    }
}

/// Sign pattern of a derivative enclosure `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignCase {
    /// Sign-stable positive: `a >= 0`.
    Case1,
    /// Sign-unstable, lower end no larger in magnitude: `|a| <= |b|`.
    Case2,
    /// Sign-unstable, lower end larger in magnitude: `|a| > |b|`.
    Case3,
    /// Sign-stable negative: `b <= 0`.
    Case4,
}

impl SignCase {
    pub fn is_sign_stable(self) -> bool {
        matches!(self, SignCase::Case1 | SignCase::Case4)
    }
}

impl fmt::Display for SignCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignCase::Case1 => "case1",
            SignCase::Case2 => "case2",
            SignCase::Case3 => "case3",
            SignCase::Case4 => "case4",
        })
    }
}

/// Classifies the open enclosure `(a, b)`.
///
/// `a >= 0` wins over the sign-unstable cases (even with `b = inf`), as does
/// `b <= 0`. A magnitude tie `|a| = |b|` goes to [`SignCase::Case2`].
pub fn classify(a: f64, b: f64) -> Result<SignCase> {
    if a.is_nan() || b.is_nan() || a >= b || (a.is_infinite() && b.is_infinite()) {
        return Err(Error::InvalidBounds { a, b });
    }
    Ok(if a >= 0.0 {
        SignCase::Case1
    } else if b <= 0.0 {
        SignCase::Case4
    } else if a.abs() <= b.abs() {
        SignCase::Case2
    } else {
        SignCase::Case3
    })
}

/// `m x n` matrix of open derivative enclosures `(a_ij, b_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBounds {
    m: usize,
    n: usize,
    entries: Vec<Interval>,
    slack: f64,
}

impl JacobianBounds {
    /// Builds from row-major entries. Entries are validated lazily by
    /// [`JacobianBounds::case`].
    pub fn from_entries(m: usize, n: usize, entries: Vec<Interval>) -> Result<Self> {
        if entries.len() != m * n {
            return Err(Error::Dimension { expected: m * n, found: entries.len() });
        }
        Ok(Self { m, n, entries, slack: 0.0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Widening that was applied on construction.
    pub fn slack(&self) -> f64 {
        self.slack
    }

    /// 0-based entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.n + j]
    }

    /// True when the enclosure is `(-inf, inf)`.
    pub fn is_unbounded(&self, i: usize, j: usize) -> bool {
        self.get(i, j).is_entire()
    }

    /// 0-based `(i, j)` of every `(-inf, inf)` entry.
    pub fn unbounded_entries(&self) -> Vec<(usize, usize)> {
        (0..self.m)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_unbounded(i, j))
            .collect()
    }

    pub fn case(&self, i: usize, j: usize) -> Result<SignCase> {
        if self.is_unbounded(i, j) {
            return Err(Error::UnboundedDerivative { i: i + 1, j: j + 1 });
        }
        let e = self.get(i, j);
        classify(e.lo(), e.hi())
    }
}

/// Encloses every `d f_i / d x_j` over `b` by natural interval extension,
/// widened by `slack`.
///
/// A degenerate enclosure (possible only with `slack = 0`, e.g. a constant
/// derivative) is opened to the neighbouring floats so that `a < b` holds.
pub fn jacobian_bounds(f: &VectorField, b: &BoxDomain, slack: f64) -> Result<JacobianBounds> {
    if b.dim() != f.n() {
        return Err(Error::Dimension { expected: f.n(), found: b.dim() });
    }
    let opts = IntervalOptions { slack, ..IntervalOptions::default() };
    let (m, n) = (f.m(), f.n());
    let entries = (0..m * n)
        .into_par_iter()
        .map(|k| {
            let r = f.partial(k / n, k % n).eval_interval(b, &opts)?;
            Ok(if r.lo() < r.hi() {
                r
            } else {
                Interval::raw(r.lo().next_down(), r.hi().next_up())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JacobianBounds { m, n, entries, slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S: f64 = 1e-9;

    fn bx(sides: &[(f64, f64)]) -> BoxDomain {
        BoxDomain::new(sides.iter().map(|&(a, b)| Interval::new(a, b).unwrap()).collect()).unwrap()
    }

    fn close(iv: Interval, lo: f64, hi: f64) -> bool {
        (iv.lo() - lo).abs() < 1e-15 && (iv.hi() - hi).abs() < 1e-15
    }

    #[test]
    fn square_on_unit_interval() {
        let f = VectorField::parse(1, &["x1^2"]).unwrap();
        let jb = jacobian_bounds(&f, &bx(&[(-1.0, 1.0)]), S).unwrap();
        assert!(close(jb.get(0, 0), -2.0 - S, 2.0 + S), "{}", jb.get(0, 0));
        assert_eq!(jb.case(0, 0).unwrap(), SignCase::Case2);
    }

    #[test]
    fn negation_is_constant() {
        let f = VectorField::parse(1, &["-x1"]).unwrap();
        for b in [bx(&[(0.0, 1.0)]), bx(&[(-7.0, 3.0)])] {
            let jb = jacobian_bounds(&f, &b, S).unwrap();
            assert!(close(jb.get(0, 0), -1.0 - S, -1.0 + S));
            assert_eq!(jb.case(0, 0).unwrap(), SignCase::Case4);
        }
    }

    #[test]
    fn linear_field_has_constant_rows() {
        let f = VectorField::parse(2, &["-x1 + x2", "x1 - x2"]).unwrap();
        let jb = jacobian_bounds(&f, &bx(&[(0.0, 1.0), (0.0, 1.0)]), S).unwrap();
        assert!(close(jb.get(0, 0), -1.0 - S, -1.0 + S));
        assert!(close(jb.get(0, 1), 1.0 - S, 1.0 + S));
        assert!(close(jb.get(1, 0), 1.0 - S, 1.0 + S));
        assert!(close(jb.get(1, 1), -1.0 - S, -1.0 + S));
    }

    #[test]
    fn zero_slack_constant_derivative_stays_open() {
        let f = VectorField::parse(1, &["-x1"]).unwrap();
        let jb = jacobian_bounds(&f, &bx(&[(0.0, 1.0)]), 0.0).unwrap();
        let e = jb.get(0, 0);
        assert!(e.lo() < -1.0 && e.hi() > -1.0 && e.width() < 1e-15);
        assert_eq!(jb.case(0, 0).unwrap(), SignCase::Case4);
    }

    #[test]
    fn unbounded_entries_are_reported() {
        let f = VectorField::parse(2, &["x1/x2"]).unwrap();
        let jb = jacobian_bounds(&f, &bx(&[(0.0, 1.0), (-1.0, 1.0)]), S).unwrap();
        assert_eq!(jb.unbounded_entries(), vec![(0, 0), (0, 1)]);
        assert_eq!(jb.case(0, 1), Err(Error::UnboundedDerivative { i: 1, j: 2 }));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.5, 3.0).unwrap(), SignCase::Case1);
        assert_eq!(classify(-2.0, 2.0).unwrap(), SignCase::Case2);
        assert_eq!(classify(f64::NEG_INFINITY, -0.1).unwrap(), SignCase::Case4);
        assert_eq!(classify(-3.0, 1.0).unwrap(), SignCase::Case3);
        assert_eq!(classify(0.0, f64::INFINITY).unwrap(), SignCase::Case1);
        assert_eq!(classify(f64::NEG_INFINITY, 0.0).unwrap(), SignCase::Case4);
        assert!(matches!(classify(1.0, 1.0), Err(Error::InvalidBounds { .. })));
        assert!(matches!(classify(2.0, 1.0), Err(Error::InvalidBounds { .. })));
        assert!(matches!(classify(f64::NEG_INFINITY, f64::INFINITY), Err(Error::InvalidBounds { .. })));
    }

    // Exhaustive grid over a in {-inf,-2,-1,0,1}, b in {-1,0,1,2,inf}, a < b.
    #[test]
    fn classify_small_grid() {
        let inf = f64::INFINITY;
        let expected = |a: f64, b: f64| {
            if a >= 0.0 {
                SignCase::Case1
            } else if b <= 0.0 {
                SignCase::Case4
            } else if -a <= b {
                SignCase::Case2
            } else {
                SignCase::Case3
            }
        };
        let mut seen = 0;
        for a in [-inf, -2.0, -1.0, 0.0, 1.0] {
            for b in [-1.0, 0.0, 1.0, 2.0, inf] {
                if a >= b || (a == -inf && b == inf) {
                    assert!(classify(a, b).is_err());
                    continue;
                }
                assert_eq!(classify(a, b).unwrap(), expected(a, b), "({a}, {b})");
                assert_eq!(classify(a, b).unwrap(), classify(a, b).unwrap());
                seen += 1;
            }
        }
        assert_eq!(seen, 18);
        assert_eq!(classify(-inf, 1.0).unwrap(), SignCase::Case3);
        assert_eq!(classify(-1.0, inf).unwrap(), SignCase::Case2);
        assert_eq!(classify(-1.0, 1.0).unwrap(), SignCase::Case2);
    }

    #[test]
    fn enclosures_contain_sampled_derivatives() {
        let fields = [
            VectorField::parse(2, &["x1*sin(x2)", "exp(-x1)*x2^2"]).unwrap(),
            VectorField::parse(2, &["cos(x1 + x2) - x1^3", "x1*x2/(2 + x1^2)"]).unwrap(),
        ];
        let b = bx(&[(-1.0, 0.5), (0.2, 2.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in &fields {
            let jb = jacobian_bounds(f, &b, S).unwrap();
            for _ in 0..1000 {
                let p = [rng.gen_range(-1.0..=0.5), rng.gen_range(0.2..=2.0)];
                for i in 0..f.m() {
                    for j in 0..f.n() {
                        let v = f.partial(i, j).eval(&p).unwrap();
                        let e = jb.get(i, j);
                        assert!(e.lo() < v && v < e.hi(), "d{i}/d{j} = {v} outside {e}");
                    }
                }
            }
        }
    }
}
