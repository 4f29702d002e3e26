//! Bounded variation of univariate functions.
//!
//! A function of bounded variation on `[lo, hi]` splits as `f = f⁺ + f⁻`
//! with `f⁺(x)` the total variation on `[lo, x]` (nondecreasing) and `f⁻`
//! nonincreasing, which makes `g(x, y) = f⁺(x) + f⁻(y)` a decomposition
//! function. For continuously differentiable `f` the same `g` has the integral
//! form `f(x) + 2 ∫_y^x |f'(t)| 1{f'(t) < 0} dt`.
//!
//! Two ways of measuring variation are used, picked from the expression:
//!
//! * expressions without `abs`/`min`/`max`/`sign` are split at the sign
//!   changes of `f'` (located on a scan grid, then bisected) and `|f'|` is
//!   integrated piece by piece;
//! * expressions with kinks use partition sums, refined around local extrema
//!   until the sum stops growing.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::interval::Interval;
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(Interval),
    /// The whole real line.
    Unbounded,
}

/// `f: domain -> R` written in the single variable `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    expr: Expr,
    derivative: Expr,
    domain: Domain,
}

impl ScalarFunction {
    pub fn new(expr: Expr, domain: Domain) -> Result<Self> {
        expr.check_dim(1)?;
        if let Domain::Finite(d) = domain {
            if !d.is_finite() {
                return Err(Error::InvalidDomain(format!("{} is not finite; use Domain::Unbounded", d)));
            }
        }
        let derivative = expr.differentiate(1);
        Ok(Self { expr, derivative, domain })
    }

    pub fn parse(text: &str, domain: Domain) -> Result<Self> {
        Self::new(parse(text, 1)?, domain)
    }

    /// Shorthand for a function on `[lo, hi]`.
    pub fn on(text: &str, lo: f64, hi: f64) -> Result<Self> {
        Self::parse(text, Domain::Finite(Interval::new(lo, hi)?))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// False when the expression has kinks and variation falls back to
    /// partition sums.
    pub fn is_smooth(&self) -> bool {
        !self.expr.has_kinks()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.expr.eval(&[x])
    }

    fn slope(&self, x: f64) -> Result<f64> {
        self.derivative.eval(&[x])
    }

    fn check_within(&self, a: f64, b: f64) -> Result<()> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidDomain(format!("[{a}, {b}] is not finite")));
        }
        if let Domain::Finite(d) = self.domain {
            if !(d.contains(a) && d.contains(b)) {
                return Err(Error::InvalidDomain(format!("[{a}, {b}] lies outside {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvOptions {
    /// Absolute accuracy target.
    pub tol: f64,
    /// Cells in the grid scanned for sign changes of `f'`, and the initial
    /// partition on the kinked path.
    pub scan_cells: usize,
    /// Width to which sign changes of `f'` are bisected.
    pub root_tol: f64,
    /// Partition size at which the kinked path gives up.
    pub max_points: usize,
}

impl Default for TvOptions {
    fn default() -> Self {
        Self { tol: 1e-8, scan_cells: 1 << 10, root_tol: 1e-12, max_points: 1 << 20 }
    }
}

/// A stretch `[a, b]` on which `f'` keeps one sign.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    decreasing: bool,
}

/// Variation of `f` over `[c, d]` inside one monotone piece. This is
/// `|f(d) - f(c)|` when `∫|f'|` agrees with it to `tol`, and the integral
/// otherwise.
fn piece_variation(f: &ScalarFunction, c: f64, d: f64, tol: f64) -> Result<f64> {
    if d <= c {
        return Ok(0.0);
    }
    let quad = integrate(&|t| f.slope(t).map(f64::abs), c, d, tol)?;
    let chord = (f.eval(d)? - f.eval(c)?).abs();
    Ok(if quad - chord <= tol { chord } else { quad })
}

fn bisect_root(f: &ScalarFunction, mut lo: f64, mut hi: f64, mut s_lo: f64, root_tol: f64) -> Result<f64> {
    while hi - lo > root_tol {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let s = f.slope(m)?;
        if s == 0.0 {
            return Ok(m);
        }
        if (s < 0.0) == (s_lo < 0.0) {
            lo = m;
            s_lo = s;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Splits `[a, b]` at the located sign changes of `f'`.
fn monotone_pieces(f: &ScalarFunction, a: f64, b: f64, opts: &TvOptions) -> Result<Vec<Piece>> {
    let n = opts.scan_cells.max(1);
    let grid: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect();
    let slopes = grid.iter().map(|&t| f.slope(t)).collect::<Result<Vec<_>>>()?;
    let mut cuts = vec![a];
    for k in 0..n {
        let (s0, s1) = (slopes[k], slopes[k + 1]);
        if s0 == 0.0 && k > 0 {
            cuts.push(grid[k]);
        } else if s0 * s1 < 0.0 {
            cuts.push(bisect_root(f, grid[k], grid[k + 1], s0, opts.root_tol)?);
        }
    }
    cuts.push(b);
    cuts.dedup_by(|x, y| *x <= *y);
    let mut pieces = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (pa, pb) = (w[0], w[1]);
        let s = f.slope(0.5 * (pa + pb))?;
        let decreasing = if s != 0.0 { s < 0.0 } else { f.eval(pb)? < f.eval(pa)? };
        pieces.push(Piece { a: pa, b: pb, decreasing });
    }
    Ok(pieces)
}

/// Partition sums over `[a, b]`. Cells next to a turning point are bisected
/// until the sum settles; a uniform doubling then checks for features the
/// grid missed, and local refinement resumes if that doubling gains `tol`.
fn partition(f: &ScalarFunction, a: f64, b: f64, opts: &TvOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    if b <= a {
        return Ok((vec![a], vec![f.eval(a)?]));
    }
    let n = opts.scan_cells.max(1);
    let mut xs: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect();
    let mut fs = xs.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
    let sum = |fs: &[f64]| fs.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    let mut total = sum(&fs);
    let min_width = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
    let mut settled = false;
    loop {
        let d: Vec<f64> = fs.windows(2).map(|w| w[1] - w[0]).collect();
        let turn = |k: usize| d[k] * d[k + 1] <= 0.0 && !(d[k] == 0.0 && d[k + 1] == 0.0);
        let wide = |k: usize| xs[k + 1] - xs[k] > min_width;
        let mut marked: Vec<bool> = (0..d.len())
            .map(|k| ((k > 0 && turn(k - 1)) || (k + 1 < d.len() && turn(k))) && wide(k))
            .collect();
        let uniform = settled || !marked.contains(&true);
        if uniform {
            marked = (0..d.len()).map(wide).collect();
            if !marked.contains(&true) {
                return Ok((xs, fs));
            }
        }
        if xs.len() + marked.iter().filter(|&&m| m).count() > opts.max_points {
            return Err(Error::NonConvergence(format!(
                "partition sums on [{a}, {b}] not settled at {} points",
                xs.len()
            )));
        }
        let mut nx = Vec::with_capacity(xs.len() * 2);
        let mut nf = Vec::with_capacity(xs.len() * 2);
        for k in 0..d.len() {
            nx.push(xs[k]);
            nf.push(fs[k]);
            if marked[k] {
                let m = 0.5 * (xs[k] + xs[k + 1]);
                nx.push(m);
                nf.push(f.eval(m)?);
            }
        }
        nx.push(b);
        nf.push(*fs.last().expect("nonempty"));
        xs = nx;
        fs = nf;
        let next = sum(&fs);
        let gain = next - total;
        total = next;
        settled = if uniform {
            if gain < opts.tol {
                return Ok((xs, fs));
            }
            false
        } else {
            gain < opts.tol && missing_estimate(&xs, &fs) < opts.tol
        };
    }
}

fn partition_variation(f: &ScalarFunction, a: f64, b: f64, opts: &TvOptions) -> Result<f64> {
    let (_, fs) = partition(f, a, b, opts)?;
    Ok(fs.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// Slope times width summed over cells next to a turning point: what the
/// partition sum could still be missing there.
fn missing_estimate(xs: &[f64], fs: &[f64]) -> f64 {
    let d: Vec<f64> = fs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope = |k: usize| d[k].abs() / (xs[k + 1] - xs[k]);
    let mut est = 0.0;
    for k in 0..d.len().saturating_sub(1) {
        if d[k] * d[k + 1] <= 0.0 && !(d[k] == 0.0 && d[k + 1] == 0.0) {
            let lip = slope(k).max(slope(k + 1));
            est += lip * (xs[k + 2] - xs[k]);
        }
    }
    est
}

fn variation(f: &ScalarFunction, a: f64, b: f64, opts: &TvOptions) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    if !f.is_smooth() {
        return partition_variation(f, a, b, opts);
    }
    let pieces = monotone_pieces(f, a, b, opts)?;
    let share = opts.tol / pieces.len() as f64;
    pieces.iter().map(|p| piece_variation(f, p.a, p.b, share)).sum()
}

/// Total variation of `f` over `sub`.
pub fn total_variation(f: &ScalarFunction, sub: Interval, opts: &TvOptions) -> Result<f64> {
    f.check_within(sub.lo(), sub.hi())?;
    variation(f, sub.lo(), sub.hi(), opts)
}

/// Cache of per-point values, safe to fill from several threads. Entries are
/// deterministic, so racing writers store the same value.
#[derive(Debug)]
struct Memo<T>(RwLock<HashMap<u64, T>>);

impl<T> Default for Memo<T> {
    fn default() -> Self {
        Self(RwLock::new(HashMap::new()))
    }
}

impl<T: Copy> Memo<T> {
    fn get_or(&self, x: f64, compute: impl FnOnce() -> Result<T>) -> Result<T> {
        let key = x.to_bits();
        if let Some(v) = self.0.read().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = compute()?;
        self.0.write().expect("memo lock").insert(key, v);
        Ok(v)
    }
}

/// A stretch of the domain on which the split is built from one formula,
/// with `f⁺` and `f⁻` at its left end.
#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    plus: f64,
    minus: f64,
    decreasing: bool,
}

/// Jordan split `f = f⁺ + f⁻` on a finite domain.
///
/// Smooth functions are split over their monotone pieces, with `f⁺` inside a
/// piece from [`piece_variation`]. Kinked functions keep the converged
/// partition and treat each cell as monotone.
#[derive(Debug)]
pub struct JordanSplit {
    f: ScalarFunction,
    lo: f64,
    hi: f64,
    opts: TvOptions,
    smooth: bool,
    segments: Vec<Segment>,
    share: f64,
    total: f64,
    parts: Memo<(f64, f64)>,
}

/// Builds the Jordan split, computing the total variation over the whole
/// domain up front (which also checks that it converges).
pub fn jordan_split(f: &ScalarFunction, opts: &TvOptions) -> Result<JordanSplit> {
    let Domain::Finite(d) = f.domain() else {
        return Err(Error::InvalidDomain("Jordan split needs a finite domain".into()));
    };
    let (lo, hi) = (d.lo(), d.hi());
    let smooth = f.is_smooth();
    let mut segments = Vec::new();
    let (mut plus, mut minus) = (0.0, f.eval(lo)?);
    let mut share = opts.tol;
    let mut push = |a: f64, b: f64, fa: f64, fb: f64, v: f64, decreasing: bool| {
        segments.push(Segment { a, b, fa, plus, minus, decreasing });
        plus += v;
        minus += (fb - fa) - v;
    };
    if hi > lo && smooth {
        let raw = monotone_pieces(f, lo, hi, opts)?;
        share = opts.tol / raw.len() as f64;
        for p in raw {
            let v = piece_variation(f, p.a, p.b, share)?;
            let (fa, fb) = (f.eval(p.a)?, f.eval(p.b)?);
            push(p.a, p.b, fa, fb, v, p.decreasing);
        }
    } else if hi > lo {
        let (xs, fs) = partition(f, lo, hi, opts)?;
        for k in 0..xs.len() - 1 {
            push(xs[k], xs[k + 1], fs[k], fs[k + 1], (fs[k + 1] - fs[k]).abs(), fs[k + 1] < fs[k]);
        }
    }
    Ok(JordanSplit { f: f.clone(), lo, hi, opts: *opts, smooth, segments, share, total: plus, parts: Memo::default() })
}

impl JordanSplit {
    pub fn function(&self) -> &ScalarFunction {
        &self.f
    }

    pub fn tolerance(&self) -> f64 {
        self.opts.tol
    }

    /// Total variation over the whole domain.
    pub fn total_variation(&self) -> f64 {
        self.total
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.lo <= x && x <= self.hi {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("{x} outside [{}, {}]", self.lo, self.hi)))
        }
    }

    /// `(f⁺(x), f⁻(x))`. Inside a segment starting at `a`, with `v` the
    /// variation over `[a, x]`, `f⁺` grows by `v` and `f⁻` by
    /// `f(x) - f(a) - v`.
    fn parts(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        if x == self.lo || self.segments.is_empty() {
            return Ok((0.0, self.f.eval(self.lo)?));
        }
        self.parts.get_or(x, || {
            let k = self.segments.partition_point(|s| s.b < x).min(self.segments.len() - 1);
            let s = self.segments[k];
            let d = self.f.eval(x)? - s.fa;
            let v = if self.smooth { piece_variation(&self.f, s.a, x, self.share)? } else { d.abs() };
            Ok((s.plus + v, s.minus + d - v))
        })
    }

    /// `f⁺(x)`: variation over `[lo, x]`.
    pub fn plus(&self, x: f64) -> Result<f64> {
        Ok(self.parts(x)?.0)
    }

    /// `f⁻(x) = f(x) - f⁺(x)`.
    pub fn minus(&self, x: f64) -> Result<f64> {
        Ok(self.parts(x)?.1)
    }

    /// `g(x, y) = f⁺(x) + f⁻(y)`.
    pub fn split_form(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.plus(x)? + self.minus(y)?)
    }

    /// `g(x, y) = f(x) + 2 ∫_y^x |f'| 1{f' < 0}`, integrating only over the
    /// decreasing pieces. Needs the smooth path.
    pub fn integral_form(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        if !self.smooth {
            return Err(Error::InvalidDomain("integral form needs a continuously differentiable function".into()));
        }
        let (a, b, sign) = if y <= x { (y, x, 1.0) } else { (x, y, -1.0) };
        let mut falling = 0.0;
        for p in &self.segments {
            if !p.decreasing || p.b <= a || p.a >= b {
                continue;
            }
            falling += piece_variation(&self.f, p.a.max(a), p.b.min(b), self.share)?;
        }
        Ok(self.f.eval(x)? + 2.0 * sign * falling)
    }

    /// The decomposition `g(x, y)`: integral form when `f` is smooth, split
    /// form otherwise.
    pub fn decomposition(&self, x: f64, y: f64) -> Result<f64> {
        if !self.smooth {
            self.split_form(x, y)
        } else {
            self.integral_form(x, y)
        }
    }

    /// `[g(lo, hi), g(hi, lo)]` over the whole domain.
    pub fn bounds(&self) -> Result<Interval> {
        let (a, b) = (self.decomposition(self.lo, self.hi)?, self.decomposition(self.hi, self.lo)?);
        Interval::new(a.min(b), a.max(b))
    }
}

/// One-shot `g(x, y)` for `f` on its finite domain.
pub fn bv_decomposition_eval(f: &ScalarFunction, x: f64, y: f64, opts: &TvOptions) -> Result<f64> {
    jordan_split(f, opts)?.decomposition(x, y)
}

/// Decomposition `g(x, y) = g1(x) + g2(y) + f(0)` for `f` on the whole real
/// line, glued at 0:
///
/// * `x >= 0`: `g1(x)` is the variation of `f` on `[0, x]`; `x <= 0`:
///   `g1(x) = f(x) - f(0) - V[x, 0]`;
/// * `y >= 0`: `g2(y) = f(y) - f(0) - V[0, y]`; `y <= 0`: `g2(y) = V[y, 0]`.
///
/// `g1` is nondecreasing with `g1(0) = 0`, `g2` nonincreasing with `g2(0) = 0`.
#[derive(Debug)]
pub struct UnboundedDecomposition {
    f: ScalarFunction,
    f0: f64,
    opts: TvOptions,
    var_from_zero: Memo<f64>,
}

impl UnboundedDecomposition {
    pub fn new(f: &ScalarFunction, opts: &TvOptions) -> Result<Self> {
        let f0 = f.eval(0.0)?;
        Ok(Self { f: f.clone(), f0, opts: *opts, var_from_zero: Memo::default() })
    }

    /// Variation between 0 and `x`.
    fn var0(&self, x: f64) -> Result<f64> {
        self.f.check_within(x.min(0.0), x.max(0.0))?;
        self.var_from_zero.get_or(x, || {
            if x >= 0.0 {
                variation(&self.f, 0.0, x, &self.opts)
            } else {
                variation(&self.f, x, 0.0, &self.opts)
            }
        })
    }

    pub fn g1(&self, x: f64) -> Result<f64> {
        if x >= 0.0 {
            self.var0(x)
        } else {
            Ok(self.f.eval(x)? - self.f0 - self.var0(x)?)
        }
    }

    pub fn g2(&self, y: f64) -> Result<f64> {
        if y >= 0.0 {
            Ok(self.f.eval(y)? - self.f0 - self.var0(y)?)
        } else {
            self.var0(y)
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.g1(x)? + self.g2(y)? + self.f0)
    }
}

/// One-shot `g(x, y)` from [`UnboundedDecomposition`].
pub fn unbounded_decomposition(f: &ScalarFunction, x: f64, y: f64, opts: &TvOptions) -> Result<f64> {
    UnboundedDecomposition::new(f, opts)?.eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tv(text: &str, a: f64, b: f64) -> f64 {
        let f = ScalarFunction::parse(text, Domain::Unbounded).unwrap();
        total_variation(&f, Interval::new(a, b).unwrap(), &TvOptions::default()).unwrap()
    }

    #[test]
    fn variation_examples() {
        assert!((tv("sin(x1)", 0.0, 2.0 * PI) - 4.0).abs() < 1e-8);
        assert!((tv("x1^2", -1.0, 1.0) - 2.0).abs() < 1e-8);
        assert_eq!(tv("7", -3.0, 5.0), 0.0);
        assert_eq!(tv("x1", 2.0, 2.0), 0.0);
    }

    #[test]
    fn kinked_functions_use_partitions() {
        let f = ScalarFunction::parse("abs(x1 - 0.3)", Domain::Unbounded).unwrap();
        assert!(!f.is_smooth());
        let v = total_variation(&f, Interval::new(0.0, 1.0).unwrap(), &TvOptions::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        assert!((tv("abs(sin(x1))", 0.0, 2.0 * PI) - 4.0).abs() < 1e-7);
        // Flat, up 0.2, down 0.2, flat, up 0.5.
        assert!((tv("max(x1, 0.5) - min(x1^2, 0.2)", -1.0, 1.0) - 0.9).abs() < 1e-8);
    }

    #[test]
    fn partition_cap_reports_non_convergence() {
        let f = ScalarFunction::parse("abs(sin(40*x1))", Domain::Unbounded).unwrap();
        let opts = TvOptions { scan_cells: 8, max_points: 64, ..TvOptions::default() };
        let r = total_variation(&f, Interval::new(0.0, 3.0).unwrap(), &opts);
        assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    }

    #[test]
    fn sub_interval_must_lie_in_domain() {
        let f = ScalarFunction::on("x1", 0.0, 1.0).unwrap();
        assert!(total_variation(&f, Interval::new(0.5, 2.0).unwrap(), &TvOptions::default()).is_err());
    }

    #[test]
    fn split_examples() {
        let opts = TvOptions::default();
        let id = jordan_split(&ScalarFunction::on("x1", 0.0, 1.0).unwrap(), &opts).unwrap();
        let neg = jordan_split(&ScalarFunction::on("-x1", 0.0, 1.0).unwrap(), &opts).unwrap();
        for x in [0.0, 0.25, 0.5, 1.0] {
            assert!((id.plus(x).unwrap() - x).abs() < 1e-12);
            assert!(id.minus(x).unwrap().abs() < 1e-12);
            assert!((neg.plus(x).unwrap() - x).abs() < 1e-12);
            assert!((neg.minus(x).unwrap() + 2.0 * x).abs() < 1e-12);
        }
        let sq = jordan_split(&ScalarFunction::on("x1^2", -1.0, 1.0).unwrap(), &opts).unwrap();
        assert!((sq.plus(0.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((sq.minus(0.0).unwrap() + 1.0).abs() < 1e-10);
        assert_eq!(sq.plus(-1.0).unwrap(), 0.0);
        assert!(sq.plus(1.5).is_err());
    }

    #[test]
    fn bounds_from_variation() {
        let opts = TvOptions::default();
        // g(x, y) = x - 2y on [0, 1].
        let neg = jordan_split(&ScalarFunction::on("-x1", 0.0, 1.0).unwrap(), &opts).unwrap();
        let b = neg.bounds().unwrap();
        assert!((b.lo() + 2.0).abs() < 1e-9 && (b.hi() - 1.0).abs() < 1e-9, "{b}");
        assert!((neg.decomposition(0.7, 0.2).unwrap() - (0.7 - 0.4)).abs() < 1e-12);

        let sq = jordan_split(&ScalarFunction::on("x1^2", -1.0, 1.0).unwrap(), &opts).unwrap();
        assert!((sq.decomposition(1.0, -1.0).unwrap() - 3.0).abs() < 1e-9);
        assert!((sq.decomposition(-1.0, 1.0).unwrap() + 1.0).abs() < 1e-9);
        // Closed form x^2 - 2 min(x,0)^2 + 2 min(y,0)^2.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (x, y): (f64, f64) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            let want = x * x - 2.0 * x.min(0.0).powi(2) + 2.0 * y.min(0.0).powi(2);
            assert!((sq.decomposition(x, y).unwrap() - want).abs() < 1e-9);
            assert!((sq.split_form(x, y).unwrap() - want).abs() < 1e-9);
        }
        let x = 0.37;
        assert!((bv_decomposition_eval(&ScalarFunction::on("cos(3*x1)", -1.0, 2.0).unwrap(), x, x, &opts).unwrap()
            - (3.0 * x).cos())
        .abs()
            < 1e-12);
    }

    #[test]
    fn kinked_split_uses_split_form() {
        let f = ScalarFunction::on("abs(x1)", -1.0, 1.0).unwrap();
        let s = jordan_split(&f, &TvOptions::default()).unwrap();
        assert!(s.integral_form(0.0, 0.0).is_err());
        assert!((s.total_variation() - 2.0).abs() < 1e-9);
        let b = s.bounds().unwrap();
        assert!((b.lo() + 1.0).abs() < 1e-8 && (b.hi() - 3.0).abs() < 1e-8, "{b}");
    }

    #[test]
    fn whole_line_examples() {
        let f = ScalarFunction::parse("x1*sin(x1)", Domain::Unbounded).unwrap();
        let opts = TvOptions::default();
        let d = UnboundedDecomposition::new(&f, &opts).unwrap();
        assert!((d.g1(FRAC_PI_2).unwrap() - FRAC_PI_2).abs() < 1e-10);
        assert_eq!(d.eval(0.0, 0.0).unwrap(), 0.0);
        for (xm, xp) in [(-0.5, 0.5), (-3.0, 2.0), (-9.5, 7.25)] {
            assert!(d.g1(xm).unwrap() <= 0.0 && 0.0 <= d.g1(xp).unwrap());
            assert!(d.g2(xm).unwrap() >= 0.0 && 0.0 >= d.g2(xp).unwrap());
        }
        // Shifted function: f(0) != 0 is subtracted and re-added.
        let h = ScalarFunction::parse("cos(x1) + 2", Domain::Unbounded).unwrap();
        for x in [-4.0, -1.0, 0.0, 0.3, 5.0] {
            let v = unbounded_decomposition(&h, x, x, &opts).unwrap();
            assert!((v - (x.cos() + 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn memo_is_shared_across_threads() {
        let f = ScalarFunction::on("sin(3*x1)", 0.0, 4.0).unwrap();
        let s = jordan_split(&f, &TvOptions::default()).unwrap();
        let xs: Vec<f64> = (0..64).map(|k| 4.0 * k as f64 / 63.0).collect();
        let serial: Vec<f64> = xs.iter().map(|&x| s.plus(x).unwrap()).collect();
        let parallel: Vec<f64> = std::thread::scope(|sc| {
            let hs: Vec<_> = xs.iter().map(|&x| sc.spawn({ let s = &s; move || s.plus(x).unwrap() })).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert_eq!(serial, parallel);
    }
}
