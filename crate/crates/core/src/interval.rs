//! Closed intervals over the extended reals, boxes, and the positive-orthant
//! order.
//!
//! Arithmetic is the textbook natural extension with round-to-nearest
//! endpoints. Soundness against rounding is handled by widening finished
//! enclosures (see [`crate::expr::IntervalOptions::slack`]), not here.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::numfmt::format_sig9;

/// A closed interval `[lo, hi]` with endpoints in the extended reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`. Rejects NaN, `lo > hi`, and the two degenerate
    /// infinite intervals `[-inf, -inf]`, `[inf, inf]`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidDomain("NaN endpoint".into()));
        }
        if lo > hi {
            return Err(Error::InvalidDomain(format!("lo {} > hi {}", lo, hi)));
        }
        if lo.is_infinite() && lo == hi {
            return Err(Error::InvalidDomain(format!("[{lo}, {hi}] is empty over the reals")));
        }
        Ok(Self { lo, hi })
    }

    /// Constructor for callers that already hold the invariant.
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "raw interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn entire() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_entire(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// `[lo - by, hi + by]`.
    pub fn widen(&self, by: f64) -> Interval {
        Interval { lo: self.lo - by, hi: self.hi + by }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Image under `sign` with `sign(0) = 0`.
    pub fn sign(&self) -> Interval {
        Interval { lo: sign(self.lo), hi: sign(self.hi) }
    }

    pub fn exp(&self) -> Interval {
        Interval { lo: self.lo.exp(), hi: self.hi.exp() }
    }

    pub fn sin(&self) -> Interval {
        periodic_range(self, f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(&self) -> Interval {
        periodic_range(self, f64::cos, 0.0, PI)
    }

    /// Integer power. Even exponents use the tight rule, so `[-1, 1]^2`
    /// is `[0, 1]` rather than `[-1, 1]`.
    pub fn powi(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        let a = pow(self.lo, k);
        let b = pow(self.hi, k);
        if k % 2 == 1 || self.lo >= 0.0 {
            Interval { lo: a, hi: b }
        } else if self.hi <= 0.0 {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: 0.0, hi: a.max(b) }
        }
    }

    /// Division. `None` when the divisor contains zero.
    pub fn checked_div(&self, rhs: &Interval) -> Option<Interval> {
        if rhs.contains(0.0) {
            return None;
        }
        Some(*self * Interval { lo: 1.0 / rhs.hi, hi: 1.0 / rhs.lo })
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn pow(v: f64, k: u32) -> f64 {
    match i32::try_from(k) {
        Ok(k) => v.powi(k),
        Err(_) => v.powf(k as f64),
    }
}

/// Whether `[lo, hi]` contains some `phase + 2k*pi`.
fn hits(lo: f64, hi: f64, phase: f64) -> bool {
    let k = ((lo - phase) / TAU).ceil();
    phase + k * TAU <= hi
}

/// Range of a 2*pi-periodic function whose maxima sit at `peak + 2k*pi`
/// and minima at `trough + 2k*pi`, with extreme values +1 and -1.
fn periodic_range(x: &Interval, f: fn(f64) -> f64, peak: f64, trough: f64) -> Interval {
    if !x.is_finite() || x.width() >= TAU {
        return Interval { lo: -1.0, hi: 1.0 };
    }
    let (a, b) = (f(x.lo), f(x.hi));
    let hi = if hits(x.lo, x.hi, peak) { 1.0 } else { a.max(b) };
    let lo = if hits(x.lo, x.hi, trough) { -1.0 } else { a.min(b) };
    Interval { lo, hi }
}

/// `0 * inf` is taken as 0, the usual convention for interval products.
fn mul_endpoints(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            mul_endpoints(self.lo, rhs.lo),
            mul_endpoints(self.lo, rhs.hi),
            mul_endpoints(self.hi, rhs.lo),
            mul_endpoints(self.hi, rhs.hi),
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_sig9(self.lo), format_sig9(self.hi))
    }
}

/// `p ⪯ q` in the positive-orthant order: componentwise `<=`.
pub fn leq_orthant(p: &[f64], q: &[f64]) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::Dimension { expected: p.len(), found: q.len() });
    }
    Ok(p.iter().zip(q).all(|(a, b)| a <= b))
}

/// A box `{x : lower ⪯ x ⪯ upper}` with finite bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    sides: Vec<Interval>,
}

impl BoxDomain {
    pub fn new(sides: Vec<Interval>) -> Result<Self> {
        if let Some((k, s)) = sides.iter().enumerate().find(|(_, s)| !s.is_finite()) {
            return Err(Error::InvalidDomain(format!("x{} = {} is not finite", k + 1, s)));
        }
        Ok(Self { sides })
    }

    /// Box with corners `lower` and `upper`.
    pub fn from_corners(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension { expected: lower.len(), found: upper.len() });
        }
        let sides = lower
            .iter()
            .zip(upper)
            .map(|(&a, &b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sides)
    }

    pub fn point(p: &[f64]) -> Result<Self> {
        Self::from_corners(p, p)
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn side(&self, axis: usize) -> Interval {
        self.sides[axis]
    }

    /// The corner of lows.
    pub fn lower(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::lo).collect()
    }

    /// The corner of highs.
    pub fn upper(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::hi).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.sides.iter().zip(p).all(|(s, &v)| s.contains(v))
    }

    /// Index of the widest side; ties go to the lowest index.
    pub fn widest_axis(&self) -> usize {
        let mut best = 0;
        for (k, s) in self.sides.iter().enumerate() {
            if s.width() > self.sides[best].width() {
                best = k;
            }
        }
        best
    }

    /// Bisects along `axis` (0-based) at the midpoint.
    pub fn split(&self, axis: usize) -> Result<(BoxDomain, BoxDomain)> {
        if axis >= self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: axis + 1 });
        }
        let side = self.sides[axis];
        if side.width() <= 0.0 {
            return Err(Error::DegenerateAxis { axis });
        }
        let m = side.mid();
        let mut left = self.sides.clone();
        let mut right = self.sides.clone();
        left[axis] = Interval::raw(side.lo, m);
        right[axis] = Interval::raw(m, side.hi);
        Ok((BoxDomain { sides: left }, BoxDomain { sides: right }))
    }

    pub fn hull(&self, other: &BoxDomain) -> Result<BoxDomain> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        Ok(BoxDomain {
            sides: self.sides.iter().zip(&other.sides).map(|(a, b)| a.hull(b)).collect(),
        })
    }

    /// All `2^n` corners, lowest index varying fastest.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|k| if mask >> k & 1 == 1 { self.sides[k].hi } else { self.sides[k].lo })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.sides.iter().enumerate() {
            if k > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}
