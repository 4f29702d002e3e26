//! Scalar expressions in `x1..xn`: parsing, printing, point and interval
//! evaluation, and symbolic partial derivatives.

mod diff;
mod parse;

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::{BoxDomain, Interval};

pub use parse::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Abs,
    /// `sign(u)` with `sign(0) = 0`. Produced by differentiating `abs`,
    /// `min` and `max`; also accepted by the parser.
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

/// Expression tree. Variables are 1-based: `Var(1)` is `x1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Integer power, exponent stored exactly.
    Pow(Box<Expr>, u32),
}

/// What `eval_interval` does when a divisor interval contains zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivisionMode {
    /// The quotient becomes `[-inf, inf]`.
    #[default]
    Extended,
    /// Evaluation fails with [`Error::Eval`].
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalOptions {
    /// Absolute widening applied to the finished enclosure. Stands in for
    /// outward rounding.
    pub slack: f64,
    pub division: DivisionMode,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self { slack: 1e-12, division: DivisionMode::Extended }
    }
}

impl IntervalOptions {
    pub fn exact() -> Self {
        Self { slack: 0.0, ..Self::default() }
    }
}

impl Expr {
    pub fn var(k: usize) -> Expr {
        Expr::Var(k)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Largest variable index used, 0 for constant expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(k) => *k,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Binary(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// True if the tree contains `abs`, `min`, `max` or `sign`.
    pub fn has_kinks(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Unary(op, a) => matches!(op, UnaryOp::Abs | UnaryOp::Sign) || a.has_kinks(),
            Expr::Pow(a, _) => a.has_kinks(),
            Expr::Binary(op, a, b) => {
                matches!(op, BinaryOp::Min | BinaryOp::Max) || a.has_kinks() || b.has_kinks()
            }
        }
    }

    /// Checks every variable index lies in `1..=n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        fn walk(e: &Expr, n: usize) -> Result<()> {
            match e {
                Expr::Const(_) => Ok(()),
                Expr::Var(k) if *k == 0 || *k > n => Err(Error::Dimension { expected: n, found: *k }),
                Expr::Var(_) => Ok(()),
                Expr::Unary(_, a) | Expr::Pow(a, _) => walk(a, n),
                Expr::Binary(_, a, b) => walk(a, n).and_then(|_| walk(b, n)),
            }
        }
        walk(self, n)
    }

    /// Point evaluation. Fails on division by zero or any non-finite
    /// intermediate value.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(k) => match p.get(k.wrapping_sub(1)) {
                Some(v) => *v,
                None => return Err(Error::Dimension { expected: *k, found: p.len() }),
            },
            Expr::Unary(op, a) => {
                let a = a.eval(p)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sign => sign(a),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(p)?, b.eval(p)?);
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div if b == 0.0 => return Err(Error::Eval("division by zero".into())),
                    BinaryOp::Div => a / b,
                    BinaryOp::Min => a.min(b),
                    BinaryOp::Max => a.max(b),
                }
            }
            Expr::Pow(a, k) => powi(a.eval(p)?, *k),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("non-finite value while evaluating {}", self)))
        }
    }

    /// Natural interval extension over `b`, widened by `opts.slack`.
    pub fn eval_interval(&self, b: &BoxDomain, opts: &IntervalOptions) -> Result<Interval> {
        Ok(self.eval_sides(b.sides(), opts.division)?.widen(opts.slack))
    }

    fn eval_sides(&self, x: &[Interval], division: DivisionMode) -> Result<Interval> {
        let r = match self {
            Expr::Const(c) => Interval::point(*c),
            Expr::Var(k) => match x.get(k.wrapping_sub(1)) {
                Some(v) => *v,
                None => return Err(Error::Dimension { expected: *k, found: x.len() }),
            },
            Expr::Unary(op, a) => {
                let a = a.eval_sides(x, division)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sign => a.sign(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_sides(x, division)?, b.eval_sides(x, division)?);
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => match (a.checked_div(&b), division) {
                        (Some(q), _) => q,
                        (None, DivisionMode::Extended) => Interval::entire(),
                        (None, DivisionMode::Strict) => {
                            return Err(Error::Eval(format!("divisor {} contains zero", b)))
                        }
                    },
                    BinaryOp::Min => a.min(&b),
                    BinaryOp::Max => a.max(&b),
                }
            }
            Expr::Pow(a, k) => a.eval_sides(x, division)?.powi(*k),
        };
        if r.lo().is_nan() || r.hi().is_nan() || (r.lo().is_infinite() && r.lo() == r.hi()) {
            return Err(Error::Eval(format!("overflow while enclosing {}", self)));
        }
        Ok(r)
    }

    /// Partial derivative with respect to `x_j` (1-based), lightly simplified.
    ///
    /// Kinks follow a fixed convention: `d|u| = sign(u) du` with
    /// `sign(0) = 0`, and `d min(u, v)/du` is 1 for `u < v`, 0.5 at a tie and
    /// 0 otherwise (symmetrically for `max`).
    pub fn differentiate(&self, j: usize) -> Expr {
        diff::derivative(self, j)
    }

    /// Replaces every `Var(k)` by `subst(k)`.
    pub fn substitute(&self, subst: &dyn Fn(usize) -> Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(k) => subst(*k),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.substitute(subst))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.substitute(subst)), *k),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.substitute(subst)), Box::new(b.substitute(subst)))
            }
        }
    }

    /// Prints with custom variable names. `Display` uses `x1, x2, ...`.
    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        Printer { expr: self, names }
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

fn powi(v: f64, k: u32) -> f64 {
    match i32::try_from(k) {
        Ok(k) => v.powi(k),
        Err(_) => v.powf(k as f64),
    }
}

// Binding strength used by the printer; mirrors the grammar levels.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => PREC_NEG,
        Expr::Const(_) | Expr::Var(_) => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(..) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_SUM,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_PRODUCT,
        Expr::Binary(BinaryOp::Min | BinaryOp::Max, ..) => PREC_ATOM,
        Expr::Pow(..) => PREC_POW,
    }
}

struct Printer<'a> {
    expr: &'a Expr,
    names: &'a dyn Fn(usize) -> String,
}

impl Printer<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let paren = precedence(e) < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match e {
            Expr::Const(c) => write!(f, "{}", c)?,
            Expr::Var(k) => f.write_str(&(self.names)(*k))?,
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                self.write(f, a, PREC_POW)?;
            }
            Expr::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Abs => "abs",
                    UnaryOp::Sign => "sign",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{}(", name)?;
                self.write(f, a, 0)?;
                f.write_str(")")?;
            }
            Expr::Binary(op @ (BinaryOp::Min | BinaryOp::Max), a, b) => {
                f.write_str(if *op == BinaryOp::Min { "min(" } else { "max(" })?;
                self.write(f, a, 0)?;
                f.write_str(", ")?;
                self.write(f, b, 0)?;
                f.write_str(")")?;
            }
            Expr::Binary(op, a, b) => {
                let (sym, left, right) = match op {
                    BinaryOp::Add => (" + ", PREC_SUM, PREC_PRODUCT),
                    BinaryOp::Sub => (" - ", PREC_SUM, PREC_PRODUCT),
                    BinaryOp::Mul => ("*", PREC_PRODUCT, PREC_NEG),
                    BinaryOp::Div => ("/", PREC_PRODUCT, PREC_NEG),
                    _ => unreachable!(),
                };
                self.write(f, a, left)?;
                f.write_str(sym)?;
                self.write(f, b, right)?;
            }
            Expr::Pow(a, k) => {
                self.write(f, a, PREC_ATOM)?;
                write!(f, "^{}", k)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}

fn default_name(k: usize) -> String {
    format!("x{}", k)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer { expr: self, names: &default_name }.write(f, self, 0)
    }
}
