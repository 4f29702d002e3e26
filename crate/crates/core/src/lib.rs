//! Decomposition functions for mixed monotone analysis.
//!
//! A function `f` is mixed monotone when some `g(x, y)` is nondecreasing in
//! `x`, nonincreasing in `y` and satisfies `g(x, x) = f(x)`. Given such a `g`,
//! every `f(x)` with `lo <= x <= hi` lies in `[g(lo, hi), g(hi, lo)]`.
//!
//! This crate builds `g` in two ways:
//!
//! * from interval enclosures of the Jacobian ([`jacbounds`], [`decomp`]),
//!   adding linear offsets for sign-unstable partial derivatives;
//! * from the Jordan split of a univariate function of bounded variation
//!   ([`jordan`]).
//!
//! [`embed`] lifts a vector-field decomposition to the `2n`-dimensional
//! embedding system and integrates it into reach tubes. [`expr`] is the
//! expression language every system is written in, and [`cli`] drives the
//! `mixmono` binary.
//!
//! ```
//! use mixmono::{refine_bounds, BoundOptions, BoxDomain, VectorField};
//!
//! let f = VectorField::parse(1, &["x1^2"])?;
//! let b = BoxDomain::from_corners(&[-1.0], &[1.0])?;
//! let exact = BoundOptions { epsilon: 0.0, slack: 0.0 };
//! assert_eq!(refine_bounds(&f, &b, 0, &exact)?[0].to_string(), "[-3, 5]");
//! assert_eq!(refine_bounds(&f, &b, 1, &exact)?[0].to_string(), "[0, 1]");
//! # Ok::<(), mixmono::Error>(())
//! ```

pub mod cli;
pub mod decomp;
pub mod embed;
pub mod error;
pub mod expr;
pub mod interval;
pub mod jacbounds;
pub mod jordan;
mod numfmt;
mod quadrature;

pub use decomp::{
    bound_box, bound_once, build_decomposition, eval_decomposition, refine_bounds, BoundOptions,
    DecompositionSpec, Selector,
};
pub use embed::{
    build_embedding, integrate_embedding, sample_flow, sample_trajectory, time_grid,
    EmbeddingSystem, ReachTube, TubeSample,
};
pub use error::{Error, Result};
pub use expr::{parse, DivisionMode, Expr, IntervalOptions};
pub use interval::{leq_orthant, BoxDomain, Interval};
pub use jacbounds::{classify, jacobian_bounds, JacobianBounds, SignCase, VectorField};
pub use jordan::{
    bv_decomposition_eval, jordan_split, total_variation, unbounded_decomposition, Domain,
    JordanSplit, ScalarFunction, TvOptions, UnboundedDecomposition,
};
pub use cli::{RunConfig, RunOptions};
pub use numfmt::format_sig9;
