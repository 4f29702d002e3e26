use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("cannot split axis {axis}: zero width")]
    DegenerateAxis { axis: usize },

    #[error("invalid derivative bounds ({a}, {b}): need a < b and not both infinite")]
    InvalidBounds { a: f64, b: f64 },

    /// 1-based output `i` and variable `j`.
    #[error("unbounded derivative enclosure for df{i}/dx{j}")]
    UnboundedDerivative { i: usize, j: usize },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("state magnitude exceeded {cap:e} at t = {time}")]
    Blowup { time: f64, cap: f64 },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
