use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments outside the documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value left the representable floating range (e.g. exponential overflow).
    #[error("range error at x = {x:?}, t = {t}: {msg}")]
    Range { x: Vec<f64>, t: f64, msg: String },

    /// A numerical routine (quadrature, root bracketing, ...) failed to converge.
    #[error("numeric failure at x = {x:?}, t = {t}: {msg}")]
    Numeric { x: Vec<f64>, t: f64, msg: String },

    /// Sampled convexity in t failed.
    #[error("non-convex integrand: {0}")]
    NonConvex(String),

    /// Evaluation of a DSL expression hit a function-domain violation.
    #[error("{line}:{col}: domain error in `{snippet}`: {msg}")]
    Domain {
        line: usize,
        col: usize,
        snippet: String,
        msg: String,
    },

    /// Syntax or resolution error in a DSL expression.
    #[error("{0}")]
    Parse(#[from] crate::dsl::ParseError),

    /// Config parsing/validation error with its line number.
    #[error("line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Requested parameters are structurally infeasible.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Optimizer failed to make progress.
    #[error("line search failed after {iterations} iterations: {diagnosis}")]
    LineSearch { iterations: usize, diagnosis: String },

    /// Integrand lost convexity inside a solve.
    #[error("non-convexity detected in cell ({i}, {j}) at |Du| = {t}")]
    NonConvexCell { i: usize, j: usize, t: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
