//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by operator construction, numerics, and experiment plumbing.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation that needs genuine coordinates was asked for on a torus.
    #[error("unsupported on a periodic box: {0}")]
    PeriodicUnsupported(&'static str),

    /// Two operators on different boxes were combined.
    #[error("box mismatch: left has {left} sites, right has {right} sites")]
    BoxMismatch { left: usize, right: usize },

    /// A problem size exceeds a configured limit.
    #[error("capacity: {what} = {got} exceeds limit {cap}")]
    CapacityExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    /// An iterative routine ran out of iterations; the last iterate is carried
    /// so callers can judge how far off it was.
    #[error("{what} did not converge after {iterations} iterations (last iterate {last_value})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_value: f64,
    },

    /// A Weyl vector placement request that no plateau can host.
    #[error("no plateau cube can host window halfwidth {requested}; largest feasible is {max_feasible}")]
    Placement {
        requested: i64,
        max_feasible: i64,
    },

    /// Config parsing or validation failure; all problems are listed at once.
    #[error("invalid config:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
