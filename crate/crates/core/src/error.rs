use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    /// The saddle-point iteration did not settle within the iteration budget.
    #[error(
        "fixed-point iteration for beta = {beta} did not converge after {iterations} iterations \
         (last a = {last_a}, |delta a| = {residual})"
    )]
    NonConvergence {
        beta: f64,
        iterations: u32,
        last_a: f64,
        residual: f64,
    },

    /// Exhaustive enumeration refused because the instance is too large.
    #[error("{users} users exceeds the exhaustive-enumeration limit of {limit}")]
    Resource { users: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix or codeword entry is not ±1, or matrix invariants fail.
    #[error("malformed input: {0}")]
    Malformed(&'static str),

    /// A valid-codeword count of zero. Unreachable for a correct counter.
    #[error("nonpositive codeword count {0}")]
    EmptyCodebook(u64),
}
