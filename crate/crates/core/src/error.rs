//! Error type shared across the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building states or running protocols.
#[derive(Debug, Error)]
pub enum Error {
    /// Supplied amplitudes or coefficients do not have unit norm.
    #[error("not normalized: squared norm is {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    /// A structurally invalid argument: duplicate mode labels, wrong
    /// occupancy for a single-mode operation, and the like.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A projection selected nothing; the branch carries zero probability.
    #[error("branch has zero probability")]
    EmptyBranch,

    /// Coefficients for which the requested quantity is undefined
    /// (for example an ancilla that would need 0/0 amplitudes).
    #[error("degenerate coefficients: {0}")]
    DegenerateInput(String),
}
