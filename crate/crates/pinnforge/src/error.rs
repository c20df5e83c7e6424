//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Exact-solution query landed exactly on an advection jump line x = 1 + t.
    #[error("exact solution is discontinuous at x = 1 + t (x = {x}, t = {t})")]
    DiscontinuityPoint { x: f64, t: f64 },

    /// No interior-grid factorization reaches the requested collocation count.
    #[error("no uniform grid with {requested} interior points; closest achievable is {achieved}")]
    GridInfeasible { requested: usize, achieved: usize },

    /// Relative L2 error is undefined because the exact solution has zero norm.
    #[error("relative L2 error undefined: exact solution has zero norm on the test grid")]
    ZeroNorm,

    /// Regression needs at least 3 finite, positive (loss, error) pairs.
    #[error("insufficient data: {got} usable trials, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    /// Every trial of every option diverged, so no selection can be made.
    #[error("all {0} trials diverged; cannot select")]
    AllDiverged(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
