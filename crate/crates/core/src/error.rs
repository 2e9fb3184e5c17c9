//! Error types shared across the crate.

/// Unified error type for all numerical routines in this crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {place}: {msg}")]
    Domain { place: &'static str, msg: String },
    /// The requested value diverges (e.g. a series evaluated at its boundary).
    #[error("divergent value in {place}: {msg}")]
    Divergence { place: &'static str, msg: String },
    /// An iteration or series failed to reach the requested accuracy.
    #[error("no convergence in {place}: {msg}")]
    Convergence { place: &'static str, msg: String },
    /// The four strokes of a cycle do not return to the initial state.
    #[error("cycle does not close: {0}")]
    Closure(String),
    /// A cycle with no chemical work intake; efficiency is undefined.
    #[error("degenerate cycle: {0}")]
    Degenerate(String),
    /// Engine inputs that make the finite-time optimisation meaningless.
    #[error("invalid engine inputs: {0}")]
    InvalidEngine(String),
    /// Geometry incompatible with the declared anisotropy regime.
    #[error("geometry outside supported regime: {0}")]
    Regime(String),
    /// A scaling fit could not be performed on the supplied grid.
    #[error("scaling fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(place: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { place, msg: msg.into() }
    }
    pub(crate) fn divergence(place: &'static str, msg: impl Into<String>) -> Self {
        Error::Divergence { place, msg: msg.into() }
    }
    pub(crate) fn convergence(place: &'static str, msg: impl Into<String>) -> Self {
        Error::Convergence { place, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
