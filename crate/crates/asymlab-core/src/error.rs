//! Error type shared by the whole estimator stack.

use alloc::string::String;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failures raised by grid construction, density synthesis, inference,
/// the function catalog, and the diagnostic.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// All sample values are identical; no grid can be built.
    #[error("zero data range: all sample values are equal")]
    ZeroDataRange,
    /// Fewer observations than the operation can work with.
    #[error("insufficient sample: got {got}, need at least {need}")]
    InsufficientSample { got: usize, need: usize },
    /// Sample contains NaN or infinite entries, or paired lengths differ.
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    /// The synthesized raw density does not integrate to 1 within 1e-6.
    #[error("transform inconsistency: raw density integrates to {integral}")]
    TransformInconsistency { integral: f64 },
    /// Configuration value outside its documented domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Catalog lookup with an id that is not registered.
    #[error("unknown generative function id: {0}")]
    UnknownFunction(String),
    /// Closed-form registry lookup with an unregistered case.
    #[error("unknown analytic case: {0}")]
    UnknownCase(String),
    /// Noise configuration with no achievable (variance, correlation).
    #[error("infeasible noise configuration: variance {variance}, correlation {correlation}")]
    InfeasibleNoise { variance: f64, correlation: f64 },
    /// A user-supplied callback returned NaN or an infinity.
    #[error("non-finite callback value at {at}")]
    NonFiniteCallback { at: f64 },
    /// A supplied density does not integrate to 1 within tolerance.
    #[error("density is not normalized: integral {integral}")]
    UnnormalizedDensity { integral: f64 },
    /// Spline design matrix is rank deficient even after deduplication.
    #[error("rank-deficient spline design")]
    RankDeficientDesign,
    /// Fisher information must be strictly positive for the noise bound.
    #[error("nonpositive Fisher information: {0}")]
    NonPositiveFisher(f64),
}
