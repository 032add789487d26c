//! CLI error taxonomy with stable exit codes.

use asymlab_core::Error as CoreError;
use std::fmt;

/// Errors surfaced by the command-line layer, grouped by exit code:
/// 2 = input data, 3 = configuration, 4 = numeric failure.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, malformed, or insufficient input data.
    Input(String),
    /// Invalid flag values or flag combinations.
    Config(String),
    /// The computation itself failed (inconsistent transform, rank
    /// deficiency, nonpositive Fisher information, ...).
    Numeric(String),
}

impl CliError {
    /// Stable process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::ZeroDataRange
            | CoreError::InsufficientSample { .. }
            | CoreError::InvalidSample(_) => CliError::Input(msg),
            CoreError::InvalidConfig(_)
            | CoreError::UnknownFunction(_)
            | CoreError::UnknownCase(_)
            | CoreError::InfeasibleNoise { .. } => CliError::Config(msg),
            CoreError::TransformInconsistency { .. }
            | CoreError::NonFiniteCallback { .. }
            | CoreError::UnnormalizedDensity { .. }
            | CoreError::RankDeficientDesign
            | CoreError::NonPositiveFisher(_) => CliError::Numeric(msg),
        }
    }
}
