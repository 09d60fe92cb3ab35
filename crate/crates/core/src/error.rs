use thiserror::Error;

/// Errors produced by the speed pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input failed validation. `field` names the offending parameter.
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("could not bracket the minimum of k(lambda)/lambda: {0}")]
    Bracket(String),

    /// The counterexample premise inequality does not hold.
    #[error("premise unsatisfiable: {0}")]
    Premise(String),

    #[error("search budget exhausted after {steps} steps: {message}")]
    SearchBudget { steps: usize, message: String, trace: Vec<(f64, f64)> },

    /// The simulated front came too close to the strip boundary.
    #[error("front reached the strip boundary at t = {time} (enlarge the strip)")]
    DomainOverrun { time: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation { field, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
