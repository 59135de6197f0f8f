use thiserror::Error;

/// Errors produced by the decomposition toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A problem or algorithm was configured inconsistently.
    #[error("configuration error: {0}")]
    Config(String),
    /// The fitness-evaluation budget ran out.
    #[error("evaluation budget exhausted after {fes_used} evaluations")]
    BudgetExhausted { fes_used: u64 },
    /// A least-squares fit could not be computed.
    #[error("fit error: {0}")]
    Fit(String),
    /// A serialized document could not be parsed or written.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExhausted { .. })
    }
}
