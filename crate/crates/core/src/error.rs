use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument {arg} is outside the domain ({reason})")]
    Domain {
        func: &'static str,
        arg: f64,
        reason: &'static str,
    },

    #[error("{func}: series did not converge within {terms} terms")]
    Convergence { func: &'static str, terms: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("root solver: {0}")]
    Solver(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("degenerate variance for sub-interval {interval}, release index {release}")]
    DegenerateVariance { interval: usize, release: usize },

    #[error(
        "output alphabet has {size} symbols, above the cap of {cap}; \
         use fewer receiver sub-intervals or a coarser truncation"
    )]
    AlphabetTooLarge { size: u64, cap: u64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(
        "Blahut-Arimoto did not converge in {iterations} iterations (last gap {gap:.3e} nats)"
    )]
    NonConvergence { iterations: usize, gap: f64 },
}

impl Error {
    /// True for failures caused by the problem instance (constraints that
    /// cannot be met, degenerate channels) rather than by numerics.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_) | Error::DegenerateVariance { .. } | Error::InvalidParameter(_)
        )
    }
}
