use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypwaveError {
    #[error("pole of the gamma function near {re}{im:+}i")]
    Pole { re: f64, im: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("kernel singularity could not be resolved: {0}")]
    Singularity(String),
    #[error("tail bound exceeds tolerance: {0}")]
    Tail(String),
    #[error("report is not refinement-stable (delta {0:.4} > 0.05)")]
    StaleReport(f64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

impl HypwaveError {
    /// Stable error name used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            HypwaveError::Pole { .. } => "PoleError",
            HypwaveError::Domain(_) => "DomainError",
            HypwaveError::Convergence(_) => "ConvergenceError",
            HypwaveError::Grid(_) => "GridError",
            HypwaveError::Singularity(_) => "SingularityError",
            HypwaveError::Tail(_) => "TailError",
            HypwaveError::StaleReport(_) => "StaleReportError",
            HypwaveError::Hypothesis(_) => "HypothesisError",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HypwaveError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HypwaveError>;
