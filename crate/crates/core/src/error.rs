use thiserror::Error;

/// Errors produced by game construction, integration, and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("malformed game spec: {0}")]
    MalformedSpec(String),

    #[error("game expectation must be positive, got E = {0}")]
    NonPositiveExpectation(f64),

    #[error("profit function is constant almost everywhere")]
    ConstantProfit,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("series term at index {index} exceeds the declared geometric envelope")]
    TailBoundViolated { index: u32 },

    #[error("target growth {target} is outside the attainable range (supremum {cap})")]
    TargetOutOfRange { target: f64, cap: f64 },

    #[error("expectation is infinite; an expectation-based price does not exist")]
    InfiniteExpectation,

    #[error("game is not effective; the limit expectation of growth rate is not finite")]
    IneffectiveGame,
}

impl Error {
    /// True for errors caused by inputs outside an operation's domain.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::MalformedSpec(_)
                | Error::NonPositiveExpectation(_)
                | Error::ConstantProfit
                | Error::Domain(_)
                | Error::TargetOutOfRange { .. }
                | Error::InfiniteExpectation
                | Error::IneffectiveGame
        )
    }

    /// True for errors caused by numeric machinery (tolerances not met).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure(_) | Error::TailBoundViolated { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
