use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("insufficient smoothness: {0}")]
    InsufficientSmoothness(String),
    #[error("contour violation: {0}")]
    ContourViolation(String),
    #[error("horizon violation: t = {t} exceeds certified horizon {horizon}")]
    HorizonViolation { t: String, horizon: String },
    #[error("budget not met: {0}")]
    BudgetNotMet(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::InsufficientData(_) => "insufficient-data",
            Error::InsufficientSmoothness(_) => "insufficient-smoothness",
            Error::ContourViolation(_) => "contour-violation",
            Error::HorizonViolation { .. } => "horizon-violation",
            Error::BudgetNotMet(_) => "budget-not-met",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
