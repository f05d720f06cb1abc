use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Physics,
    Convergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("separation class undefined for non-compact support")]
    NonCompactSupport,

    #[error("distributional form implemented for massless only")]
    MassiveDistributional,

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: {message} (best value {best}, error estimate {estimate:.3e})"
    )]
    Quadrature {
        message: String,
        best: Complex64,
        estimate: f64,
    },

    #[error("ladder divergent (rungs: {rungs:?})")]
    LadderDivergent { rungs: Vec<(f64, Complex64)> },

    #[error("nonphysical P_e: {0}")]
    NonphysicalPe(f64),

    #[error("nonphysical parameter set: {0}")]
    NonphysicalParams(String),

    #[error("channel parameters nonphysical for this input: {0}")]
    NonphysicalOutput(String),

    #[error("Kraus radicand negative: {0}")]
    KrausRadicand(String),

    #[error("degenerate Kraus denominator: {0}")]
    KrausDegenerate(String),

    #[error("perturbative state invalid at this alpha (min eigenvalue {min_eigenvalue:.3e})")]
    PerturbativeState { min_eigenvalue: f64 },

    #[error("threshold formula outside validity: {0}")]
    ThresholdValidity(String),

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("optimizer did not converge (best value {best})")]
    Optimizer { best: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidScenario(_) | Error::Config { .. } => ErrorKind::Config,
            Error::Quadrature { .. } | Error::LadderDivergent { .. } | Error::Optimizer { .. } => {
                ErrorKind::Convergence
            }
            _ => ErrorKind::Physics,
        }
    }
}
