use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid network specification: {0}")]
    Spec(String),

    #[error("network has no states")]
    EmptyNetwork,

    #[error("grid does not cover the support: estimated tail mass {tail:.3e} exceeds tolerance {tolerance:.1e}")]
    Coverage { tail: f64, tolerance: f64 },

    #[error("window leakage: endpoint magnitude {ratio:.3e} of the peak exceeds threshold {threshold:.1e}")]
    Leakage { ratio: f64, threshold: f64 },

    #[error("singular linear system at omega = {omega}")]
    Singular { omega: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("infeasible window: {0}")]
    InfeasibleWindow(String),

    #[error("transmission vanishes inside the target support near omega = {omega}")]
    BandGap { omega: f64 },

    #[error("target phase is not smooth near t = {time}")]
    Smoothness { time: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("series truncation did not converge: achieved tail bound {achieved:.3e}, requested {requested:.1e}")]
    Truncation { achieved: f64, requested: f64 },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: parameters, grids, specifications.
    Config,
    /// Well-formed input with no solution.
    Infeasible,
    /// The numerics could not meet their tolerances.
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parameter(_) | Error::Grid(_) | Error::Spec(_) | Error::EmptyNetwork | Error::Smoothness { .. } => {
                ErrorClass::Config
            }
            Error::Infeasible(_) | Error::InfeasibleWindow(_) | Error::BandGap { .. } => ErrorClass::Infeasible,
            Error::Coverage { .. }
            | Error::Leakage { .. }
            | Error::Singular { .. }
            | Error::Numeric(_)
            | Error::Truncation { .. } => ErrorClass::Numeric,
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Grid(_) => "grid",
            Error::Spec(_) => "spec",
            Error::EmptyNetwork => "empty_network",
            Error::Coverage { .. } => "coverage",
            Error::Leakage { .. } => "leakage",
            Error::Singular { .. } => "singular",
            Error::Infeasible(_) => "infeasible",
            Error::InfeasibleWindow(_) => "infeasible_window",
            Error::BandGap { .. } => "band_gap",
            Error::Smoothness { .. } => "smoothness",
            Error::Numeric(_) => "numeric",
            Error::Truncation { .. } => "truncation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
