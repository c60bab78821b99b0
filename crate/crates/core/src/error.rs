use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size too large for lambda = {lambda}: use a step of at most {suggested_step:e}")]
    StepSize { lambda: f64, suggested_step: f64 },

    #[error("eigenvalues not simple: cluster {cluster:?} closer than tolerance {tolerance:e}")]
    SimplicityViolation { cluster: Vec<f64>, tolerance: f64 },

    #[error("found only {found} of {requested} eigenvalues in [{lo}, {hi}]")]
    ScanRange {
        requested: usize,
        found: usize,
        lo: f64,
        hi: f64,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("Picard iteration diverging: increments {increments:?}")]
    Divergence { increments: Vec<f64> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("trace under-resolved: best relative residual {residual:e} exceeds {tolerance:e} with {modes} modes")]
    UnderResolvedTrace {
        residual: f64,
        tolerance: f64,
        modes: usize,
    },

    #[error("initial value is not a generating element for {system}: (a, psi_{mode}) = {value:e} vanishes")]
    Hypothesis {
        system: String,
        mode: usize,
        value: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
