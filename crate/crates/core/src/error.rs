use thiserror::Error;

/// Errors raised by the analysis engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RickerError {
    #[error("parameter cycle is empty")]
    EmptyCycle,
    #[error("parameter cycle is not minimal: it repeats with period {divisor}")]
    NonMinimalPeriod { divisor: usize },
    #[error("parameter value a[{index}] = {value} is not finite")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
    #[error("invalid initial data: {0}")]
    InvalidInitial(String),
    #[error("factor sequence is not periodic (even period with sigma = {sigma})")]
    NotPeriodicFactor { sigma: f64 },
    #[error("inf a_n = {rho} lies outside (0, 2)")]
    RhoOutOfRange { rho: f64 },
    #[error("selected factor subsequence is unbounded")]
    UnboundedSubsequence,
    #[error("trace of length {len} is too short for burn-in {burn_in} and window {window}")]
    WindowTooShort {
        len: usize,
        burn_in: usize,
        window: usize,
    },
    #[error("window {window} must be at least twice the largest probed period {max_period}")]
    WindowBelowPeriod { window: usize, max_period: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("no convergence to a cycle within {steps} steps")]
    NoConvergence { steps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, RickerError>;
