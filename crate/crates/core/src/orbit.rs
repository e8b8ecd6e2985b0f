//! Direct second-order iteration of `x_{n+1} = x_{n-1} e^{a_n - x_{n-1} - x_n}`.
//!
//! Index convention shared by every module: the orbit starts from
//! `(x_{-1}, x_0)`, and producing `x_{n+1}` consumes `a_n` with
//! `a_n = values[n mod p]`. The first computed term is therefore
//! `x_1 = x_{-1} e^{a_0 - x_{-1} - x_0}`, which matches the factor
//! recursion `t_1 = e^{a_0} / t_0`.

use serde::{Deserialize, Serialize};

use crate::cycle::ParameterCycle;
use crate::error::{Result, RickerError};

/// Initial pair `(x_{-1}, x_0)`.
///
/// Positive pairs are the generic case. Pairs with exactly one zero
/// coordinate start boundary solutions, whose zero slots persist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub x_prev: f64,
    pub x_curr: f64,
}

impl InitialData {
    /// Positive initial pair.
    pub fn new(x_prev: f64, x_curr: f64) -> Result<Self> {
        if !(x_prev.is_finite() && x_curr.is_finite() && x_prev > 0.0 && x_curr > 0.0) {
            return Err(RickerError::InvalidInitial(format!(
                "expected positive finite pair, got ({x_prev}, {x_curr})"
            )));
        }
        Ok(Self { x_prev, x_curr })
    }

    /// Non-negative pair; zeros allowed.
    pub fn boundary(x_prev: f64, x_curr: f64) -> Result<Self> {
        if !(x_prev.is_finite() && x_curr.is_finite() && x_prev >= 0.0 && x_curr >= 0.0) {
            return Err(RickerError::InvalidInitial(format!(
                "expected non-negative finite pair, got ({x_prev}, {x_curr})"
            )));
        }
        Ok(Self { x_prev, x_curr })
    }

    /// Pair with prescribed factor value: `x_0 = t_0 x_{-1} e^{-x_{-1}}`.
    pub fn from_t0(x_prev: f64, t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(RickerError::InvalidInitial(format!(
                "t0 must be positive, got {t0}"
            )));
        }
        Self::new(x_prev, t0 * x_prev * (-x_prev).exp())
    }

    pub fn is_positive(&self) -> bool {
        self.x_prev > 0.0 && self.x_curr > 0.0
    }

    /// `t_0 = x_0 / (x_{-1} e^{-x_{-1}})`; `None` unless both coordinates are positive.
    pub fn t0(&self) -> Option<f64> {
        self.is_positive()
            .then(|| self.x_curr / (self.x_prev * (-self.x_prev).exp()))
    }

    /// `ln t_0`, computed without forming `e^{-x_{-1}}`.
    pub fn ln_t0(&self) -> Option<f64> {
        self.is_positive()
            .then(|| self.x_curr.ln() - self.x_prev.ln() + self.x_prev)
    }
}

/// Which iteration path produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitSource {
    Direct,
    Factored,
    BoundaryEven,
    BoundaryOdd,
}

impl OrbitSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitSource::Direct => "direct",
            OrbitSource::Factored => "factored",
            OrbitSource::BoundaryEven => "boundary_even",
            OrbitSource::BoundaryOdd => "boundary_odd",
        }
    }
}

/// A finite trajectory `x_1, ..., x_N` together with its initial pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub initial: InitialData,
    pub samples: Vec<f64>,
    pub source: OrbitSource,
}

impl OrbitTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `x_n` for `-1 <= n <= N`.
    pub fn x(&self, n: i64) -> f64 {
        match n {
            -1 => self.initial.x_prev,
            0 => self.initial.x_curr,
            n if n >= 1 => self.samples[(n - 1) as usize],
            _ => panic!("orbit index {n} out of range"),
        }
    }

    /// The full sequence `x_{-1}, x_0, x_1, ..., x_N`.
    pub fn with_initial(&self) -> Vec<f64> {
        let mut all = Vec::with_capacity(self.samples.len() + 2);
        all.push(self.initial.x_prev);
        all.push(self.initial.x_curr);
        all.extend_from_slice(&self.samples);
        all
    }
}

/// One step: returns `x_{n-1} e^{a_n - x_{n-1} - x_n}`.
///
/// Exactly `0.0` whenever `x_prev == 0`, which keeps boundary zeros
/// absorbing even if the exponential would overflow.
#[inline]
pub fn step_direct(x_prev: f64, x_curr: f64, a_n: f64) -> Result<f64> {
    if x_prev.is_nan() || x_curr.is_nan() || a_n.is_nan() {
        return Err(RickerError::NonFiniteState { step: 0 });
    }
    if x_prev == 0.0 {
        return Ok(0.0);
    }
    Ok(x_prev * (a_n - x_prev - x_curr).exp())
}

/// Iterates `n_steps` times from `initial`, returning `x_1..x_{n_steps}`.
pub fn iterate_direct(
    cycle: &ParameterCycle,
    initial: InitialData,
    n_steps: usize,
) -> Result<OrbitTrace> {
    if n_steps == 0 {
        return Err(RickerError::InvalidArgument(
            "n_steps must be at least 1".into(),
        ));
    }
    let mut samples = Vec::with_capacity(n_steps);
    let (mut prev, mut curr) = (initial.x_prev, initial.x_curr);
    for n in 0..n_steps {
        let next = step_direct(prev, curr, cycle.a(n))
            .map_err(|_| RickerError::NonFiniteState { step: n + 1 })?;
        if !next.is_finite() {
            return Err(RickerError::NonFiniteState { step: n + 1 });
        }
        samples.push(next);
        prev = curr;
        curr = next;
    }
    Ok(OrbitTrace {
        initial,
        samples,
        source: OrbitSource::Direct,
    })
}
