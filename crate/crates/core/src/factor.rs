//! The factor equation `t_{n+1} = e^{a_n} / t_n` and the factored orbit path.
//!
//! Every orbit with positive initial data splits into the factor sequence
//! `t_n = x_n / (x_{n-1} e^{-x_{n-1}})` and the cofactor recursion
//! `x_{n+1} = t_{n+1} x_n e^{-x_n}`. The factor sequence has the closed form
//! `t_n = t_0^{(-1)^n} e^{(-1)^n s_n}` with `s_n = sum_{j=1..n} (-1)^j a_{j-1}`.
//!
//! All evaluation happens in log space: `ln t_n = (-1)^n (ln t_0 + s_n)`.
//! For odd `p` the partial sums repeat with period `2p`; for even `p` they
//! drift by `sigma` per forcing period, `s_n = d_n sigma + gamma_n`.

use serde::{Deserialize, Serialize};

use crate::cycle::ParameterCycle;
use crate::error::{Result, RickerError};
use crate::orbit::{InitialData, OrbitSource, OrbitTrace};

/// Absolute tolerance deciding `sigma == 0` for even periods.
pub const SIGMA_ZERO_TOL: f64 = 1e-12;
/// Relative tolerance deciding `t_0 == e^{-sigma/2}` for odd periods.
pub const BOUNDARY_T0_TOL: f64 = 1e-12;

/// Qualitative type of the factor sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityClass {
    /// Odd `p`, generic `t_0`: period `2p`.
    OddPeriodic2p,
    /// Odd `p`, `t_0 = e^{-sigma/2}`: period `p`.
    OddPeriodicP,
    /// Even `p`, `sigma = 0`: period `p`.
    EvenPeriodicP,
    /// Even `p`, `sigma > 0`: `t_{2m} -> inf`, `t_{2m+1} -> 0`.
    EvenUnboundedPos,
    /// Even `p`, `sigma < 0`: `t_{2m} -> 0`, `t_{2m+1} -> inf`.
    EvenUnboundedNeg,
}

impl ParityClass {
    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            ParityClass::OddPeriodic2p | ParityClass::OddPeriodicP | ParityClass::EvenPeriodicP
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ParityClass::OddPeriodic2p => "OddPeriodic2p",
            ParityClass::OddPeriodicP => "OddPeriodicP",
            ParityClass::EvenPeriodicP => "EvenPeriodicP",
            ParityClass::EvenUnboundedPos => "EvenUnboundedPos",
            ParityClass::EvenUnboundedNeg => "EvenUnboundedNeg",
        }
    }
}

/// Closed-form description of one factor sequence `{t_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSolution {
    cycle: ParameterCycle,
    ln_t0: f64,
    parity_class: ParityClass,
    /// `s_0 = 0, s_1, ..., s_{L-1}` with `L = 2p` (odd) or `L = p` (even).
    partial: Vec<f64>,
    /// Drift of `s_n` per forcing period used by the closed form.
    drift: f64,
    cycle_values: Option<Vec<f64>>,
}

/// Alternating partial sum `s_n = sum_{j=1..n} (-1)^j a_{j-1}`, summed left to right.
pub fn s_partial(cycle: &ParameterCycle, n: usize) -> f64 {
    let mut s = 0.0;
    for j in 1..=n {
        let a = cycle.a(j - 1);
        if j % 2 == 1 {
            s -= a;
        } else {
            s += a;
        }
    }
    s
}

fn partial_table(cycle: &ParameterCycle, len: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(len);
    let mut s = 0.0;
    table.push(s);
    for j in 1..len {
        let a = cycle.a(j - 1);
        if j % 2 == 1 {
            s -= a;
        } else {
            s += a;
        }
        table.push(s);
    }
    table
}

fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Classifies the factor sequence started at `t0 > 0`.
pub fn classify(cycle: &ParameterCycle, t0: f64) -> Result<FactorSolution> {
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(RickerError::InvalidArgument(format!(
            "t0 must be positive, got {t0}"
        )));
    }
    classify_ln(cycle, t0.ln())
}

/// Same as [`classify`] with `ln t_0` given directly.
pub fn classify_ln(cycle: &ParameterCycle, ln_t0: f64) -> Result<FactorSolution> {
    if !ln_t0.is_finite() {
        return Err(RickerError::InvalidArgument(format!(
            "ln t0 must be finite, got {ln_t0}"
        )));
    }
    let p = cycle.period();
    let sigma = cycle.sigma();
    let (parity_class, partial, drift) = if cycle.is_odd() {
        let boundary = (-sigma / 2.0).exp();
        let t0 = ln_t0.exp();
        let class = if (t0 - boundary).abs() <= BOUNDARY_T0_TOL * boundary {
            ParityClass::OddPeriodicP
        } else {
            ParityClass::OddPeriodic2p
        };
        (class, partial_table(cycle, 2 * p), 0.0)
    } else if sigma.abs() <= SIGMA_ZERO_TOL {
        (ParityClass::EvenPeriodicP, partial_table(cycle, p), 0.0)
    } else if sigma > 0.0 {
        (
            ParityClass::EvenUnboundedPos,
            partial_table(cycle, p),
            sigma,
        )
    } else {
        (
            ParityClass::EvenUnboundedNeg,
            partial_table(cycle, p),
            sigma,
        )
    };
    let mut fs = FactorSolution {
        cycle: cycle.clone(),
        ln_t0,
        parity_class,
        partial,
        drift,
        cycle_values: None,
    };
    if let Some(q) = fs.period() {
        fs.cycle_values = Some((0..q).map(|n| fs.t(n)).collect());
    }
    Ok(fs)
}

impl FactorSolution {
    /// Classification of the factor sequence from a positive initial pair.
    pub fn from_initial(cycle: &ParameterCycle, initial: &InitialData) -> Result<Self> {
        let ln_t0 = initial.ln_t0().ok_or_else(|| {
            RickerError::InvalidInitial("factor needs positive initial data".into())
        })?;
        classify_ln(cycle, ln_t0)
    }

    pub fn cycle(&self) -> &ParameterCycle {
        &self.cycle
    }

    pub fn t0(&self) -> f64 {
        self.ln_t0.exp()
    }

    pub fn ln_t0(&self) -> f64 {
        self.ln_t0
    }

    pub fn parity_class(&self) -> ParityClass {
        self.parity_class
    }

    /// Period `q` of `{t_n}`, or `None` for unbounded classes.
    pub fn period(&self) -> Option<usize> {
        let p = self.cycle.period();
        match self.parity_class {
            ParityClass::OddPeriodic2p => Some(2 * p),
            ParityClass::OddPeriodicP | ParityClass::EvenPeriodicP => Some(p),
            _ => None,
        }
    }

    /// `t_0, ..., t_{q-1}` for periodic classes.
    pub fn cycle_values(&self) -> Option<&[f64]> {
        self.cycle_values.as_deref()
    }

    /// `s_n` evaluated through the periodic reduction (odd `p`) or
    /// `d_n sigma + gamma_n` (even `p`).
    pub fn s(&self, n: usize) -> f64 {
        let len = self.partial.len();
        let r = n % len;
        if self.drift == 0.0 {
            self.partial[r]
        } else {
            self.drifting_sum(0.0, n)
        }
    }

    /// `base + d_n sigma + gamma_n`, with `d_n sigma` expanded over the `a_j`
    /// and summed with compensation so rounding is not scaled by `d_n`.
    fn drifting_sum(&self, base: f64, n: usize) -> f64 {
        let len = self.partial.len();
        let d = (n / len) as f64;
        // each product split into its rounded value and exact rounding error
        let terms = self.cycle.values().iter().enumerate().flat_map(|(j, &a)| {
            let a = if j % 2 == 0 { -a } else { a };
            let prod = a * d;
            [prod, a.mul_add(d, -prod)]
        });
        neumaier_sum([base, self.partial[n % len]].into_iter().chain(terms))
    }

    /// `ln t_n = (-1)^n (ln t_0 + s_n)`.
    pub fn ln_t(&self, n: usize) -> f64 {
        let v = if self.drift == 0.0 {
            self.ln_t0 + self.s(n)
        } else {
            self.drifting_sum(self.ln_t0, n)
        };
        if n % 2 == 0 {
            v
        } else {
            -v
        }
    }

    /// `t_n`; may be `+inf` or `0.0` for unbounded classes at large `n`.
    pub fn t(&self, n: usize) -> f64 {
        self.ln_t(n).exp()
    }

    /// `t_n` with an explicit overflow signal.
    pub fn t_closed_form(&self, n: usize) -> TValue {
        let ln = self.ln_t(n);
        let v = ln.exp();
        if v.is_infinite() {
            TValue::Overflow {
                ln_t: ln,
                class: self.parity_class,
            }
        } else {
            TValue::Finite(v)
        }
    }

    /// Largest relative deviation of `t_{n+1} t_n` from `e^{a_n}` for `n < n_max`,
    /// measured in log space so unbounded sequences stay representable.
    pub fn identity_residual(&self, n_max: usize) -> f64 {
        (0..n_max)
            .map(|n| {
                let delta = self.ln_t(n + 1) + self.ln_t(n) - self.cycle.a(n);
                delta.exp_m1().abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Result of a closed-form evaluation of `t_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TValue {
    Finite(f64),
    Overflow { ln_t: f64, class: ParityClass },
}

impl TValue {
    pub fn value(&self) -> f64 {
        match self {
            TValue::Finite(v) => *v,
            TValue::Overflow { .. } => f64::INFINITY,
        }
    }
}

/// Iterates the factor and cofactor equations from a positive pair.
///
/// `ln t_{n+1}` comes from the closed form and `ln x_{n+1} = ln t_{n+1} + ln x_n - x_n`,
/// so samples that underflow to zero do not stop the recursion.
pub fn iterate_factored(
    cycle: &ParameterCycle,
    initial: InitialData,
    n_steps: usize,
) -> Result<OrbitTrace> {
    if n_steps == 0 {
        return Err(RickerError::InvalidArgument(
            "n_steps must be at least 1".into(),
        ));
    }
    let fs = FactorSolution::from_initial(cycle, &initial)?;
    let mut samples = Vec::with_capacity(n_steps);
    let mut x = initial.x_curr;
    let mut ln_x = x.ln();
    for n in 0..n_steps {
        ln_x = fs.ln_t(n + 1) + ln_x - x;
        x = ln_x.exp();
        if !x.is_finite() || ln_x.is_nan() {
            return Err(RickerError::NonFiniteState { step: n + 1 });
        }
        samples.push(x);
    }
    Ok(OrbitTrace {
        initial,
        samples,
        source: OrbitSource::Factored,
    })
}
