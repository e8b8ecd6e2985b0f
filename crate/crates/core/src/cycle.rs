//! Periodic forcing sequences `a_0, ..., a_{p-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RickerError};

/// One full period of the forcing sequence, with minimal period `p`.
///
/// The sequence is read periodically: `a_n = values[n mod p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterCycle {
    values: Vec<f64>,
    sigma: f64,
    sup_a: f64,
    inf_a: f64,
}

impl ParameterCycle {
    /// Validates `values` and derives `sigma`, `sup a_n` and `inf a_n`.
    ///
    /// Rejects empty input, non-finite entries and cycles whose minimal
    /// period is a proper divisor of `values.len()`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RickerError::EmptyCycle);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RickerError::NonFiniteValue { index, value });
        }
        if let Some(divisor) = collapsing_divisor(&values) {
            return Err(RickerError::NonMinimalPeriod { divisor });
        }
        let sigma = alternating_sum(&values);
        let sup_a = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inf_a = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            values,
            sigma,
            sup_a,
            inf_a,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimal period `p`.
    pub fn period(&self) -> usize {
        self.values.len()
    }

    /// `sigma = -a_0 + a_1 - a_2 + ... + (-1)^p a_{p-1}`, summed left to right.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sup_a(&self) -> f64 {
        self.sup_a
    }

    pub fn inf_a(&self) -> f64 {
        self.inf_a
    }

    pub fn is_odd(&self) -> bool {
        self.period() % 2 == 1
    }

    /// `a_n` for any `n >= 0`.
    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        self.values[n % self.values.len()]
    }

    /// Upper bound `e^{sup a - 1}` on every positive orbit from index 1 on.
    pub fn orbit_bound(&self) -> f64 {
        (self.sup_a - 1.0).exp()
    }

    /// The same sequence read from `a_k`: `values[(k + i) mod p]`.
    pub fn rotated(&self, k: usize) -> Self {
        let p = self.values.len();
        let values = (0..p).map(|i| self.values[(k + i) % p]).collect();
        Self::new(values).expect("rotation of a valid cycle")
    }
}

fn alternating_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (i, &a) in values.iter().enumerate() {
        // j = i + 1, sign (-1)^j
        if i % 2 == 0 {
            sum -= a;
        } else {
            sum += a;
        }
    }
    sum
}

/// Smallest proper divisor `d` of `len` with `values[i] == values[i mod d]` for all `i`.
fn collapsing_divisor(values: &[f64]) -> Option<usize> {
    let p = values.len();
    (1..p)
        .filter(|d| p % d == 0)
        .find(|&d| values.iter().enumerate().all(|(i, &v)| v == values[i % d]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_of_paper_cycles() {
        let c = ParameterCycle::new(vec![1.0, 1.9, 0.8]).unwrap();
        assert_eq!(c.period(), 3);
        assert!((c.sigma() - 0.1).abs() < 1e-15);
        assert_eq!(c.sigma(), -1.0 + 1.9 - 0.8);

        let c = ParameterCycle::new(vec![2.0]).unwrap();
        assert_eq!(c.period(), 1);
        assert_eq!(c.sigma(), -2.0);

        let c = ParameterCycle::new(vec![1.4, 1.8, 1.6, 0.3]).unwrap();
        assert_eq!(c.period(), 4);
        assert!((c.sigma() + 0.9).abs() < 1e-15);
        assert_eq!(c.sup_a(), 1.8);
        assert_eq!(c.inf_a(), 0.3);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ParameterCycle::new(vec![]), Err(RickerError::EmptyCycle));
        assert_eq!(
            ParameterCycle::new(vec![1.0, 2.0, 1.0, 2.0]),
            Err(RickerError::NonMinimalPeriod { divisor: 2 })
        );
        assert_eq!(
            ParameterCycle::new(vec![1.0, 1.0]),
            Err(RickerError::NonMinimalPeriod { divisor: 1 })
        );
        assert!(matches!(
            ParameterCycle::new(vec![1.0, f64::NAN]),
            Err(RickerError::NonFiniteValue { index: 1, .. })
        ));
    }

    #[test]
    fn periodic_lookup() {
        let c = ParameterCycle::new(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.a(0), 1.0);
        assert_eq!(c.a(4), 2.0);
        assert_eq!(c.a(8), 4.0);
        assert!((c.orbit_bound() - 3f64.exp()).abs() < 1e-12);
        assert_eq!(c.rotated(1).values(), &[2.0, 4.0, 1.0]);
        assert_eq!(c.rotated(3), c);
    }
}
