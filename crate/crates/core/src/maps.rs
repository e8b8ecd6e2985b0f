//! Interval maps generated by a periodic factor sequence.
//!
//! With `g_k(x) = t_k x e^{-x}`, the prefix compositions
//! `h_k = g_k ∘ ... ∘ g_0` and the return map `f = h_{q-1}`, every positive
//! orbit decomposes as `x_{qm+k} = h_k(f^m(x_{-1}))`. The first map applied
//! to `x_{-1}` uses `t_0`, so `h_0(x_{-1}) = x_0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::ParameterCycle;
use crate::error::{Result, RickerError};
use crate::factor::FactorSolution;
use crate::orbit::{iterate_direct, InitialData};

/// `t x e^{-x}`.
#[inline]
pub fn g_eval(t: f64, x: f64) -> f64 {
    t * x * (-x).exp()
}

/// One full period of `g_0, ..., g_{q-1}` bound to its forcing cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedMap {
    cycle: ParameterCycle,
    factor_cycle: Vec<f64>,
}

impl ComposedMap {
    /// Builds a map from explicit factor values `t_0, ..., t_{q-1}`.
    ///
    /// No consistency with `cycle` is enforced, which lets callers build
    /// perturbed maps for negative controls.
    pub fn from_factor_cycle(cycle: ParameterCycle, factor_cycle: Vec<f64>) -> Result<Self> {
        if factor_cycle.is_empty() {
            return Err(RickerError::InvalidArgument("empty factor cycle".into()));
        }
        if factor_cycle.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(RickerError::InvalidArgument(
                "factor values must be positive".into(),
            ));
        }
        Ok(Self {
            cycle,
            factor_cycle,
        })
    }

    pub fn cycle(&self) -> &ParameterCycle {
        &self.cycle
    }

    pub fn factor_cycle(&self) -> &[f64] {
        &self.factor_cycle
    }

    /// Common period `q` of `{a_n}` and `{t_n}`.
    pub fn q(&self) -> usize {
        self.factor_cycle.len()
    }

    /// `h_k(x)` for `0 <= k < q`.
    pub fn prefix(&self, k: usize, x: f64) -> f64 {
        self.factor_cycle[..=k].iter().fold(x, |y, &t| g_eval(t, y))
    }

    /// The return map `f(x) = h_{q-1}(x)`.
    pub fn apply(&self, x: f64) -> f64 {
        self.factor_cycle.iter().fold(x, |y, &t| g_eval(t, y))
    }

    /// `f^m(x)`.
    pub fn iterate(&self, x: f64, m: usize) -> f64 {
        (0..m).fold(x, |y, _| self.apply(y))
    }

    /// Local orbit `y_0 = x, y_{i+1} = g_{i mod q}(y_i)` for `steps` steps.
    pub fn local_orbit(&self, x: f64, steps: usize) -> Vec<f64> {
        let q = self.q();
        let mut out = Vec::with_capacity(steps + 1);
        let mut y = x;
        out.push(y);
        for i in 0..steps {
            y = g_eval(self.factor_cycle[i % q], y);
            out.push(y);
        }
        out
    }
}

/// Builds `f` from a periodic factor solution.
pub fn build_return_map(fs: &FactorSolution) -> Result<ComposedMap> {
    let values = fs.cycle_values().ok_or(RickerError::NotPeriodicFactor {
        sigma: fs.cycle().sigma(),
    })?;
    ComposedMap::from_factor_cycle(fs.cycle().clone(), values.to_vec())
}

/// Outcome of comparing `h_k ∘ f^m(x_{-1})` against direct iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub ok: bool,
    pub max_rel_error: f64,
    /// `(m, k, composed, direct)` at the first index outside tolerance.
    pub first_mismatch: Option<(usize, usize, f64, f64)>,
}

/// Relative tolerance of the orbit decomposition check.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// Checks `x_{qm+k} = h_k(f^m(x_{-1}))` for `0 <= m <= m_max`, `0 <= k < q`.
///
/// The direct orbit starts from `(x_{-1}, x_0) = (x_init, h_0(x_init))`.
pub fn orbit_decomposition_check(
    cm: &ComposedMap,
    x_init: f64,
    m_max: usize,
) -> DecompositionReport {
    orbit_decomposition_check_tol(cm, x_init, m_max, DECOMPOSITION_TOL)
}

pub fn orbit_decomposition_check_tol(
    cm: &ComposedMap,
    x_init: f64,
    m_max: usize,
    tol: f64,
) -> DecompositionReport {
    let q = cm.q();
    let fail = |m, k, c, d| DecompositionReport {
        ok: false,
        max_rel_error: f64::INFINITY,
        first_mismatch: Some((m, k, c, d)),
    };
    let x0 = cm.prefix(0, x_init);
    let initial = match InitialData::new(x_init, x0) {
        Ok(i) => i,
        Err(_) => return fail(0, 0, x0, f64::NAN),
    };
    // indices qm + k run up to q(m_max + 1) - 1
    let last = q * (m_max + 1) - 1;
    let direct = match iterate_direct(cm.cycle(), initial, last.max(1)) {
        Ok(t) => t,
        Err(_) => return fail(0, 0, f64::NAN, f64::NAN),
    };
    let mut max_rel = 0.0f64;
    let mut fm = x_init;
    for m in 0..=m_max {
        for k in 0..q {
            let composed = cm.prefix(k, fm);
            let d = direct.x((q * m + k) as i64);
            let scale = composed.abs().max(d.abs());
            let rel = if scale == 0.0 {
                0.0
            } else {
                (composed - d).abs() / scale
            };
            if !(rel <= tol) {
                return DecompositionReport {
                    ok: false,
                    max_rel_error: rel.max(max_rel),
                    first_mismatch: Some((m, k, composed, d)),
                };
            }
            max_rel = max_rel.max(rel);
        }
        fm = cm.apply(fm);
    }
    DecompositionReport {
        ok: true,
        max_rel_error: max_rel,
        first_mismatch: None,
    }
}

/// A real number stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    /// `-1.0`, `0.0` or `1.0`.
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// `(f^n)'(x0)` through `(y_{nq} / y_0) prod_{i=0}^{nq-1} (1 - y_i)` along the local orbit.
pub fn map_derivative_log(cm: &ComposedMap, x0: f64, n: usize) -> SignedLog {
    let steps = n * cm.q();
    let orbit = cm.local_orbit(x0, steps);
    let mut sign = 1.0;
    let mut ln_abs = orbit[steps].ln() - orbit[0].ln();
    for &y in &orbit[..steps] {
        let factor = 1.0 - y;
        if factor == 0.0 {
            return SignedLog {
                sign: 0.0,
                ln_abs: f64::NEG_INFINITY,
            };
        }
        if factor < 0.0 {
            sign = -sign;
        }
        ln_abs += factor.abs().ln();
    }
    SignedLog { sign, ln_abs }
}

/// `(f^n)'(x0)` as a plain number; may under- or overflow for large `n`.
pub fn map_derivative(cm: &ComposedMap, x0: f64, n: usize) -> f64 {
    map_derivative_log(cm, x0, n).value()
}

/// Stability of a periodic point from its multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

/// Multiplier band treated as inconclusive around `|m| = 1`.
pub const NEUTRAL_BAND: f64 = 1e-9;

impl Stability {
    pub fn from_multiplier(m: f64) -> Self {
        if m.abs() < 1.0 - NEUTRAL_BAND {
            Stability::Stable
        } else if m.abs() > 1.0 + NEUTRAL_BAND {
            Stability::Unstable
        } else {
            Stability::Neutral
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Neutral => "neutral",
        }
    }
}

/// A point of minimal period `omega` of `f` with its multiplier `(f^omega)'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub x: f64,
    pub omega: usize,
    pub multiplier: f64,
    pub stability: Stability,
}

/// Grid used to bracket roots of `f^omega(x) - x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub bisection_iters: usize,
}

impl SearchGrid {
    pub const DEFAULT_LO: f64 = 1e-6;
    pub const DEFAULT_POINTS: usize = 2048;
    pub const DEFAULT_BISECTIONS: usize = 50;

    /// Default grid over `[1e-6, hi]`.
    pub fn up_to(hi: f64) -> Self {
        Self {
            lo: Self::DEFAULT_LO,
            hi,
            points: Self::DEFAULT_POINTS,
            bisection_iters: Self::DEFAULT_BISECTIONS,
        }
    }

    /// Default grid over `(1e-6, e^{sup a - 1}]` for the map's forcing.
    pub fn for_map(cm: &ComposedMap) -> Self {
        Self::up_to(cm.cycle().orbit_bound())
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    /// `points` evenly spaced nodes merged with `points` geometrically spaced ones.
    ///
    /// Periodic points of the return map tend to crowd towards 0, where the even
    /// spacing alone lumps several roots into one bracket.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.points.max(2);
        let step = (self.hi - self.lo) / (n - 1) as f64;
        let ratio = (self.hi / self.lo).ln() / (n - 1) as f64;
        let mut xs: Vec<f64> = (0..n)
            .map(|i| self.lo + step * i as f64)
            .chain((1..n - 1).map(|i| self.lo * (ratio * i as f64).exp()))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }
}

/// Points closer than this to a root of lower period are discarded.
pub const DIVISOR_FILTER_TOL: f64 = 1e-8;

/// Roots of `f^omega(x) - x` bracketed on `grid` and refined by bisection.
fn raw_roots(cm: &ComposedMap, omega: usize, grid: &SearchGrid) -> Vec<f64> {
    let residual = |x: f64| cm.iterate(x, omega) - x;
    let xs = grid.nodes();
    let n = xs.len();
    let fx: Vec<f64> = xs.par_iter().map(|&x| residual(x)).collect();
    let mut roots: Vec<f64> = (0..n - 1)
        .into_par_iter()
        .filter_map(|i| {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let (mut fa, fb) = (fx[i], fx[i + 1]);
            if fa == 0.0 {
                return Some(a);
            }
            if fb == 0.0 || fa.signum() == fb.signum() {
                return None;
            }
            for _ in 0..grid.bisection_iters {
                let mid = 0.5 * (a + b);
                let fm = residual(mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            Some(0.5 * (a + b))
        })
        .collect();
    if fx[n - 1] == 0.0 {
        roots.push(xs[n - 1]);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Periodic points of `f` with minimal period `omega`, ascending in `x`.
pub fn find_periodic_points(
    cm: &ComposedMap,
    omega: usize,
    grid: &SearchGrid,
) -> Vec<PeriodicPoint> {
    if omega == 0 {
        return Vec::new();
    }
    let lower: Vec<f64> = (1..omega)
        .filter(|d| omega % d == 0)
        .flat_map(|d| raw_roots(cm, d, grid))
        .collect();
    raw_roots(cm, omega, grid)
        .into_iter()
        .filter(|x| lower.iter().all(|r| (r - x).abs() > DIVISOR_FILTER_TOL))
        .map(|x| {
            let multiplier = map_derivative(cm, x, omega);
            PeriodicPoint {
                x,
                omega,
                multiplier,
                stability: Stability::from_multiplier(multiplier),
            }
        })
        .collect()
}

/// Which half of the orbit an invariant interval refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsequence {
    /// `y_n = x_{2n}`, driven by `a_{2n+1}` and `t_{2n+1}`.
    EvenIndexed,
    /// `z_n = x_{2n-1}`, driven by `a_{2n}` and `t_{2n}`.
    OddIndexed,
}

impl Subsequence {
    /// Offsets `(a index, t index)` at subsequence step `n`.
    fn driver(&self, n: usize) -> usize {
        match self {
            Subsequence::EvenIndexed => 2 * n + 1,
            Subsequence::OddIndexed => 2 * n,
        }
    }
}

/// Attracting invariant interval `[alpha, beta]` for one parity subsequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantInterval {
    pub alpha: f64,
    pub beta: f64,
    pub x_star: f64,
    pub gamma_bound: f64,
    pub rho: f64,
}

/// Bisection tolerance for the comparison-map fixed point.
pub const X_STAR_TOL: f64 = 1e-12;

impl InvariantInterval {
    /// Builds the interval from `rho = inf a_n`, `beta` and `gamma`.
    pub fn from_bounds(rho: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 2.0) {
            return Err(RickerError::RhoOutOfRange { rho });
        }
        let h = |x: f64| rho - x - gamma * x * (-x).exp();
        // h(0) = rho > 0, h(rho) = -gamma rho e^{-rho} < 0
        let (mut lo, mut hi) = (0.0, rho);
        while hi - lo > X_STAR_TOL {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x_star = 0.5 * (lo + hi);
        let cmp = |x: f64| x * (rho - x - gamma * x * (-x).exp()).exp();
        let alpha = x_star.min(cmp(beta)).min(cmp(1.0));
        Ok(Self {
            alpha,
            beta,
            x_star,
            gamma_bound: gamma,
            rho,
        })
    }

    /// The comparison map `x e^{rho - x - gamma x e^{-x}}`.
    pub fn comparison_map(&self, x: f64) -> f64 {
        x * (self.rho - x - self.gamma_bound * x * (-x).exp()).exp()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.alpha && x <= self.beta
    }
}

/// Interval for the selected parity subsequence.
///
/// Requires `inf a_n` in `(0, 2)` and a bounded factor subsequence
/// (`t_{2n+1}` for even-indexed terms, `t_{2n}` for odd-indexed terms).
pub fn invariant_interval(
    cycle: &ParameterCycle,
    fs: &FactorSolution,
    subsequence: Subsequence,
) -> Result<InvariantInterval> {
    let rho = cycle.inf_a();
    if !(rho > 0.0 && rho < 2.0) {
        return Err(RickerError::RhoOutOfRange { rho });
    }
    let sup_t = subsequence_sup(fs, subsequence)?;
    InvariantInterval::from_bounds(rho, cycle.orbit_bound(), sup_t + 1.0)
}

/// `sup` of the factor subsequence that drives `subsequence`.
fn subsequence_sup(fs: &FactorSolution, subsequence: Subsequence) -> Result<f64> {
    use crate::factor::ParityClass::*;
    let p = fs.cycle().period();
    let span = match fs.parity_class() {
        OddPeriodic2p | OddPeriodicP | EvenPeriodicP => fs.period().unwrap_or(p),
        // t_{2n} decays when sigma < 0, t_{2n+1} decays when sigma > 0;
        // the sup of a decaying subsequence sits in its first forcing period.
        EvenUnboundedNeg if subsequence == Subsequence::OddIndexed => p,
        EvenUnboundedPos if subsequence == Subsequence::EvenIndexed => p,
        _ => return Err(RickerError::UnboundedSubsequence),
    };
    Ok((0..span)
        .map(|n| fs.t(subsequence.driver(n)))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// One step of the parity subsequence at phase `n`:
/// `u -> u e^{a_j - u - t_j u e^{-u}}` with `j = 2n+1` (even-indexed) or `j = 2n` (odd-indexed).
pub fn parity_step(fs: &FactorSolution, subsequence: Subsequence, n: usize, u: f64) -> f64 {
    let j = subsequence.driver(n);
    let a = fs.cycle().a(j);
    let t = fs.t(j);
    u * (a - u - t * u * (-u).exp()).exp()
}

/// Number of subsequence steps after which `(a_j, t_j)` repeat, when `{t_n}` is periodic.
pub fn parity_phase_period(fs: &FactorSolution) -> Option<usize> {
    fs.period().map(|q| if q % 2 == 0 { q / 2 } else { q })
}
