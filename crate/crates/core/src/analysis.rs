//! Orbit post-processing: cycle detection, even-period limit cycles,
//! boundary solutions, first-order Ricker cycles and basin scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::ParameterCycle;
use crate::error::{Result, RickerError};
use crate::factor::SIGMA_ZERO_TOL;
use crate::orbit::{iterate_direct, InitialData, OrbitSource, OrbitTrace};

/// A parity subsequence whose window maximum falls below this is treated as zero.
pub const BOUNDARY_DECAY_THRESHOLD: f64 = 1e-12;
/// Matching tolerance for deduplicating cycles.
pub const CYCLE_MATCH_TOL: f64 = 1e-6;

/// Parameters for [`detect_cycle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectParams {
    pub burn_in: usize,
    pub window: usize,
    pub max_period: usize,
    pub tol: f64,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            burn_in: 50_000,
            window: 1_000,
            max_period: 100,
            tol: 1e-8,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 * self.max_period {
            return Err(RickerError::WindowBelowPeriod {
                window: self.window,
                max_period: self.max_period,
            });
        }
        if self.max_period == 0 {
            return Err(RickerError::InvalidArgument(
                "max_period must be positive".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(RickerError::InvalidArgument(format!(
                "bad tolerance {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// Steps needed for a trace to cover burn-in and window.
    pub fn steps(&self) -> usize {
        self.burn_in + self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleClass {
    ConvergedToCycle,
    BoundaryDecay,
    NonPeriodicUpToBound,
}

impl CycleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CycleClass::ConvergedToCycle => "ConvergedToCycle",
            CycleClass::BoundaryDecay => "BoundaryDecay",
            CycleClass::NonPeriodicUpToBound => "NonPeriodicUpToBound",
        }
    }
}

/// Numerical verdict on the tail of a trace.
///
/// `NonPeriodicUpToBound` only means no period up to `max_period` fit the
/// window at tolerance `tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub classification: CycleClass,
    pub period: Option<usize>,
    /// One period of the tail, starting at orbit index `phase_start`.
    pub cycle_values: Option<Vec<f64>>,
    pub phase_start: i64,
    /// Largest deviation `|x_{n+period} - x_n| / (1 + |x_n|)` over the window
    /// (best candidate period when none fits).
    pub residual: f64,
    pub steps_used: usize,
    pub max_period: usize,
    pub window: usize,
}

fn shift_residual(w: &[f64], period: usize) -> f64 {
    w.iter()
        .zip(&w[period..])
        .map(|(a, b)| (b - a).abs() / (1.0 + a.abs()))
        .fold(0.0, f64::max)
}

/// Smallest period `r <= max_period` with `|x_{n+r} - x_n| <= tol (1 + |x_n|)` on the window.
pub fn detect_cycle(trace: &OrbitTrace, params: &DetectParams) -> Result<CycleReport> {
    params.validate()?;
    let len = trace.len();
    if len < params.burn_in + params.window || params.window == 0 {
        return Err(RickerError::WindowTooShort {
            len,
            burn_in: params.burn_in,
            window: params.window,
        });
    }
    let start = len - params.window;
    let w = &trace.samples[start..];
    let mut best = f64::INFINITY;
    let mut period = None;
    for r in 1..=params.max_period {
        let res = shift_residual(w, r);
        if res <= params.tol {
            period = Some((r, res));
            break;
        }
        best = best.min(res);
    }
    // sample index i sits at orbit index n = i + 1
    let (mut max_even, mut max_odd) = (0.0f64, 0.0f64);
    for (i, &x) in w.iter().enumerate() {
        if (start + i + 1) % 2 == 0 {
            max_even = max_even.max(x.abs());
        } else {
            max_odd = max_odd.max(x.abs());
        }
    }
    let decayed = max_even < BOUNDARY_DECAY_THRESHOLD || max_odd < BOUNDARY_DECAY_THRESHOLD;
    let (classification, residual, period, cycle_values, phase_start) = match period {
        Some((r, res)) => {
            let values = w[params.window - r..].to_vec();
            let class = if decayed {
                CycleClass::BoundaryDecay
            } else {
                CycleClass::ConvergedToCycle
            };
            (class, res, Some(r), Some(values), (len - r + 1) as i64)
        }
        None => {
            let class = if decayed {
                CycleClass::BoundaryDecay
            } else {
                CycleClass::NonPeriodicUpToBound
            };
            (class, best, None, None, 0)
        }
    };
    Ok(CycleReport {
        classification,
        period,
        cycle_values,
        phase_start,
        residual,
        steps_used: len,
        max_period: params.max_period,
        window: params.window,
    })
}

fn close_mixed(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Smallest, over cyclic rotations of `b`, of the largest elementwise gap to `a`.
/// `None` when the lengths differ.
pub fn rotation_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let n = a.len();
    (0..n)
        .map(|r| {
            a.iter()
                .enumerate()
                .map(|(i, x)| (x - b[(i + r) % n]).abs())
                .fold(0.0, f64::max)
        })
        .min_by(f64::total_cmp)
}

/// True when `a` and `b` agree up to a cyclic rotation within mixed tolerance `tol`.
pub fn cycles_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    (0..n).any(|r| {
        a.iter()
            .enumerate()
            .all(|(i, &x)| close_mixed(x, b[(i + r) % n], tol))
    })
}

/// Rotation of `values` that starts at its largest element.
pub fn canonical_rotation(values: &[f64]) -> Vec<f64> {
    let Some(lead) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
    else {
        return Vec::new();
    };
    values[lead..]
        .iter()
        .chain(&values[..lead])
        .copied()
        .collect()
}

/// Verdict for an even-period orbit with `sigma != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenVerdict {
    /// Parity of the vanishing half: `1` for odd-indexed terms (`sigma > 0`), `0` for even-indexed.
    pub vanishing_parity: usize,
    pub vanishing_max: f64,
    /// Minimal period of the surviving subsequence (in subsequence steps).
    pub surviving_period: Option<usize>,
    /// `p/2` consecutive surviving values from the window tail.
    pub surviving_values: Vec<f64>,
    pub cycle_sum: f64,
    pub target_sum: f64,
    /// Overall period of the limit cycle, `2 * surviving_period`.
    pub global_period: Option<usize>,
    /// Set when the `(0, 2)` hypothesis on the driving half of `a_n` fails.
    pub advisory: Option<String>,
    pub passed: bool,
}

/// Checks the tail of `trace` against the globally attracting `p`-cycle that
/// has one parity class vanishing and the other summing to the matching half of `a_n`.
pub fn verify_even_limit_cycle(
    cycle: &ParameterCycle,
    trace: &OrbitTrace,
    tol: f64,
) -> Result<EvenVerdict> {
    let p = cycle.period();
    if p % 2 != 0 {
        return Err(RickerError::InvalidArgument(
            "forcing period must be even".into(),
        ));
    }
    let sigma = cycle.sigma();
    if sigma.abs() <= SIGMA_ZERO_TOL {
        return Err(RickerError::InvalidArgument("sigma must be nonzero".into()));
    }
    let half = p / 2;
    // sigma > 0: odd-indexed x vanish, even-indexed x follow u_{n+1} = u_n e^{a_{2n+1} - u_n}
    // sigma < 0: even-indexed x vanish, odd-indexed x follow w_{n+1} = w_n e^{a_{2n+2} - w_n}
    let (vanishing_parity, driving_offset) = if sigma > 0.0 { (1, 1) } else { (0, 0) };
    let driving: Vec<f64> = (0..half).map(|k| cycle.a(2 * k + driving_offset)).collect();
    let advisory = (!driving.iter().all(|&a| a > 0.0 && a < 2.0)).then(|| {
        RickerError::HypothesisViolation(format!("driving forcing {driving:?} not inside (0, 2)"))
            .to_string()
    });
    let target_sum: f64 = driving.iter().sum();

    let len = trace.len();
    let window = (len.min(1000) / p) * p;
    if window < 2 * p {
        return Err(RickerError::WindowTooShort {
            len,
            burn_in: 0,
            window: 2 * p,
        });
    }
    let start = len - window;
    let (mut vanishing_max, mut surviving) = (0.0f64, Vec::with_capacity(window / 2));
    for n in (start + 1)..=len {
        let x = trace.x(n as i64);
        if n % 2 == vanishing_parity {
            vanishing_max = vanishing_max.max(x.abs());
        } else {
            surviving.push(x);
        }
    }
    let surviving_period = (1..=half).find(|&r| {
        surviving
            .iter()
            .zip(&surviving[r..])
            .all(|(a, b)| (b - a).abs() <= tol * (1.0 + a.abs()))
    });
    let surviving_values = surviving[surviving.len() - half..].to_vec();
    let cycle_sum: f64 = surviving_values.iter().sum();
    let passed = vanishing_max < BOUNDARY_DECAY_THRESHOLD
        && surviving_period.is_some_and(|r| half % r == 0)
        && (cycle_sum - target_sum).abs() <= tol;
    Ok(EvenVerdict {
        vanishing_parity,
        vanishing_max,
        surviving_period,
        surviving_values,
        cycle_sum,
        target_sum,
        global_period: surviving_period.map(|r| 2 * r),
        advisory,
        passed,
    })
}

/// Outcome of iterating `y_{n+1} = y_n e^{alpha_n - y_n}` to its attracting cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SackerRecord {
    /// `y*_0, ..., y*_{q-1}`, aligned with `alpha_0, ..., alpha_{q-1}`.
    pub cycle_values: Vec<f64>,
    pub sum: f64,
    pub target_sum: f64,
    pub sum_matches: bool,
}

/// Tolerance on `sum y* = sum alpha`.
pub const SACKER_SUM_TOL: f64 = 1e-8;
const SACKER_CYCLE_TOL: f64 = 1e-12;

/// [`sacker_check_from`] started at `y_0 = 1`.
pub fn sacker_check(alpha: &[f64], n_steps: usize) -> Result<SackerRecord> {
    sacker_check_from(alpha, 1.0, n_steps)
}

/// Iterates the first-order periodic Ricker equation and checks the cycle sum identity.
pub fn sacker_check_from(alpha: &[f64], y0: f64, n_steps: usize) -> Result<SackerRecord> {
    let q = alpha.len();
    if q == 0 {
        return Err(RickerError::EmptyCycle);
    }
    if !alpha.iter().all(|&a| a > 0.0 && a < 2.0) {
        return Err(RickerError::HypothesisViolation(format!(
            "alpha values must lie in (0, 2): {alpha:?}"
        )));
    }
    if !(y0.is_finite() && y0 > 0.0) {
        return Err(RickerError::InvalidArgument(format!(
            "y0 must be positive, got {y0}"
        )));
    }
    // run a whole number of periods, then one more to compare against
    let periods = (n_steps / q).max(2);
    let mut y = y0;
    let mut last = vec![0.0; q];
    let mut prev = vec![0.0; q];
    for _ in 0..periods {
        std::mem::swap(&mut last, &mut prev);
        for (k, &a) in alpha.iter().enumerate() {
            last[k] = y;
            y *= (a - y).exp();
        }
    }
    let converged = last
        .iter()
        .zip(&prev)
        .all(|(a, b)| (a - b).abs() <= SACKER_CYCLE_TOL * (1.0 + a.abs()));
    if !converged {
        return Err(RickerError::NoConvergence { steps: periods * q });
    }
    let sum: f64 = last.iter().sum();
    let target_sum: f64 = alpha.iter().sum();
    Ok(SackerRecord {
        cycle_values: last,
        sum,
        target_sum,
        sum_matches: (sum - target_sum).abs() <= SACKER_SUM_TOL,
    })
}

/// Which parity class of a boundary solution is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryParity {
    /// `x_{2n+1} = 0`, `x_{2n} = u_n` with `u_{n+1} = u_n e^{a_{2n+1} - u_n}`.
    /// Starts from `(x_{-1}, x_0) = (0, u_0)`.
    OddZero,
    /// `x_{2n} = 0`, `x_{2n-1} = w_n` with `w_{n+1} = w_n e^{a_{2n} - w_n}`.
    /// Starts from `(x_{-1}, x_0) = (u_0, 0)`.
    EvenZero,
}

impl BoundaryParity {
    pub fn initial(&self, u0: f64) -> Result<InitialData> {
        match self {
            BoundaryParity::OddZero => InitialData::boundary(0.0, u0),
            BoundaryParity::EvenZero => InitialData::boundary(u0, 0.0),
        }
    }

    fn zero_parity(&self) -> usize {
        match self {
            BoundaryParity::OddZero => 1,
            BoundaryParity::EvenZero => 0,
        }
    }
}

/// Boundary solution built from the first-order Ricker recursion of its nonzero half.
pub fn boundary_orbit(
    cycle: &ParameterCycle,
    u0: f64,
    parity: BoundaryParity,
    n_steps: usize,
) -> Result<OrbitTrace> {
    if !(u0.is_finite() && u0 > 0.0) {
        return Err(RickerError::InvalidInitial(format!(
            "u0 must be positive, got {u0}"
        )));
    }
    if n_steps == 0 {
        return Err(RickerError::InvalidArgument(
            "n_steps must be at least 1".into(),
        ));
    }
    let initial = parity.initial(u0)?;
    let zero = parity.zero_parity();
    let mut samples = Vec::with_capacity(n_steps);
    let mut u = u0;
    for n in 1..=n_steps {
        if n % 2 == zero {
            samples.push(0.0);
        } else {
            // x_n = x_{n-2} e^{a_{n-1} - x_{n-2}}
            u *= (cycle.a(n - 1) - u).exp();
            if !u.is_finite() {
                return Err(RickerError::NonFiniteState { step: n });
            }
            samples.push(u);
        }
    }
    let source = match parity {
        BoundaryParity::OddZero => OrbitSource::BoundaryOdd,
        BoundaryParity::EvenZero => OrbitSource::BoundaryEven,
    };
    Ok(OrbitTrace {
        initial,
        samples,
        source,
    })
}

/// Bit-for-bit comparison of [`boundary_orbit`] with direct iteration from the same pair.
pub fn boundary_matches_direct(
    cycle: &ParameterCycle,
    u0: f64,
    parity: BoundaryParity,
    n_steps: usize,
) -> Result<bool> {
    let b = boundary_orbit(cycle, u0, parity, n_steps)?;
    let d = iterate_direct(cycle, b.initial, n_steps)?;
    Ok(b.samples
        .iter()
        .zip(&d.samples)
        .all(|(x, y)| x.to_bits() == y.to_bits()))
}

/// One axis of a basin scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite() && self.count >= 1) {
            return Err(RickerError::InvalidArgument(format!(
                "{name} axis needs 0 < lo < hi and count >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// Grid of initial pairs for a multistability scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub x_prev_range: AxisRange,
    pub x_curr_range: AxisRange,
    pub cycle: ParameterCycle,
    pub params: DetectParams,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        self.x_prev_range.validate("x_prev")?;
        self.x_curr_range.validate("x_curr")?;
        self.params.validate()
    }
}

/// One scanned initial pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinCell {
    pub initial: (f64, f64),
    pub report: CycleReport,
    pub cycle_id: usize,
}

/// A distinct attractor found by a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleEntry {
    pub id: usize,
    pub classification: CycleClass,
    pub period: Option<usize>,
    /// Canonical rotation (largest value first); empty for nonperiodic cells.
    pub values: Vec<f64>,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinScan {
    pub cells: Vec<BasinCell>,
    pub cycles: Vec<CycleEntry>,
}

/// Scans the grid row-major (`x_prev` outer, `x_curr` inner), one cycle report per cell.
///
/// Cells are computed in parallel; cycle ids follow first occurrence in row-major order.
/// All nonperiodic cells share one table entry.
pub fn basin_scan(grid: &ScanGrid) -> Result<BasinScan> {
    grid.validate()?;
    let (rows, cols) = (grid.x_prev_range.count, grid.x_curr_range.count);
    let pairs: Vec<(f64, f64)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| (grid.x_prev_range.point(i), grid.x_curr_range.point(j)))
        .collect();
    let reports: Vec<CycleReport> = pairs
        .par_iter()
        .map(|&(xp, xc)| {
            let init = InitialData::new(xp, xc)?;
            let trace = iterate_direct(&grid.cycle, init, grid.params.steps())?;
            detect_cycle(&trace, &grid.params)
        })
        .collect::<Result<_>>()?;

    let mut cycles: Vec<CycleEntry> = Vec::new();
    let mut cells = Vec::with_capacity(reports.len());
    for (initial, report) in pairs.into_iter().zip(reports) {
        let id = match &report.cycle_values {
            Some(values) => cycles.iter().position(|c| {
                c.period == report.period && cycles_match(&c.values, values, CYCLE_MATCH_TOL)
            }),
            None => cycles.iter().position(|c| c.period.is_none()),
        };
        let id = match id {
            Some(id) => id,
            None => {
                cycles.push(CycleEntry {
                    id: cycles.len(),
                    classification: report.classification,
                    period: report.period,
                    values: report
                        .cycle_values
                        .as_deref()
                        .map(canonical_rotation)
                        .unwrap_or_default(),
                    cells: 0,
                });
                cycles.len() - 1
            }
        };
        cycles[id].cells += 1;
        cells.push(BasinCell {
            initial,
            report,
            cycle_id: id,
        });
    }
    Ok(BasinScan { cells, cycles })
}
