//! Reproduction checks for the odd/even period dichotomy.
//!
//! Each check returns a [`CriterionResult`] with the measured quantity, the
//! expected value and the tolerance it was held to. `ricker verify` and the
//! `acceptance` test target both run this list.
//!
//! The trajectory figures for `a = (1, 2, 4)` label their initial values
//! `(x_0, x_1)`: the first computed term consumes `a_1`. Under this crate's
//! `(x_{-1}, x_0)` convention the same orbits come from the forcing cycle read
//! from `a_1`, i.e. `(2, 4, 1)`; see [`FIGURE_START_INDEX`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    boundary_matches_direct, boundary_orbit, detect_cycle, rotation_gap, sacker_check_from,
    verify_even_limit_cycle, BoundaryParity, CycleClass, DetectParams,
};
use crate::cycle::ParameterCycle;
use crate::factor::{classify, iterate_factored, s_partial, FactorSolution, ParityClass};
use crate::maps::{
    build_return_map, find_periodic_points, invariant_interval, map_derivative, map_derivative_log,
    orbit_decomposition_check_tol, parity_phase_period, parity_step, SearchGrid, Stability,
    Subsequence,
};
use crate::orbit::{iterate_direct, InitialData};

/// Index of the first initial value in the figure experiments (`x_0`).
pub const FIGURE_START_INDEX: usize = 1;

pub const SEMICONJUGACY_TOL: f64 = 1e-9;
pub const FACTOR_IDENTITY_TOL: f64 = 1e-12;
pub const FACTOR_PERIOD_TOL: f64 = 1e-14;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const CYCLE_TOL: f64 = 1e-8;
pub const MULTISTABILITY_GAP: f64 = 1e-3;
pub const EVEN_CYCLE_TOL: f64 = 1e-6;
pub const SACKER_TOL: f64 = 1e-8;
pub const DECOMPOSITION_TOL: f64 = 1e-9;
pub const FD_STEP: f64 = 1e-6;
pub const FD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub key: &'static str,
    pub criterion: String,
    pub status: Status,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `PASS [id] key: detail`.
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        format!(
            "{tag} [{:>2}] {:<20} measured={:.3e} expected={:.3e} tol={:.1e} | {}",
            self.id, self.key, self.measured, self.expected, self.tolerance, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    /// Restrict to criteria whose key or id contains this string.
    pub only: Option<String>,
    /// Multiplies every tolerance; values below 1 tighten the checks.
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            only: None,
            tolerance_scale: 1.0,
            seed: 2016,
        }
    }
}

type Check = fn(&SuiteOptions) -> CriterionResult;

/// `(id, key, check)` for every criterion, in report order.
pub const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "semiconjugacy", semiconjugacy),
    (2, "factor-periodicity", factor_periodicity),
    (3, "odd-multistability", odd_multistability),
    (4, "odd-figures", odd_figures),
    (5, "peven", even_limit_cycle),
    (6, "sacker", sacker_sums),
    (7, "decomposition", decomposition),
    (8, "derivative", derivative),
    (9, "invariant-interval", invariant_interval_check),
    (10, "boundary", boundary_solutions),
];

/// True when `filter` selects the criterion `(id, key)`.
pub fn selects(filter: &str, id: u32, key: &str) -> bool {
    filter == id.to_string() || key.contains(filter)
}

/// Runs the selected criteria in order.
pub fn run_suite(options: &SuiteOptions) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|(id, key, _)| options.only.as_deref().is_none_or(|f| selects(f, *id, key)))
        .map(|(_, _, check)| check(options))
        .collect()
}

/// Runs one criterion by id.
pub fn run_criterion(id: u32, options: &SuiteOptions) -> Option<CriterionResult> {
    CRITERIA
        .iter()
        .find(|(i, _, _)| *i == id)
        .map(|(_, _, check)| check(options))
}

fn result(
    id: u32,
    criterion: &str,
    ok: bool,
    measured: f64,
    expected: f64,
    tolerance: f64,
    detail: String,
) -> CriterionResult {
    let key = CRITERIA
        .iter()
        .find(|(i, _, _)| *i == id)
        .map(|c| c.1)
        .unwrap_or("");
    CriterionResult {
        id,
        key,
        criterion: criterion.to_string(),
        status: if ok { Status::Pass } else { Status::Fail },
        measured,
        expected,
        tolerance,
        detail,
    }
}

fn cycle(values: &[f64]) -> ParameterCycle {
    ParameterCycle::new(values.to_vec()).expect("valid literal cycle")
}

/// `(1, 2, 4)` as seen from the figures' `(x_0, x_1)` initial labels.
pub fn figure_cycle() -> ParameterCycle {
    cycle(&[1.0, 2.0, 4.0]).rotated(FIGURE_START_INDEX)
}

fn random_cycle(rng: &mut ChaCha8Rng, p: usize, lo: f64, hi: f64) -> ParameterCycle {
    loop {
        let v: Vec<f64> = (0..p).map(|_| rng.gen_range(lo..hi)).collect();
        if let Ok(c) = ParameterCycle::new(v) {
            return c;
        }
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Relative gap between two orbit samples. Pairs where both samples are
/// subnormal or zero carry no relative precision and count as equal.
fn sample_gap(a: f64, b: f64) -> f64 {
    if a.abs().max(b.abs()) < f64::MIN_POSITIVE {
        0.0
    } else {
        rel_diff(a, b)
    }
}

/// First step where two traces part by more than `tol` (relative).
fn first_divergence(a: &[f64], b: &[f64], tol: f64) -> Option<(usize, f64)> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| (i + 1, sample_gap(*x, *y)))
        .find(|(_, g)| !(*g <= tol))
}

fn semiconjugacy(opts: &SuiteOptions) -> CriterionResult {
    const STEPS: usize = 10_000;
    let tol = SEMICONJUGACY_TOL * opts.tolerance_scale;
    let id_tol = FACTOR_IDENTITY_TOL * opts.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_identity = 0.0f64;
    let mut failures = Vec::new();
    let mut sensitive = 0usize;
    for i in 0..100 {
        let p = rng.gen_range(1..=9);
        let c = random_cycle(&mut rng, p, 0.1, 4.0);
        let init = InitialData::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)).unwrap();
        let fs = FactorSolution::from_initial(&c, &init).unwrap();
        worst_identity = worst_identity.max(finite_identity_residual(&fs, STEPS));
        let d = iterate_direct(&c, init, STEPS);
        let f = iterate_factored(&c, init, STEPS);
        let (d, f) = match (d, f) {
            (Ok(d), Ok(f)) => (d, f),
            _ => {
                failures.push(format!("#{i}: non-finite state"));
                continue;
            }
        };
        if let Some((n, gap)) = first_divergence(&d.samples, &f.samples, tol) {
            // the same recurrence with the exponential split into three factors
            if first_divergence(&d.samples, &direct_split(&c, init, STEPS), tol).is_some() {
                sensitive += 1;
            }
            failures.push(format!(
                "#{i} p={p} sigma={:.3}: step {n} gap {gap:.2e}",
                c.sigma()
            ));
        }
    }
    let ok = failures.is_empty() && worst_identity <= id_tol;
    let detail = if failures.is_empty() {
        format!("100 cycles agree; max |t_(n+1) t_n e^-a_n - 1| = {worst_identity:.2e}")
    } else {
        format!(
            "{} of 100 cycles diverge; {} of them also diverge between two roundings of the direct recurrence; identity residual {worst_identity:.2e}; first: {}",
            failures.len(),
            sensitive,
            failures[0]
        )
    };
    result(
        1,
        "direct and factored orbits agree within 1e-9 over 1e4 steps; t_(n+1) t_n = e^(a_n) within 1e-12",
        ok,
        failures.len() as f64,
        0.0,
        tol,
        detail,
    )
}

/// Max of `|t_{n+1} t_n - e^{a_n}| / e^{a_n}` over `n < n_max` with both factors finite.
pub fn finite_identity_residual(fs: &FactorSolution, n_max: usize) -> f64 {
    let c = fs.cycle();
    (0..n_max)
        .filter(|&n| fs.ln_t(n).abs() < 700.0 && fs.ln_t(n + 1).abs() < 700.0)
        .map(|n| {
            let e = c.a(n).exp();
            (fs.t(n + 1) * fs.t(n) - e).abs() / e
        })
        .fold(0.0, f64::max)
}

/// `x_{n-1} e^{a_n} e^{-x_{n-1}} e^{-x_n}`: the direct recurrence rounded differently.
pub fn direct_split(c: &ParameterCycle, init: InitialData, steps: usize) -> Vec<f64> {
    let (mut prev, mut curr) = (init.x_prev, init.x_curr);
    (0..steps)
        .map(|n| {
            let next = prev * c.a(n).exp() * (-prev).exp() * (-curr).exp();
            prev = curr;
            curr = next;
            next
        })
        .collect()
}

fn factor_periodicity(opts: &SuiteOptions) -> CriterionResult {
    let tol = FACTOR_PERIOD_TOL * opts.tolerance_scale;
    let cf_tol = CLOSED_FORM_TOL * opts.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 2);
    let mut worst = 0.0f64;
    let mut worst_cf = 0.0f64;
    for p in [1usize, 3, 5, 7] {
        for _ in 0..5 {
            let c = random_cycle(&mut rng, p, 0.1, 2.0);
            let generic = classify(&c, rng.gen_range(0.1..10.0)).unwrap();
            let boundary = classify(&c, (-c.sigma() / 2.0).exp()).unwrap();
            if generic.parity_class() != ParityClass::OddPeriodic2p
                || boundary.parity_class() != ParityClass::OddPeriodicP
            {
                worst = f64::INFINITY;
            }
            for n in 0..=1000 {
                worst = worst.max(rel_diff(generic.t(n + 2 * p), generic.t(n)));
                worst = worst.max(rel_diff(boundary.t(n + p), boundary.t(n)));
                // reduced closed form against the plain alternating sum
                let brute = ((generic.ln_t0() + s_partial(&c, n))
                    * if n % 2 == 0 { 1.0 } else { -1.0 })
                .exp();
                worst_cf = worst_cf.max(rel_diff(generic.t(n), brute));
            }
        }
    }
    for p in [2usize, 4, 6, 8] {
        for _ in 0..5 {
            // eighths keep sigma exactly zero in binary floating point
            let mut v: Vec<f64> = (0..p - 1)
                .map(|_| rng.gen_range(1..16) as f64 / 8.0)
                .collect();
            let partial: f64 = v
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 0 { -a } else { *a })
                .sum();
            v.push(-partial);
            let Ok(c) = ParameterCycle::new(v) else {
                continue;
            };
            if c.sigma() != 0.0 || c.values().iter().any(|a| *a <= 0.0) {
                continue;
            }
            let fs = classify(&c, 1.0).unwrap();
            if fs.parity_class() != ParityClass::EvenPeriodicP {
                worst = f64::INFINITY;
            }
            for n in 0..=1000 {
                worst = worst.max(rel_diff(fs.t(n + p), fs.t(n)));
            }
        }
    }
    let ok = worst <= tol && worst_cf <= cf_tol;
    result(
        2,
        "closed-form t has period 2p (odd p), p when t0 = e^(-sigma/2), p when sigma = 0 and t0 = 1",
        ok,
        worst,
        0.0,
        tol,
        format!("max periodic deviation {worst:.2e}; reduced vs summed closed form {worst_cf:.2e} (tol {cf_tol:.0e})"),
    )
}

fn detect(
    c: &ParameterCycle,
    init: InitialData,
    params: &DetectParams,
) -> crate::analysis::CycleReport {
    let trace = iterate_direct(c, init, params.steps()).expect("bounded positive orbit");
    detect_cycle(&trace, params).expect("valid window")
}

fn odd_multistability(opts: &SuiteOptions) -> CriterionResult {
    let params = DetectParams {
        tol: CYCLE_TOL * opts.tolerance_scale,
        ..DetectParams::default()
    };
    let c = cycle(&[1.0, 1.9, 0.8]);
    let a = detect(&c, InitialData::new(1.0, 0.8).unwrap(), &params);
    let b = detect(&c, InitialData::new(0.5, 1.5).unwrap(), &params);
    let x_prev: f64 = 1.0;
    let exceptional = InitialData::new(x_prev, x_prev * (-c.sigma() / 2.0 - x_prev).exp()).unwrap();
    let e = detect(&c, exceptional, &params);
    let gap = match (&a.cycle_values, &b.cycle_values) {
        (Some(x), Some(y)) => rotation_gap(x, y).unwrap_or(f64::INFINITY),
        _ => 0.0,
    };
    let ok = a.period == Some(6)
        && b.period == Some(6)
        && e.period == Some(3)
        && gap > MULTISTABILITY_GAP;
    result(
        3,
        "a = (1, 1.9, 0.8): two generic initials reach distinct 6-cycles; t0 = e^(-sigma/2) reaches a 3-cycle",
        ok,
        gap,
        MULTISTABILITY_GAP,
        params.tol,
        format!(
            "periods (1,0.8)->{:?} (0.5,1.5)->{:?} exceptional->{:?}; 6-cycle gap {gap:.3e}",
            a.period, b.period, e.period
        ),
    )
}

/// Figure initial pairs for `a = (1, 2, 4)` with the expected period (`None` = nonperiodic).
pub const FIGURE_RUNS: [((f64, f64), Option<usize>); 4] = [
    ((1.0, 0.8), Some(6)),
    ((1.0, 1.0), Some(12)),
    ((1.0, 3.8), Some(18)),
    ((1.0, 6.0), None),
];

fn odd_figures(opts: &SuiteOptions) -> CriterionResult {
    let params = DetectParams {
        tol: CYCLE_TOL * opts.tolerance_scale,
        ..DetectParams::default()
    };
    let c = figure_cycle();
    let mut notes = Vec::new();
    let mut ok = true;
    for ((xp, xc), expected) in FIGURE_RUNS {
        let rep = detect(&c, InitialData::new(xp, xc).unwrap(), &params);
        let good = match expected {
            Some(_) => rep.period == expected,
            None => rep.classification == CycleClass::NonPeriodicUpToBound,
        };
        ok &= good;
        notes.push(format!(
            "({xp},{xc})->{}",
            rep.period.map_or("none".into(), |p| p.to_string())
        ));
    }
    let map_for = |xc: f64| {
        let fs = FactorSolution::from_initial(&c, &InitialData::new(1.0, xc).unwrap()).unwrap();
        build_return_map(&fs).unwrap()
    };
    let points = |xc: f64, omega: usize| {
        let cm = map_for(xc);
        find_periodic_points(&cm, omega, &SearchGrid::for_map(&cm))
    };
    let has =
        |pts: &[crate::maps::PeriodicPoint], s: Stability| pts.iter().any(|p| p.stability == s);
    let fig3 = points(0.8, 1);
    let fig4_fixed = points(1.0, 1);
    let fig4_two = points(1.0, 2);
    let fig5 = points(3.8, 3);
    let fig6 = points(6.0, 3);
    let pattern = has(&fig3, Stability::Stable)
        && !fig4_fixed.is_empty()
        && fig4_fixed
            .iter()
            .all(|p| p.stability == Stability::Unstable)
        && has(&fig4_two, Stability::Stable)
        && has(&fig5, Stability::Stable)
        && fig6.len() == 6
        && fig6.iter().all(|p| p.stability == Stability::Unstable);
    ok &= pattern;
    notes.push(format!(
        "stable fixed pt {}, unstable fixed + stable 2-cycle {}, stable 3-cycle {}, unstable omega=3 points for (1,6): {} of {}",
        has(&fig3, Stability::Stable),
        fig4_fixed.iter().all(|p| p.stability == Stability::Unstable) && has(&fig4_two, Stability::Stable),
        has(&fig5, Stability::Stable),
        fig6.iter().filter(|p| p.stability == Stability::Unstable).count(),
        fig6.len()
    ));
    result(
        4,
        "a = (1, 2, 4): periods 6, 12, 18, nonperiodic; stability pattern of f, f^2, f^3",
        ok,
        fig6.len() as f64,
        6.0,
        params.tol,
        notes.join("; "),
    )
}

fn even_limit_cycle(opts: &SuiteOptions) -> CriterionResult {
    let tol = EVEN_CYCLE_TOL * opts.tolerance_scale;
    let c = cycle(&[1.4, 1.8, 1.6, 0.3]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 5);
    let steps = DetectParams::default().steps();
    let mut verdicts = Vec::new();
    for _ in 0..25 {
        let init = InitialData::new(rng.gen_range(0.05..4.0), rng.gen_range(0.05..4.0)).unwrap();
        let trace = iterate_direct(&c, init, steps).unwrap();
        verdicts.push(verify_even_limit_cycle(&c, &trace, tol).unwrap());
    }
    let reference = &verdicts[0].surviving_values;
    let max_gap = verdicts
        .iter()
        .map(|v| rotation_gap(reference, &v.surviving_values).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let max_sum_err = verdicts
        .iter()
        .map(|v| (v.cycle_sum - 3.0).abs())
        .fold(0.0, f64::max);
    let vanish = verdicts.iter().map(|v| v.vanishing_max).fold(0.0, f64::max);
    let periods_ok = verdicts
        .iter()
        .all(|v| v.vanishing_parity == 0 && v.surviving_period.is_some_and(|r| 2 % r == 0));
    let ok = verdicts.iter().all(|v| v.passed) && periods_ok && max_gap < tol && max_sum_err <= tol;
    result(
        5,
        "a = (1.4, 1.8, 1.6, 0.3): x_2n -> 0, x_2n+1 -> one common 2-cycle summing to a_0 + a_2 = 3",
        ok,
        max_sum_err,
        0.0,
        tol,
        format!(
            "25 initials; max even-indexed |x| {vanish:.1e}; max cycle gap {max_gap:.1e}; cycle {:?}",
            reference
        ),
    )
}

fn sacker_sums(opts: &SuiteOptions) -> CriterionResult {
    let tol = SACKER_TOL * opts.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 6);
    let mut worst_sum = 0.0f64;
    let mut worst_spread = 0.0f64;
    let mut errors = 0;
    for _ in 0..50 {
        let q = rng.gen_range(1..=6);
        let alpha: Vec<f64> = (0..q).map(|_| rng.gen_range(0.1..1.9)).collect();
        let target: f64 = alpha.iter().sum();
        let mut cycles = Vec::new();
        for y0 in [0.1, 1.0, 3.0] {
            match sacker_check_from(&alpha, y0, 200_000) {
                Ok(rec) => {
                    worst_sum = worst_sum.max((rec.sum - target).abs());
                    cycles.push(rec.cycle_values);
                }
                Err(_) => errors += 1,
            }
        }
        for c in &cycles[1.min(cycles.len())..] {
            let spread = c
                .iter()
                .zip(&cycles[0])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst_spread = worst_spread.max(spread);
        }
    }
    let ok = errors == 0 && worst_sum <= tol && worst_spread <= tol;
    result(
        6,
        "y_(n+1) = y_n e^(alpha_n - y_n), alpha_i in (0.1, 1.9): attracting q-cycle sums to sum(alpha), any y0",
        ok,
        worst_sum,
        0.0,
        tol,
        format!("50 cycles x 3 starts; max sum error {worst_sum:.1e}; max spread across y0 {worst_spread:.1e}; no-convergence {errors}"),
    )
}

fn decomposition(opts: &SuiteOptions) -> CriterionResult {
    let tol = DECOMPOSITION_TOL * opts.tolerance_scale;
    let base = cycle(&[1.0, 1.9, 0.8]);
    let sigma = base.sigma();
    let mut runs: Vec<(String, ParameterCycle, InitialData)> = vec![
        (
            "(1,1.9,0.8) (1,0.8)".into(),
            base.clone(),
            InitialData::new(1.0, 0.8).unwrap(),
        ),
        (
            "(1,1.9,0.8) (0.5,1.5)".into(),
            base.clone(),
            InitialData::new(0.5, 1.5).unwrap(),
        ),
        (
            "(1,1.9,0.8) exceptional".into(),
            base.clone(),
            InitialData::new(1.0, (-sigma / 2.0 - 1.0).exp()).unwrap(),
        ),
    ];
    for ((xp, xc), _) in FIGURE_RUNS {
        runs.push((
            format!("(1,2,4) ({xp},{xc})"),
            figure_cycle(),
            InitialData::new(xp, xc).unwrap(),
        ));
    }
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (label, c, init) in &runs {
        let fs = FactorSolution::from_initial(c, init).unwrap();
        let cm = build_return_map(&fs).unwrap();
        let rep = orbit_decomposition_check_tol(&cm, init.x_prev, 200, tol);
        worst = worst.max(rep.max_rel_error);
        if !rep.ok {
            let (m, k, _, _) = rep.first_mismatch.unwrap_or_default();
            let x0 = cm.prefix(0, init.x_prev);
            let start = InitialData::new(init.x_prev, x0).unwrap();
            let steps = 201 * cm.q();
            let direct = iterate_direct(c, start, steps).unwrap();
            let split = first_divergence(&direct.samples, &direct_split(c, start, steps), tol);
            failures.push(format!(
                "{label}: m={m} k={k} rel {:.2e}, two roundings of the direct recurrence part at step {}",
                rep.max_rel_error,
                split.map_or("never".into(), |(n, _)| n.to_string())
            ));
        }
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("{} orbits, max relative error {worst:.2e}", runs.len())
    } else {
        format!(
            "{} of {} orbits mismatch: {}",
            failures.len(),
            runs.len(),
            failures.join(", ")
        )
    };
    result(
        7,
        "h_k(f^m(x_-1)) equals direct iteration at index qm+k within 1e-9 for m <= 200",
        ok,
        worst,
        0.0,
        tol,
        detail,
    )
}

fn derivative(opts: &SuiteOptions) -> CriterionResult {
    let tol = FD_TOL * opts.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 8);
    let c = figure_cycle();
    let fs = FactorSolution::from_initial(&c, &InitialData::new(1.0, 0.8).unwrap()).unwrap();
    let cm = build_return_map(&fs).unwrap();
    let beta = c.orbit_bound();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = rng.gen_range(1e-3..beta);
        let d = map_derivative(&cm, x, 1);
        let fd = (cm.apply(x + FD_STEP) - cm.apply(x - FD_STEP)) / (2.0 * FD_STEP);
        worst = worst.max((d - fd).abs() / (1.0 + d.abs()));
    }
    // decay of log|(f^n)'| for the multistability cycle; x = 1 is critical for g_0
    let c3 = cycle(&[1.0, 1.9, 0.8]);
    let mut slope = f64::NEG_INFINITY;
    for (xp, xc) in [(1.0, 0.8), (0.5, 1.5)] {
        let fs3 = FactorSolution::from_initial(&c3, &InitialData::new(xp, xc).unwrap()).unwrap();
        let cm3 = build_return_map(&fs3).unwrap();
        let logs: Vec<(f64, f64)> = (1..=50)
            .map(|n| (n as f64, map_derivative_log(&cm3, 0.5, n).ln_abs))
            .collect();
        slope = slope.max(least_squares_slope(&logs));
    }
    let ok = worst <= tol && slope < 0.0;
    result(
        8,
        "product-formula derivative matches central differences; log|(f^n)'| decays for n <= 50",
        ok,
        worst,
        0.0,
        tol,
        format!("max scaled FD gap {worst:.2e} over 100 points; flattest log-derivative slope at x = 0.5: {slope:.4}"),
    )
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn invariant_interval_check(opts: &SuiteOptions) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 9);
    let c = cycle(&[1.0, 1.9, 0.8]);
    let fs = FactorSolution::from_initial(&c, &InitialData::new(1.0, 0.8).unwrap()).unwrap();
    let beta_expected = 0.9f64.exp();
    let tol = 1e-15 * opts.tolerance_scale;
    let mut escapes = 0usize;
    let mut slow = 0usize;
    let mut beta_err = 0.0f64;
    let mut alpha_min = f64::INFINITY;
    for sub in [Subsequence::EvenIndexed, Subsequence::OddIndexed] {
        let iv = invariant_interval(&c, &fs, sub).unwrap();
        beta_err = beta_err.max((iv.beta - beta_expected).abs());
        alpha_min = alpha_min.min(iv.alpha);
        let period = parity_phase_period(&fs).unwrap();
        for _ in 0..10_000 {
            let x = rng.gen_range(iv.alpha..=iv.beta);
            let phase = rng.gen_range(0..period);
            let single = parity_step(&fs, sub, phase, x);
            let full = (0..period).fold(x, |u, n| parity_step(&fs, sub, n, u));
            if !iv.contains(single) || !iv.contains(full) {
                escapes += 1;
            }
        }
        for _ in 0..100 {
            let mut u = rng.gen_range(0.0..iv.alpha);
            if u == 0.0 {
                u = iv.alpha / 2.0;
            }
            let entered = (0..100_000).any(|n| {
                u = parity_step(&fs, sub, n, u);
                iv.contains(u)
            });
            if !entered {
                slow += 1;
            }
        }
    }
    let ok = beta_err <= tol && alpha_min > 0.0 && escapes == 0 && slow == 0;
    result(
        9,
        "a = (1, 1.9, 0.8): beta = e^0.9, alpha > 0, [alpha, beta] invariant and attracting for both parities",
        ok,
        (escapes + slow) as f64,
        0.0,
        0.0,
        format!("|beta - e^0.9| {beta_err:.1e}; alpha {alpha_min:.4}; escapes {escapes}/20000; not entered {slow}/200"),
    )
}

fn boundary_solutions(opts: &SuiteOptions) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 10);
    let mut mismatches = 0usize;
    let mut nonzero = 0usize;
    for _ in 0..20 {
        let p = rng.gen_range(1..=9);
        let c = random_cycle(&mut rng, p, 0.1, 4.0);
        let u0 = rng.gen_range(0.05..4.0);
        for parity in [BoundaryParity::OddZero, BoundaryParity::EvenZero] {
            if !boundary_matches_direct(&c, u0, parity, 1000).unwrap_or(false) {
                mismatches += 1;
            }
            let tr = boundary_orbit(&c, u0, parity, 1000).unwrap();
            let zero_parity = match parity {
                BoundaryParity::OddZero => 1,
                BoundaryParity::EvenZero => 0,
            };
            nonzero += (1..=1000usize)
                .filter(|n| n % 2 == zero_parity)
                .filter(|&n| tr.x(n as i64).to_bits() != 0)
                .count();
        }
    }
    let ok = mismatches == 0 && nonzero == 0;
    result(
        10,
        "boundary solutions equal direct iteration from (u0, 0) / (0, u0) bit for bit; zero slots exactly 0.0",
        ok,
        (mismatches + nonzero) as f64,
        0.0,
        0.0,
        format!("40 orbits x 1000 steps; bit mismatches {mismatches}; nonzero designated slots {nonzero}"),
    )
}
