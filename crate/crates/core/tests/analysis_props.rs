use proptest::prelude::*;
use ricker_core::analysis::{boundary_matches_direct, rotation_gap, sacker_check_from};
use ricker_core::factor::classify;
use ricker_core::suite::least_squares_slope;
use ricker_core::*;

fn cycle_of(ps: Vec<usize>, lo: f64, hi: f64) -> impl Strategy<Value = ParameterCycle> {
    prop::sample::select(ps)
        .prop_flat_map(move |p| prop::collection::vec(lo..hi, p))
        .prop_filter_map("non-minimal", |v| ParameterCycle::new(v).ok())
}

fn cyc(v: &[f64]) -> ParameterCycle {
    ParameterCycle::new(v.to_vec()).unwrap()
}

fn report(c: &ParameterCycle, init: InitialData, params: &DetectParams) -> CycleReport {
    let tr = iterate_direct(c, init, params.steps()).unwrap();
    detect_cycle(&tr, params).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn odd_period_orbits_settle_on_p_or_2p(c in cycle_of(vec![1, 3, 5], 0.1, 1.9), xp in 0.1f64..3.0, xc in 0.1f64..3.0) {
        let p = c.period();
        let params = DetectParams::default();
        let generic = report(&c, InitialData::new(xp, xc).unwrap(), &params);
        prop_assert_eq!(generic.classification, CycleClass::ConvergedToCycle);
        prop_assert!(generic.period.is_some_and(|r| (2 * p) % r == 0), "{:?}", generic.period);
        let special = InitialData::from_t0(xp, (-c.sigma() / 2.0).exp()).unwrap();
        let r = report(&c, special, &params);
        prop_assert!(r.period.is_some_and(|r| p % r == 0), "{:?}", r.period);
    }

    #[test]
    fn detected_period_is_minimal(c in cycle_of(vec![1, 2, 3, 4, 5], 0.1, 3.0), xp in 0.1f64..3.0, xc in 0.1f64..3.0) {
        let params = DetectParams { burn_in: 5_000, ..DetectParams::default() };
        let tr = iterate_direct(&c, InitialData::new(xp, xc).unwrap(), params.steps()).unwrap();
        let rep = detect_cycle(&tr, &params).unwrap();
        if let Some(r) = rep.period {
            let w = &tr.samples[tr.len() - params.window..];
            let fits = |d: usize| w.iter().zip(&w[d..]).all(|(a, b)| (b - a).abs() <= params.tol * (1.0 + a.abs()));
            prop_assert!(fits(r));
            for d in (1..r).filter(|d| r % d == 0) {
                prop_assert!(!fits(d), "divisor {d} of {r} also fits");
            }
            prop_assert_eq!(rep.cycle_values.as_ref().map(Vec::len), Some(r));
        }
    }

    #[test]
    fn surviving_cycle_forgets_initials(c in cycle_of(vec![2, 4], 0.1, 1.9), inits in prop::collection::vec((0.05f64..4.0, 0.05f64..4.0), 5)) {
        prop_assume!(c.sigma() < -0.3);
        let params = DetectParams::default();
        let verdicts: Vec<EvenVerdict> = inits
            .iter()
            .map(|&(xp, xc)| {
                let tr = iterate_direct(&c, InitialData::new(xp, xc).unwrap(), params.steps()).unwrap();
                verify_even_limit_cycle(&c, &tr, 1e-6).unwrap()
            })
            .collect();
        for v in &verdicts {
            prop_assert!(v.passed, "{v:?}");
            prop_assert_eq!(v.vanishing_parity, 0);
            prop_assert!(v.advisory.is_none());
            let gap = rotation_gap(&verdicts[0].surviving_values, &v.surviving_values).unwrap();
            prop_assert!(gap < 1e-6);
        }
    }

    #[test]
    fn vanishing_half_decays_at_drift_rate(c in cycle_of(vec![2, 4, 6], 0.1, 1.9), xp in 0.1f64..3.0, xc in 0.1f64..3.0) {
        prop_assume!(c.sigma().abs() > 0.05);
        let p = c.period();
        let parity = if c.sigma() > 0.0 { 1 } else { 0 };
        let tr = iterate_direct(&c, InitialData::new(xp, xc).unwrap(), 40_000).unwrap();
        // ln x on the vanishing half, sampled once per forcing period, away from the underflow floor
        let pts: Vec<(f64, f64)> = (1..=40_000usize)
            .filter(|n| n % 2 == parity && n % p == parity)
            .map(|n| (n as f64 / 2.0, tr.x(n as i64)))
            .filter(|(_, x)| *x > 1e-280)
            .skip(20)
            .map(|(m, x)| (m, x.ln()))
            .collect();
        prop_assume!(pts.len() >= 20);
        let slope = least_squares_slope(&pts);
        let expected = -2.0 * c.sigma().abs() / p as f64;
        prop_assert!((slope - expected).abs() <= 0.05 * expected.abs(), "slope {slope}, expected {expected}");
    }

    #[test]
    fn boundary_halves_are_exact(c in cycle_of((1..=9).collect(), 0.1, 4.0), u0 in 0.01f64..5.0) {
        for parity in [BoundaryParity::OddZero, BoundaryParity::EvenZero] {
            prop_assert!(boundary_matches_direct(&c, u0, parity, 1000).unwrap());
            let tr = boundary_orbit(&c, u0, parity, 1000).unwrap();
            let zero = if parity == BoundaryParity::OddZero { 1 } else { 0 };
            for n in (1..=1000i64).filter(|n| n % 2 == zero) {
                prop_assert_eq!(tr.x(n).to_bits(), 0u64);
            }
        }
    }

    #[test]
    fn sacker_sum_identity(alpha in prop::collection::vec(0.1f64..1.9, 1..=6), y0 in 0.05f64..4.0) {
        let rec = sacker_check_from(&alpha, y0, 200_000).unwrap();
        prop_assert!(rec.sum_matches);
        prop_assert!((rec.sum - alpha.iter().sum::<f64>()).abs() <= 1e-8);
    }
}

#[test]
fn constant_trace_has_period_one() {
    let c = cyc(&[2.0]);
    let params = DetectParams {
        burn_in: 10,
        window: 200,
        ..DetectParams::default()
    };
    let r = report(&c, InitialData::new(1.0, 1.0).unwrap(), &params);
    assert_eq!(r.period, Some(1));
    assert_eq!(r.classification, CycleClass::ConvergedToCycle);
}

#[test]
fn short_trace_rejected() {
    let c = cyc(&[1.0]);
    let tr = iterate_direct(&c, InitialData::new(1.0, 1.0).unwrap(), 100).unwrap();
    assert!(matches!(
        detect_cycle(&tr, &DetectParams::default()),
        Err(RickerError::WindowTooShort { .. })
    ));
}

#[test]
fn chaotic_figure_orbit_has_no_period() {
    let c = ricker_core::suite::figure_cycle();
    let r = report(
        &c,
        InitialData::new(1.0, 6.0).unwrap(),
        &DetectParams::default(),
    );
    assert_eq!(r.classification, CycleClass::NonPeriodicUpToBound);
    assert_eq!(r.period, None);
    assert_eq!(r.max_period, 100);
}

#[test]
fn two_periodic_forcing_keeps_even_half() {
    let c = cyc(&[0.6, 1.5]);
    let tr = iterate_direct(&c, InitialData::new(0.8, 1.1).unwrap(), 100_000).unwrap();
    let v = verify_even_limit_cycle(&c, &tr, 1e-8).unwrap();
    assert_eq!(v.vanishing_parity, 1);
    assert_eq!(v.surviving_period, Some(1));
    assert!((tr.x(100_000) - 1.5).abs() < 1e-10);
    assert!(v.passed);
}

#[test]
fn equal_odd_forcing_gives_period_two() {
    let c = cyc(&[0.7, 1.2, 0.9, 1.2]);
    assert!(c.sigma() > 0.0);
    let tr = iterate_direct(&c, InitialData::new(0.8, 1.1).unwrap(), 60_000).unwrap();
    let v = verify_even_limit_cycle(&c, &tr, 1e-8).unwrap();
    assert!(v.passed);
    assert_eq!(v.global_period, Some(2));
}

#[test]
fn paper_even_cycle_verdict() {
    let c = cyc(&[1.4, 1.8, 1.6, 0.3]);
    let tr = iterate_direct(&c, InitialData::new(0.5, 2.0).unwrap(), 51_000).unwrap();
    let v = verify_even_limit_cycle(&c, &tr, 1e-6).unwrap();
    assert!(v.passed);
    assert_eq!(v.vanishing_parity, 0);
    assert!((v.cycle_sum - 3.0).abs() < 1e-6);
    assert_eq!(v.global_period, Some(4));
}

#[test]
fn hypothesis_violation_is_advisory() {
    let c = cyc(&[2.5, 0.5]);
    let tr = iterate_direct(&c, InitialData::new(0.5, 1.0).unwrap(), 5_000).unwrap();
    let v = verify_even_limit_cycle(&c, &tr, 1e-6).unwrap();
    assert!(v.advisory.is_some());
}

#[test]
fn sacker_examples() {
    let r = sacker_check(&[1.3], 10_000).unwrap();
    assert!((r.cycle_values[0] - 1.3).abs() < 1e-12);
    let r = sacker_check(&[1.8, 0.3], 100_000).unwrap();
    assert!((r.sum - 2.1).abs() < 1e-8);
    let r = sacker_check(&[0.5, 1.5, 1.0, 1.0], 100_000).unwrap();
    assert!((r.sum - 4.0).abs() < 1e-8);
}

#[test]
fn boundary_half_solves_first_order_map() {
    let c = cyc(&[1.4, 1.8, 1.6, 0.3]);
    let tr = boundary_orbit(&c, 0.9, BoundaryParity::OddZero, 40).unwrap();
    let mut u: f64 = 0.9;
    for m in 1..=20 {
        let alpha = [1.8, 0.3][(m - 1) % 2];
        u *= (alpha - u).exp();
        assert_eq!(tr.x(2 * m as i64), u);
        assert_eq!(tr.x(2 * m as i64 - 1), 0.0);
    }
}

#[test]
fn multistable_scan_finds_several_six_cycles() {
    let grid = ScanGrid {
        x_prev_range: AxisRange::new(0.2, 2.5, 20),
        x_curr_range: AxisRange::new(0.2, 2.5, 20),
        cycle: cyc(&[1.0, 1.9, 0.8]),
        params: DetectParams::default(),
    };
    let scan = basin_scan(&grid).unwrap();
    assert_eq!(scan.cells.len(), 400);
    let sixes = scan.cycles.iter().filter(|c| c.period == Some(6)).count();
    assert!(sixes >= 2, "{:?}", scan.cycles);
    assert_eq!(scan.cycles.iter().map(|c| c.cells).sum::<usize>(), 400);
    // row-major: x_prev outer
    assert_eq!(scan.cells[1].initial.0, 0.2);
    assert!(scan.cells[1].initial.1 > 0.2);
}

#[test]
fn even_scan_has_one_attractor() {
    let grid = ScanGrid {
        x_prev_range: AxisRange::new(0.1, 3.0, 10),
        x_curr_range: AxisRange::new(0.1, 3.0, 10),
        cycle: cyc(&[1.4, 1.8, 1.6, 0.3]),
        params: DetectParams::default(),
    };
    let scan = basin_scan(&grid).unwrap();
    assert_eq!(scan.cycles.len(), 1, "{:?}", scan.cycles);
    assert_eq!(scan.cycles[0].cells, 100);
}

#[test]
fn scan_is_deterministic() {
    let grid = ScanGrid {
        x_prev_range: AxisRange::new(0.3, 2.0, 4),
        x_curr_range: AxisRange::new(0.3, 2.0, 3),
        cycle: cyc(&[1.0, 1.9, 0.8]),
        params: DetectParams {
            burn_in: 20_000,
            ..DetectParams::default()
        },
    };
    assert_eq!(basin_scan(&grid).unwrap(), basin_scan(&grid).unwrap());
    let single = ScanGrid {
        x_prev_range: AxisRange::new(1.0, 2.0, 1),
        x_curr_range: AxisRange::new(1.0, 2.0, 1),
        ..grid
    };
    let scan = basin_scan(&single).unwrap();
    assert_eq!((scan.cells.len(), scan.cycles.len()), (1, 1));
}

#[test]
fn factor_class_of_exceptional_initials() {
    let c = cyc(&[1.0, 1.9, 0.8]);
    let init = InitialData::from_t0(1.0, (-c.sigma() / 2.0).exp()).unwrap();
    let fs = FactorSolution::from_initial(&c, &init).unwrap();
    assert_eq!(fs.parity_class(), ParityClass::OddPeriodicP);
    assert_eq!(
        classify(&c, 1.0).unwrap().parity_class(),
        ParityClass::OddPeriodic2p
    );
}
