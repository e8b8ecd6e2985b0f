use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use ricker_core::factor::iterate_factored;
use ricker_core::suite::{run_suite, SuiteOptions};
use ricker_core::{
    basin_scan, build_return_map, classify, detect_cycle, find_periodic_points, iterate_direct,
    AxisRange, DetectParams, InitialData, ParameterCycle, ScanGrid, SearchGrid,
};

use crate::config::{parse_axis, parse_pair, Axis, Options};
use crate::error::CliError;
use crate::output::{num, opt_num, Writer};

const DEFAULT_OUT: &str = "out";

/// Cycle and detection settings common to several commands, all defaults filled in.
#[derive(Debug, Clone, Serialize)]
struct Common {
    a: Vec<f64>,
    start_index: usize,
    /// The cycle actually iterated, `a` read from `start_index`.
    cycle: Vec<f64>,
    burn_in: usize,
    window: usize,
    max_period: usize,
    tol: f64,
    out: PathBuf,
}

impl Common {
    fn resolve(o: &Options) -> Result<(Self, ParameterCycle), CliError> {
        let a =
            o.a.clone()
                .ok_or_else(|| CliError::Usage("--a is required".into()))?;
        let start_index = o.start_index.unwrap_or(0);
        let cycle = ParameterCycle::new(a.clone())?.rotated(start_index);
        let d = DetectParams::default();
        let common = Self {
            a,
            start_index,
            cycle: cycle.values().to_vec(),
            burn_in: o.burn_in.unwrap_or(d.burn_in),
            window: o.window.unwrap_or(d.window),
            max_period: o.max_period.unwrap_or(d.max_period),
            tol: o.tol.unwrap_or(d.tol),
            out: o.out.clone().unwrap_or_else(|| DEFAULT_OUT.into()),
        };
        Ok((common, cycle))
    }

    fn params(&self) -> DetectParams {
        DetectParams {
            burn_in: self.burn_in,
            window: self.window,
            max_period: self.max_period,
            tol: self.tol,
        }
    }
}

/// `--init` pairs followed by the pair implied by `--t0`/`--xprev`.
fn initial_pairs(o: &Options) -> Result<Vec<(f64, f64)>, CliError> {
    let mut pairs = o
        .init
        .iter()
        .map(|s| parse_pair(s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(t0) = o.t0 {
        let init = InitialData::from_t0(o.xprev.unwrap_or(1.0), t0)?;
        pairs.push((init.x_prev, init.x_curr));
    }
    Ok(pairs)
}

#[derive(Serialize)]
struct SimulateConfig {
    #[serde(flatten)]
    common: Common,
    initials: Vec<(f64, f64)>,
    steps: usize,
    path: String,
}

pub fn simulate(o: &Options) -> Result<(), CliError> {
    let (common, cycle) = Common::resolve(o)?;
    let initials = initial_pairs(o)?;
    if initials.is_empty() {
        return Err(CliError::Usage("simulate needs --init or --t0".into()));
    }
    let path = o.path.clone().unwrap_or_else(|| "direct".into());
    if path != "direct" && path != "factored" {
        return Err(CliError::Usage(format!(
            "--path must be direct or factored, got '{path}'"
        )));
    }
    let cfg = SimulateConfig {
        common,
        initials,
        steps: o.steps.unwrap_or(1000),
        path,
    };
    let out = Writer::new(&cfg.common.out, "simulate", &cfg)?;
    for (i, &(xp, xc)) in cfg.initials.iter().enumerate() {
        let init = InitialData::boundary(xp, xc)?;
        let trace = if cfg.path == "factored" {
            iterate_factored(&cycle, InitialData::new(xp, xc)?, cfg.steps)?
        } else {
            iterate_direct(&cycle, init, cfg.steps)?
        };
        let source = trace.source.as_str();
        let rows = (1..=trace.len()).map(|n| {
            let parity = if n % 2 == 0 { "even" } else { "odd" };
            vec![
                n.to_string(),
                num(trace.x(n as i64)),
                parity.into(),
                source.into(),
            ]
        });
        let csv = out.csv(
            &format!("simulate_{i}.csv"),
            &["n", "x", "parity", "source"],
            rows,
        )?;

        let report = detect_cycle(&trace, &fit_params(&cfg.common.params(), trace.len())).ok();
        let factor = init
            .t0()
            .map(|t0| classify(&cycle, t0))
            .transpose()?
            .map(|fs| fs.parity_class().as_str());
        let meta = json!({
            "initial": [xp, xc],
            "sigma": cycle.sigma(),
            "parity_class": factor,
            "cycle_report": report,
        });
        out.json(&format!("simulate_{i}.json"), &meta)?;
        let summary = report.as_ref().map_or("-".to_string(), |r| {
            format!(
                "{} period {}",
                r.classification.as_str(),
                r.period.map_or("-".into(), |p| p.to_string())
            )
        });
        println!("{} ({xp}, {xc}): {summary}", csv.display());
    }
    Ok(())
}

/// Shrinks the detection window to fit short traces.
fn fit_params(p: &DetectParams, len: usize) -> DetectParams {
    if len >= p.steps() {
        return *p;
    }
    let window = p.window.min(len / 2).max(2);
    DetectParams {
        burn_in: len - window,
        window,
        max_period: p.max_period.min(window / 2).max(1),
        tol: p.tol,
    }
}

#[derive(Serialize)]
struct FactorConfig {
    a: Vec<f64>,
    start_index: usize,
    cycle: Vec<f64>,
    t0: f64,
    steps: usize,
    out: PathBuf,
}

pub fn factor(o: &Options) -> Result<(), CliError> {
    let (common, cycle) = Common::resolve(o)?;
    let t0 = match o.t0 {
        Some(t0) => t0,
        None => {
            let &(xp, xc) = initial_pairs(o)?
                .first()
                .ok_or_else(|| CliError::Usage("factor needs --t0 or --init".into()))?;
            InitialData::new(xp, xc)?.t0().expect("positive pair")
        }
    };
    let fs = classify(&cycle, t0)?;
    let cfg = FactorConfig {
        a: common.a,
        start_index: common.start_index,
        cycle: common.cycle,
        t0,
        steps: o.steps.unwrap_or(100),
        out: common.out,
    };
    let out = Writer::new(&cfg.out, "factor", &cfg)?;
    let rows = (0..=cfg.steps).map(|n| vec![n.to_string(), num(fs.t(n)), num(fs.ln_t(n))]);
    let csv = out.csv("factor_t.csv", &["n", "t", "ln_t"], rows)?;
    let drift = (!fs.parity_class().is_periodic()).then(|| cycle.sigma());
    let report = json!({
        "sigma": cycle.sigma(),
        "parity_class": fs.parity_class().as_str(),
        "q": fs.period(),
        "t_cycle": fs.cycle_values(),
        "ln_t_drift_per_period": drift,
        "period_steps": cycle.period(),
    });
    out.json("factor_report.json", &report)?;
    println!("sigma {}", cycle.sigma());
    println!("class {}", fs.parity_class().as_str());
    match fs.cycle_values() {
        Some(v) => {
            println!("q {}", v.len());
            let shown: Vec<String> = v.iter().map(|t| format!("{t:.12}")).collect();
            println!("t-cycle {}", shown.join(", "));
        }
        None => println!(
            "ln t drifts by {} every {} steps",
            cycle.sigma(),
            cycle.period()
        ),
    }
    println!("{}", csv.display());
    Ok(())
}

#[derive(Serialize)]
struct MapConfig {
    a: Vec<f64>,
    start_index: usize,
    cycle: Vec<f64>,
    t0: f64,
    omega: Vec<usize>,
    grid: usize,
    samples: usize,
    out: PathBuf,
}

pub fn map(o: &Options) -> Result<(), CliError> {
    let (common, cycle) = Common::resolve(o)?;
    let t0 = match o.t0 {
        Some(t0) => t0,
        None => {
            let &(xp, xc) = initial_pairs(o)?
                .first()
                .ok_or_else(|| CliError::Usage("map needs --t0 or --init".into()))?;
            InitialData::new(xp, xc)?.t0().expect("positive pair")
        }
    };
    let fs = classify(&cycle, t0)?;
    let cm = build_return_map(&fs)?;
    let cfg = MapConfig {
        a: common.a,
        start_index: common.start_index,
        cycle: common.cycle,
        t0,
        omega: o.omega.clone().unwrap_or_else(|| vec![1, 2, 3]),
        grid: o.grid.unwrap_or(SearchGrid::for_map(&cm).points),
        samples: o.samples.unwrap_or(1000),
        out: common.out,
    };
    if cfg.omega.contains(&0) || cfg.grid < 2 || cfg.samples == 0 {
        return Err(CliError::Usage(
            "omega, grid and samples must be positive (grid >= 2)".into(),
        ));
    }
    let out = Writer::new(&cfg.out, "map", &cfg)?;
    let beta = cycle.orbit_bound();
    let rows = (1..=cfg.samples).map(|i| {
        let x = beta * i as f64 / cfg.samples as f64;
        let f1 = cm.apply(x);
        let f2 = cm.apply(f1);
        vec![num(x), num(f1), num(f2), num(cm.apply(f2))]
    });
    let curve = out.csv("map_curve.csv", &["x", "f", "f2", "f3"], rows)?;

    let grid = SearchGrid::for_map(&cm).with_points(cfg.grid);
    let mut points = Vec::new();
    for &omega in &cfg.omega {
        points.extend(find_periodic_points(&cm, omega, &grid));
    }
    let chaos = cfg.omega.contains(&3) && points.iter().any(|p| p.omega == 3);
    let rows = points.iter().map(|p| {
        vec![
            p.omega.to_string(),
            num(p.x),
            num(p.multiplier),
            p.stability.as_str().into(),
        ]
    });
    out.csv(
        "map_points.csv",
        &["omega", "x", "multiplier", "stability"],
        rows,
    )?;
    let report = json!({
        "parity_class": fs.parity_class().as_str(),
        "q": cm.q(),
        "t_cycle": cm.factor_cycle(),
        "beta": beta,
        "periodic_points": points,
        "chaos": chaos,
    });
    out.json("map_report.json", &report)?;
    println!("q {} ({})", cm.q(), fs.parity_class().as_str());
    for p in &points {
        println!(
            "omega {} x {:.10} multiplier {:.6} {}",
            p.omega,
            p.x,
            p.multiplier,
            p.stability.as_str()
        );
    }
    if chaos {
        println!("period-3 points found: chaotic in the sense of Li and Yorke");
    }
    println!("{}", curve.display());
    Ok(())
}

#[derive(Serialize)]
struct ScanConfig {
    #[serde(flatten)]
    common: Common,
    xprev_range: Axis,
    xcurr_range: Axis,
}

pub fn scan(o: &Options) -> Result<(), CliError> {
    let (common, cycle) = Common::resolve(o)?;
    let axis = |s: &Option<String>| parse_axis(s.as_deref().unwrap_or("0.2:2.5:20"));
    let cfg = ScanConfig {
        xprev_range: axis(&o.xprev_range)?,
        xcurr_range: axis(&o.xcurr_range)?,
        common,
    };
    let range = |a: Axis| AxisRange::new(a.lo, a.hi, a.count);
    let grid = ScanGrid {
        x_prev_range: range(cfg.xprev_range),
        x_curr_range: range(cfg.xcurr_range),
        cycle,
        params: cfg.common.params(),
    };
    grid.validate()?;
    let result = basin_scan(&grid)?;
    let out = Writer::new(&cfg.common.out, "scan", &cfg)?;
    let rows = result.cells.iter().map(|c| {
        vec![
            num(c.initial.0),
            num(c.initial.1),
            c.cycle_id.to_string(),
            c.report.period.map(|p| p.to_string()).unwrap_or_default(),
        ]
    });
    let cells = out.csv(
        "scan_cells.csv",
        &["x_prev", "x_curr", "cycle_id", "period"],
        rows,
    )?;
    let rows = result.cycles.iter().map(|c| {
        let values: Vec<String> = c.values.iter().map(|v| num(*v)).collect();
        vec![
            c.id.to_string(),
            c.classification.as_str().into(),
            c.period.map(|p| p.to_string()).unwrap_or_default(),
            c.cells.to_string(),
            values.join(";"),
        ]
    });
    out.csv(
        "scan_cycles.csv",
        &["cycle_id", "classification", "period", "cells", "values"],
        rows,
    )?;
    for c in &result.cycles {
        println!(
            "cycle {}: {} period {} cells {} first {}",
            c.id,
            c.classification.as_str(),
            c.period.map_or("-".into(), |p| p.to_string()),
            c.cells,
            opt_num(c.values.first().copied())
        );
    }
    println!("{}", cells.display());
    Ok(())
}

#[derive(Serialize)]
struct VerifyConfig {
    only: Option<String>,
    tolerance_scale: f64,
    seed: u64,
    out: PathBuf,
}

pub fn verify(o: &Options) -> Result<(), CliError> {
    let defaults = SuiteOptions::default();
    let cfg = VerifyConfig {
        only: o.only.clone(),
        tolerance_scale: o.tolerance_scale.unwrap_or(defaults.tolerance_scale),
        seed: o.seed.unwrap_or(defaults.seed),
        out: o.out.clone().unwrap_or_else(|| DEFAULT_OUT.into()),
    };
    let results = run_suite(&SuiteOptions {
        only: cfg.only.clone(),
        tolerance_scale: cfg.tolerance_scale,
        seed: cfg.seed,
    });
    if results.is_empty() {
        return Err(CliError::Usage(format!(
            "no criterion matches '{}'",
            cfg.only.unwrap_or_default()
        )));
    }
    let out = Writer::new(&cfg.out, "verify", &cfg)?;
    for r in &results {
        println!("{}", r.summary_line());
    }
    let path = out.json("verify_report.json", &results)?;
    println!("{}", path.display());
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed, results.len()));
    }
    Ok(())
}
