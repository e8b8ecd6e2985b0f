use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ricker_core::{iterate_direct, InitialData, ParameterCycle};

fn ricker(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricker"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Data rows of a CSV, after the `#` header lines and the column row.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json_body(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    serde_json::from_str(&body).unwrap()
}

#[test]
fn simulate_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(
        dir.path(),
        &[
            "simulate",
            "--a",
            "1,1.9,0.8",
            "--init",
            "1:0.8",
            "--steps",
            "200",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let csv = dir.path().join("simulate_0.csv");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# ricker simulate\n# config: "));
    assert!(!text.contains('\r'));
    assert!(text.contains("\"burn_in\":50000") && text.contains("\"start_index\":0"));
    let data = rows(&csv);
    assert_eq!(data.len(), 200);
    let c = ParameterCycle::new(vec![1.0, 1.9, 0.8]).unwrap();
    let trace = iterate_direct(&c, InitialData::new(1.0, 0.8).unwrap(), 200).unwrap();
    for (row, x) in data.iter().zip(&trace.samples) {
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), x.to_bits());
        assert_eq!(row[3], "direct");
    }
    assert_eq!(data[0][2], "odd");
    let meta = json_body(&dir.path().join("simulate_0.json"));
    assert_eq!(meta["cycle_report"]["period"], 6);
    assert_eq!(meta["parity_class"], "OddPeriodic2p");
}

#[test]
fn simulate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--a",
        "1.4,1.8,1.6,0.3",
        "--init",
        "0.5:0.5",
        "--init",
        "2:1",
        "--steps",
        "400",
    ];
    assert!(ricker(a.path(), &args).status.success());
    assert!(ricker(b.path(), &args).status.success());
    for name in [
        "simulate_0.csv",
        "simulate_1.csv",
        "simulate_0.json",
        "simulate_1.json",
    ] {
        let x = fs::read_to_string(a.path().join(name)).unwrap();
        let y = fs::read_to_string(b.path().join(name)).unwrap();
        // only the output directory differs
        let strip = |s: &str, d: &Path| s.replace(&d.display().to_string(), "OUT");
        assert_eq!(strip(&x, a.path()), strip(&y, b.path()), "{name}");
    }
}

#[test]
fn even_cycle_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(
        dir.path(),
        &[
            "simulate",
            "--a",
            "1.4,1.8,1.6,0.3",
            "--init",
            "0.5:0.5",
            "--steps",
            "400",
        ],
    );
    assert!(out.status.success());
    let data = rows(&dir.path().join("simulate_0.csv"));
    let x = |n: usize| data[n - 1][1].parse::<f64>().unwrap();
    assert!(x(400) < 1e-12 && x(398) < 1e-12);
    assert!((x(399) - x(395)).abs() < 1e-8);
    assert!((x(399) + x(397) - 3.0).abs() < 1e-6);
}

#[test]
fn constant_forcing_stays_at_one() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ricker(
        dir.path(),
        &["simulate", "--a", "2", "--init", "1:1", "--steps", "10"]
    )
    .status
    .success());
    let data = rows(&dir.path().join("simulate_0.csv"));
    assert_eq!(data.len(), 10);
    assert!(data.iter().all(|r| r[1].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn factored_path_and_t0_initials() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(
        dir.path(),
        &[
            "simulate",
            "--a",
            "1,1.9,0.8",
            "--t0",
            "2",
            "--xprev",
            "0.5",
            "--path",
            "factored",
            "--steps",
            "50",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let data = rows(&dir.path().join("simulate_0.csv"));
    assert_eq!(data[0][3], "factored");
}

#[test]
fn factor_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(dir.path(), &["factor", "--a", "1,1.9,0.8", "--t0", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("class OddPeriodic2p"));
    let rep = json_body(&dir.path().join("factor_report.json"));
    assert_eq!(rep["q"], 6);
    assert_eq!(rep["t_cycle"].as_array().unwrap().len(), 6);
    let t = rows(&dir.path().join("factor_t.csv"));
    assert_eq!(t.len(), 101);
    assert_eq!(t[0][1].parse::<f64>().unwrap(), 2.0);

    let out = ricker(
        dir.path(),
        &["factor", "--a", "1.4,1.8,1.6,0.3", "--t0", "1"],
    );
    assert!(stdout(&out).contains("EvenUnboundedNeg"));
    let rep = json_body(&dir.path().join("factor_report.json"));
    assert!((rep["ln_t_drift_per_period"].as_f64().unwrap() + 0.9).abs() < 1e-12);

    let out = ricker(dir.path(), &["factor", "--a", "1,1", "--t0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not minimal"));
}

fn points(dir: &Path) -> Vec<(usize, String)> {
    rows(&dir.join("map_points.csv"))
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[3].clone()))
        .collect()
}

#[test]
fn map_reproduces_figure_patterns() {
    let dir = tempfile::tempdir().unwrap();
    let fig = |init: &str, omega: &str| {
        let out = ricker(
            dir.path(),
            &[
                "map",
                "--a",
                "1,2,4",
                "--start-index",
                "1",
                "--init",
                init,
                "--omega",
                omega,
            ],
        );
        assert!(out.status.success(), "{out:?}");
        (
            points(dir.path()),
            json_body(&dir.path().join("map_report.json")),
        )
    };
    let (p, _) = fig("1:0.8", "1");
    assert_eq!(p, vec![(1, "stable".to_string())]);
    let (p, _) = fig("1:1", "1,2");
    assert!(p.contains(&(1, "unstable".into())) && p.contains(&(2, "stable".into())));
    assert!(!p.contains(&(1, "stable".into())));
    let (p, rep) = fig("1:6", "3");
    assert_eq!(p.len(), 6);
    assert!(p.iter().all(|q| q.1 == "unstable"));
    assert_eq!(rep["chaos"], true);
    let curve = rows(&dir.path().join("map_curve.csv"));
    assert_eq!(curve.len(), 1000);
    assert_eq!(curve[0].len(), 4);
}

#[test]
fn map_rejects_unbounded_factor() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(dir.path(), &["map", "--a", "1.4,1.8,1.6,0.3", "--t0", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(
        dir.path(),
        &[
            "scan",
            "--a",
            "1.4,1.8,1.6,0.3",
            "--xprev-range",
            "0.1:3:10",
            "--xcurr-range",
            "0.1:3:10",
        ],
    );
    assert!(out.status.success(), "{out:?}");
    let cells = rows(&dir.path().join("scan_cells.csv"));
    assert_eq!(cells.len(), 100);
    assert!(cells.iter().all(|c| c[2] == "0"));
    assert_eq!(rows(&dir.path().join("scan_cycles.csv")).len(), 1);

    let out = ricker(
        dir.path(),
        &[
            "scan",
            "--a",
            "1,1.9,0.8",
            "--xprev-range",
            "1:2:1",
            "--xcurr-range",
            "1:2:1",
        ],
    );
    assert!(out.status.success());
    assert_eq!(rows(&dir.path().join("scan_cells.csv")).len(), 1);
    assert_eq!(rows(&dir.path().join("scan_cycles.csv")).len(), 1);

    let out = ricker(
        dir.path(),
        &["scan", "--a", "1,1.9,0.8", "--xprev-range", "2:1:3"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_subset_and_tampered_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = ricker(dir.path(), &["verify", "--only", "peven"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rep = json_body(&dir.path().join("verify_report.json"));
    let recs = rep.as_array().unwrap();
    assert_eq!(recs.len(), 1);
    for key in ["criterion", "status", "measured", "expected", "tolerance"] {
        assert!(recs[0].get(key).is_some(), "{key}");
    }
    assert_eq!(recs[0]["status"], "pass");

    let out = ricker(
        dir.path(),
        &["verify", "--only", "sacker", "--tolerance-scale", "1e-12"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    let out = ricker(dir.path(), &["verify", "--only", "nothing-matches"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"a": [1.0, 1.9, 0.8], "init": ["1:0.8"], "steps": 50}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert!(ricker(dir.path(), &["simulate", "--config", c])
        .status
        .success());
    assert_eq!(rows(&dir.path().join("simulate_0.csv")).len(), 50);
    assert!(
        ricker(dir.path(), &["simulate", "--config", c, "--steps", "20"])
            .status
            .success()
    );
    assert_eq!(rows(&dir.path().join("simulate_0.csv")).len(), 20);

    fs::write(&cfg, "{\n  \"a\": [1.0],\n  \"stepz\": 5\n}").unwrap();
    let out = ricker(dir.path(), &["simulate", "--config", c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_and_numeric_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        ricker(dir.path(), &["simulate", "--a", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ricker(dir.path(), &["simulate", "--a", "1", "--init", "1;2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ricker(dir.path(), &["bogus"]).status.code(), Some(2));
    let out = ricker(
        dir.path(),
        &["simulate", "--a", "800", "--init", "1:1", "--steps", "5"],
    );
    assert_eq!(out.status.code(), Some(3));
}
