use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_econophys"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const SPEC: &str = r#"{
    "schema_version": 1,
    "simulation": {
        "num_agents": 200,
        "initial_balance": 100,
        "rule": {"type": "uniform_random_fraction"},
        "boundary": {"type": "no_debt"},
        "sweeps": 1000,
        "seed": 5,
        "snapshot_every": 10
    },
    "replicates": 2,
    "outputs": ["fits", "entropy_series", "snapshots", "stationarity"],
    "analysis": {"average_last": 50, "stationarity": {"window": 100, "epsilon": 0.05, "consecutive": 3}},
    "expectations": {"temperature_range": [90, 110], "max_ks": 0.05}
}"#;

const SWEEP_SPEC: &str = r#"{
    "schema_version": 1,
    "simulation": {
        "num_agents": 200,
        "initial_balance": 100,
        "rule": {"type": "uniform_random_fraction"},
        "boundary": {"type": "reserve_ratio", "ratio": 0.5},
        "sweeps": 1000,
        "seed": 5,
        "snapshot_every": 10
    },
    "outputs": ["fits"],
    "sweep_axes": [{"path": "simulation.boundary.ratio", "values": [0.5, 0.8, 1.0]}]
}"#;

fn write_spec(dir: &Path, text: &str) -> String {
    let path = dir.join("spec.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_outputs_with_hash_headers() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), SPEC);
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        "--config",
        &spec,
        "--out",
        out.to_str().unwrap(),
        "--assert",
        "--threads",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let results: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    let hash = results["config_hash"].as_str().unwrap().to_owned();
    assert_eq!(hash.len(), 64);
    assert_eq!(results["replicates"].as_array().unwrap().len(), 2);
    assert_eq!(results["passed"], true);

    for name in ["histogram.csv", "series.csv", "snapshots.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(
            first.starts_with("# units:") && first.contains(&hash),
            "{name}: {first}"
        );
    }
    let hist = fs::read_to_string(out.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().nth(1), Some("bin_left,count,probability"));
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(
        series.lines().nth(1),
        Some("sweep,entropy,temperature,ks_to_exponential")
    );
    // Initial snapshot plus one every 10 sweeps.
    assert_eq!(series.lines().count(), 2 + 101);
    assert!(out.join("fits.json").exists());
}

#[test]
fn identical_specs_give_identical_results() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), SPEC);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(
        code(&run(&[
            "run",
            "--config",
            &spec,
            "--out",
            a.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "run",
            "--config",
            &spec,
            "--out",
            b.to_str().unwrap(),
            "--threads",
            "1"
        ])),
        0
    );
    for name in ["results.json", "histogram.csv", "series.csv"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn schema_errors_exit_1_with_location() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        dir.path(),
        &SPEC.replace("\"num_agents\": 200", "\"num_agents\": -3"),
    );
    let o = run(&[
        "run",
        "--config",
        &spec,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("simulation.num_agents") && err.contains("line 4"),
        "{err}"
    );

    let spec = write_spec(
        dir.path(),
        &SPEC.replace("\"replicates\": 2", "\"replicates\": 0"),
    );
    assert_eq!(code(&run(&["run", "--config", &spec])), 1);

    assert_eq!(
        code(&run(&["run", "--config", "/nonexistent/spec.json"])),
        1
    );
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["run"])), 1);
}

#[test]
fn failed_expectations_exit_2_only_under_assert() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), &SPEC.replace("[90, 110]", "[500, 600]"));
    let out = dir.path().join("out");
    let o = run(&["run", "--config", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "run",
        "--config",
        &spec,
        "--out",
        out.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL temperature_range"));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), SPEC);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("out");
    let o = run(&["run", "--config", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[
        "oracle",
        "--agents",
        "2",
        "--money",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), SWEEP_SPEC);
    let out = dir.path().join("sweep");
    let o = run(&["sweep", "--config", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3);
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    let points = sweep["points"].as_array().unwrap();
    for (p, r) in points.iter().zip([0.5, 0.8, 1.0]) {
        let t = p["result"]["theory"]["positive_temperature"]
            .as_f64()
            .unwrap();
        assert!((t - 100.0 / r).abs() < 1e-9);
    }
    assert_ne!(points[0]["master_seed"], points[1]["master_seed"]);
    assert!(out.join("point_002").join("results.json").exists());

    // A plain run config has nothing to sweep.
    let plain = write_spec(dir.path(), SPEC);
    assert_eq!(
        code(&run(&[
            "sweep",
            "--config",
            &plain,
            "--out",
            out.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn kinetic_exports_stationary_csv() {
    let dir = TempDir::new().unwrap();
    let text = SPEC.replace(
        "\"replicates\": 2,",
        "\"replicates\": 2, \"kinetic\": {\"step\": 1, \"points\": 120, \"initial_money\": 10, \"kernel\": {\"type\": \"fixed_step\", \"steps\": 1}},",
    );
    let spec = write_spec(dir.path(), &text);
    let out = dir.path().join("k");
    let o = run(&[
        "kinetic",
        "--config",
        &spec,
        "--out",
        out.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("stationary.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# units:"));
    assert_eq!(lines.next(), Some("m,P"));
    let total: f64 = lines
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);

    let spec = write_spec(dir.path(), SPEC);
    assert_eq!(
        code(&run(&[
            "kinetic",
            "--config",
            &spec,
            "--out",
            out.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn fit_reads_a_histogram_written_by_run() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), SPEC);
    let out = dir.path().join("out");
    assert_eq!(
        code(&run(&[
            "run",
            "--config",
            &spec,
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let fits = dir.path().join("fits");
    let hist = out.join("histogram.csv");
    let o = run(&[
        "fit",
        "--input",
        hist.to_str().unwrap(),
        "--out",
        fits.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fits.join("fits.json")).unwrap()).unwrap();
    let t = fit["exponential"]["temperature"].as_f64().unwrap();
    assert!((t - 100.0).abs() < 10.0, "{t}");

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "bin_left,count\n0,x\n").unwrap();
    assert_eq!(
        code(&run(&[
            "fit",
            "--input",
            bad.to_str().unwrap(),
            "--out",
            fits.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn oracle_small_instances() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let o = run(&[
        "oracle",
        "--agents",
        "2",
        "--money",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("oracle.json")).unwrap()).unwrap();
    for p in report["enumerated"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    let o = run(&[
        "oracle",
        "--agents",
        "3",
        "--money",
        "0",
        "--out",
        out.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&[
        "oracle",
        "--agents",
        "10",
        "--money",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("state space too large"));
}
