use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kgwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgwave")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn records(bytes: &[u8]) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(bytes);
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = '{}' is not a number", row[key]))
}

fn stdout_of(args: &[&str]) -> Vec<HashMap<String, String>> {
    let out = kgwave(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    records(&out.stdout)
}

#[test]
fn exact_row_on_the_axis() {
    // J0(5) from standard tables
    let j0_5 = -0.177_596_771_314_338_3;
    let rows = stdout_of(&["field", "--t", "5", "--x", "0"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["method"], "exact");
    assert!((num(&rows[0], "value_re") + 0.5 * j0_5).abs() <= 1e-15);
    assert_eq!(num(&rows[0], "value_im"), 0.0);
}

#[test]
fn before_the_front_reads_zero() {
    let rows = stdout_of(&["field", "--t", "1", "--x", "3", "--methods", "exact,tube_loop"]);
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(num(row, "value_re"), 0.0);
        assert_eq!(row["status"], "ok");
    }
}

#[test]
fn rows_follow_time_then_space_then_method() {
    let rows = stdout_of(&[
        "field", "--t-min", "1", "--t-max", "2", "--nt", "2", "--x-min", "0", "--x-max", "0.5", "--nx", "2",
        "--methods", "tube_loop,exact",
    ]);
    let keys: Vec<(f64, f64, &str)> =
        rows.iter().map(|r| (num(r, "t"), num(r, "x"), r["method"].as_str())).collect();
    assert_eq!(
        keys,
        vec![
            (1.0, 0.0, "exact"),
            (1.0, 0.0, "tube_loop"),
            (1.0, 0.5, "exact"),
            (1.0, 0.5, "tube_loop"),
            (2.0, 0.0, "exact"),
            (2.0, 0.0, "tube_loop"),
            (2.0, 1.0, "exact"),
            (2.0, 1.0, "tube_loop"),
        ]
    );
}

#[test]
fn inapplicable_methods_are_reported_not_failed() {
    let rows = stdout_of(&["field", "--t", "5", "--x", "0", "--methods", "steepest_descent"]);
    assert_eq!(rows[0]["status"], "not_applicable");
    assert_eq!(rows[0]["value_re"], "");
}

#[test]
fn config_error_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let p = path.to_str().unwrap();
    let out = kgwave(&["field", "--t-min", "3", "--t-max", "1", "--out", p]);
    assert_eq!(code(&out), 2);
    assert!(!path.exists());
    for args in [
        vec!["field", "--methods", "bogus", "--out", p],
        vec!["field", "--omega-co", "0", "--out", p],
        vec!["compare", "--methods", "", "--out", p],
        vec!["dispersion", "--samples", "1", "--out", p],
        vec!["trace", "--ray-speed", "1.5", "--out", p],
        vec!["fdtd", "--cfl", "1", "--out", p],
        vec!["fdtd", "--probes", "5:100", "--out", p],
    ] {
        assert_eq!(code(&kgwave(&args)), 2, "{args:?}");
        assert!(!path.exists(), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# unit guide\nc = 2\nomega-co = 1\nt = 5\nx = 4\nmethods = exact\n").unwrap();
    let c = cfg.to_str().unwrap();
    let rows = stdout_of(&["field", "--config", c]);
    assert_eq!(num(&rows[0], "x"), 4.0);
    let overridden = stdout_of(&["field", "--config", c, "--x", "20"]);
    assert_eq!(num(&overridden[0], "x"), 20.0);
    assert_eq!(num(&overridden[0], "value_re"), 0.0);

    fs::write(&cfg, "c = 2\nbogus_key = 1\n").unwrap();
    assert_eq!(code(&kgwave(&["field", "--config", c])), 2);
    fs::write(&cfg, "c = two\n").unwrap();
    assert_eq!(code(&kgwave(&["field", "--config", c])), 2);
    assert_eq!(code(&kgwave(&["field", "--config", dir.path().join("missing").to_str().unwrap()])), 2);
}

#[test]
fn json_carries_config_and_rows() {
    let out = kgwave(&["field", "--t", "5", "--x", "0", "--methods", "exact,tube_loop", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["c"], 1.0);
    assert_eq!(v["config"]["methods"], "exact,tube_loop");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["method"], "tube_loop");
    let csv = stdout_of(&["field", "--t", "5", "--x", "0", "--methods", "exact,tube_loop"]);
    // the same 17 significant digits appear in both encodings
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(&csv[1]["value_re"]));
    assert_eq!(rows[1]["value_re"].as_f64().unwrap(), num(&csv[1], "value_re"));
}

#[test]
fn compare_passes_for_the_tube_loop() {
    let out = kgwave(&["compare", "--methods", "tube_loop"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&out.stdout);
    assert_eq!(rows[0]["status"], "pass");
    assert_eq!(num(&rows[0], "evaluated"), 400.0);
    assert!(num(&rows[0], "max_abs_dev") <= 1e-10);
}

#[test]
fn compare_flags_the_far_field_form_near_the_front() {
    let args = [
        "compare", "--methods", "far_asymptotic", "--t-min", "1", "--t-max", "2", "--nt", "3", "--x-min", "0.9",
        "--x-max", "0.99", "--nx", "3",
    ];
    let out = kgwave(&args);
    assert_eq!(code(&out), 3);
    assert_eq!(records(&out.stdout)[0]["status"], "violation");
    assert!(String::from_utf8_lossy(&out.stderr).contains("conventional validity range"));
    let mut loose = args.to_vec();
    loose.extend(["--tolerances", "far_asymptotic=1"]);
    assert_eq!(code(&kgwave(&loose)), 0);
}

#[test]
fn dispersion_svg_is_well_formed_and_table_is_on_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.svg");
    let out = kgwave(&["dispersion", "--c", "2", "--omega-co", "1.5", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("g")).count(), 2);
    assert!(doc.descendants().any(|n| n.has_tag_name("polyline")));

    let rows = stdout_of(&["dispersion", "--c", "2", "--omega-co", "1.5"]);
    // the default omega_max = 4·omega_co already places the cut-off on the grid
    assert_eq!(rows.len(), 201);
    assert_eq!(rows.iter().filter(|r| num(r, "k") == 0.0 && r["branch"] == "propagating").count(), 1);
    for r in &rows {
        let (w, k) = (num(r, "omega_sq"), num(r, "k_sq"));
        assert!((w - (4.0 * k + 2.25)).abs() <= 1e-12 * w.max(2.25));
    }
}

#[test]
fn trace_stays_on_the_level_set() {
    let rows = stdout_of(&["trace", "--ray-speed", "0.5"]);
    assert!(rows.iter().all(|r| num(r, "phase_residual").abs() <= 1e-8));
    let near_light = stdout_of(&["trace", "--ray-speed", "0.999"]);
    let saddle: Vec<_> = near_light.iter().filter(|r| r["index"] == "0").collect();
    assert_eq!(saddle.len(), 2);
    let expected = 1.0 / (1.0 - 0.999f64 * 0.999).sqrt();
    assert!((num(saddle[0], "omega_re").abs() - expected).abs() <= 1e-9 * expected);
    assert!((expected - 22.37).abs() < 0.01);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.svg");
    assert_eq!(code(&kgwave(&["trace", "--ray-speed", "0.999", "--format", "svg", "--out", path.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&path).unwrap();
    roxmltree::Document::parse(&text).unwrap();
}

#[test]
fn fdtd_converges_monotonically() {
    let rows = stdout_of(&["fdtd"]);
    let errors: Vec<f64> = rows.iter().filter(|r| r["kind"] == "level").map(|r| num(r, "max_error")).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn fdtd_wave_equation_limit() {
    let rows = stdout_of(&["fdtd", "--omega-co", "0", "--probes", "3:1,4:0,2.5:2", "--dx", "4e-3"]);
    for r in rows.iter().filter(|r| r["kind"] == "probe") {
        assert_eq!(num(r, "exact"), -0.5);
        assert!((num(r, "simulated") + 0.5).abs() <= 0.02 * 0.5);
    }
}

fn run_to(args: &[&str], path: &Path) -> Vec<u8> {
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(code(&kgwave(&full)), 0);
    fs::read(path).unwrap()
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["field", "--methods", "all", "--nt", "4", "--nx", "4", "--t-max", "10", "--format", "json"],
        vec!["compare", "--methods", "tube_loop,spectral_line", "--nt", "4", "--nx", "4", "--tolerance", "1e-6"],
        vec!["trace", "--format", "svg"],
    ] {
        let a = run_to(&args, &dir.path().join("a"));
        let b = run_to(&args, &dir.path().join("b"));
        assert_eq!(a, b, "{args:?}");
    }
}
