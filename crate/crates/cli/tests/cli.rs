use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mesodist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesodist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = mesodist(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Header plus numeric rows.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn decoherence_sweep_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let p = path.to_str().unwrap();
    ok(&["sweep", "--family", "decohered", "--l", "1.0", "--param", "t", "--from", "0", "--to", "5", "--steps", "500", "--out", p]);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["theta", "d_bures", "d_hs", "d_trace"]);
    assert_eq!(rows.len(), 501);
    for r in &rows {
        let q = 1.0 - (-r[0]).exp();
        assert!((r[1] - (q / 2.0).sqrt()).abs() < 1e-10, "{r:?}");
        assert!((r[2] - q / 2.0).abs() < 1e-10, "{r:?}");
        assert!((r[3] - q / 2.0).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn gradient_columns_and_metric_filter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let p = path.to_str().unwrap();
    ok(&["sweep", "--family", "depolarized", "--param", "x", "--from", "0", "--to", "0.999", "--steps", "500", "--gradients", "--out", p]);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["theta", "d_bures", "d_hs", "d_trace", "g_bures", "g_hs", "g_trace"]);
    assert_eq!(rows.len(), 501);
    let mid = &rows[250];
    assert!((mid[5] + 6f64.sqrt() / 4.0).abs() < 1e-6);
    assert!((mid[6] + 0.75).abs() < 1e-6);

    ok(&["sweep", "--family", "depolarized", "--metrics", "trace,hs", "--steps", "10", "--out", p]);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["theta", "d_hs", "d_trace"]);
    assert_eq!(rows.len(), 11);
}

#[test]
fn two_slab_sweep_to_stdout() {
    let out = ok(&["sweep", "--family", "two-slab-mix", "--f1", "0.05", "--f2", "0.001", "--param", "x", "--from", "0", "--to", "1", "--steps", "400"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 402);
    // x = 1 reproduces the reference exactly.
    assert!(text.ends_with("\n1,0,0,0\n"), "{}", text.lines().last().unwrap());
}

#[test]
fn log_sweep_spacing() {
    let out = ok(&["sweep", "--family", "decohered", "--from", "0.01", "--to", "1", "--steps", "2", "--log"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let thetas: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(thetas, ["0.01", "0.1", "1"]);
}

#[test]
fn crossover_reports() {
    let v = json(&ok(&["crossover", "--family", "decohered", "--metrics", "bures,hs", "--from", "0.1", "--to", "2"]));
    assert_eq!(v["crossover_found"], true);
    assert!((v["theta_star"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-4);
    assert_eq!(v["dominant_low_side"], "bures");
    assert_eq!(v["dominant_high_side"], "hs");
    assert!(v["residual"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(v["bracket"], serde_json::json!([0.1, 2.0]));

    let v = json(&ok(&["crossover", "--family", "decohered-bg", "--bg", "0.10", "--from", "0.1", "--to", "2"]));
    assert!((v["theta_star"].as_f64().unwrap() - 0.514028).abs() < 1e-5);

    // Time is measured in 1/l.
    let v = json(&ok(&["crossover", "--family", "decohered", "--l", "2"]));
    assert!((v["theta_star"].as_f64().unwrap() - std::f64::consts::LN_2 / 2.0).abs() < 1e-4);
}

#[test]
fn missing_crossover_is_success() {
    let v = json(&ok(&["crossover", "--family", "depolarized", "--metrics", "hs,trace"]));
    assert_eq!(v["crossover_found"], false);
    assert!(v["theta_star"].is_null());
    assert!(v["residual"].is_null());
    assert_eq!(v["dominant_low_side"], "trace");
    assert_eq!(v["dominant_high_side"], "trace");
}

#[test]
fn regenerated_mixture_crossover_runs() {
    let v = json(&ok(&["crossover", "--family", "singlet-regen-mix", "--f", "0.05", "--from", "0.01", "--to", "0.99"]));
    assert!(v["crossover_found"].is_boolean());
    if v["crossover_found"] == true {
        assert!((v["theta_star"].as_f64().unwrap() - 0.75).abs() < 1e-3);
    }
}

#[test]
fn grid_default_shape_and_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    ok(&["grid", "--out", path.to_str().unwrap()]);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["f1", "f2", "diff_bures_hs"]);
    assert_eq!(rows.len(), 3600);
    let diagonal: Vec<_> = rows.iter().filter(|r| r[0] == r[1]).collect();
    assert_eq!(diagonal.len(), 60);
    assert!(diagonal.iter().all(|r| r[2].abs() < 1e-12));
    assert!(rows.iter().all(|r| r[2] >= -1e-12));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let csv = dir.path().join("out.csv");
    fs::write(
        &cfg,
        format!(r#"{{"family": "decohered", "steps": 10, "gradients": true, "out": {:?}}}"#, csv.to_str().unwrap()),
    )
    .unwrap();
    ok(&["sweep", "--config", cfg.to_str().unwrap(), "--steps", "20"]);
    let (header, rows) = read_csv(&csv);
    assert_eq!(rows.len(), 21);
    assert_eq!(header.len(), 7);
}

#[test]
fn config_errors_exit_2_and_name_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"family": "decohered", "stepz": 3}"#).unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["sweep", "--family", "bogus"], "family"),
        (vec!["sweep"], "family"),
        (vec!["sweep", "--family", "decohered", "--steps", "1"], "steps"),
        (vec!["sweep", "--family", "decohered", "--from", "3", "--to", "1"], "from"),
        (vec!["sweep", "--family", "decohered", "--param", "x"], "param"),
        (vec!["sweep", "--family", "decohered", "--l", "-1"], "l"),
        (vec!["sweep", "--family", "depolarized", "--to", "1.5"], "x"),
        (vec!["sweep", "--family", "two-slab-mix", "--f2", "0.01"], "f1"),
        (vec!["sweep", "--family", "decohered", "--metrics", "bures,fidelity"], "metrics"),
        (vec!["crossover", "--family", "decohered", "--metrics", "bures"], "metrics"),
        (vec!["grid", "--x-fixed", "1.5"], "x_fixed"),
        (vec!["grid", "--family", "decohered"], "family"),
        (vec!["sweep", "--config", bad.to_str().unwrap()], "stepz"),
        (vec!["sweep", "--config", "/nonexistent/run.json"], "config"),
    ];
    for (args, field) in cases {
        let out = mesodist(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(field), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn unwritable_output_is_reported() {
    let out = mesodist(&["sweep", "--family", "decohered", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn accessibility_warning_goes_to_stderr() {
    let out = ok(&["sweep", "--family", "singlet-regen-mix", "--f", "0.3", "--steps", "2"]);
    assert!(stderr(&out).contains("warning"));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("theta,"));
}

#[test]
fn reproduce_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(&["reproduce", "all", "--out", a.path().to_str().unwrap()]);
    ok(&["reproduce", "all", "--out", b.path().to_str().unwrap()]);
    for name in ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "table-crossovers.json"] {
        let (x, y) = (fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
    let (header, rows) = read_csv(&a.path().join("fig1.csv"));
    assert_eq!(header.last().unwrap(), "diff_bures_hs");
    assert_eq!(rows.len(), 501);
    assert_eq!(read_csv(&a.path().join("fig2.csv")).1.len(), 3600);
    assert_eq!(read_csv(&a.path().join("fig3.csv")).1.len(), 401);
}

#[test]
fn reproduce_crossover_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["reproduce", "table-crossovers", "--out", dir.path().to_str().unwrap()]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("table-crossovers.json"));
    let v: Value = serde_json::from_slice(&fs::read(dir.path().join("table-crossovers.json")).unwrap()).unwrap();
    let entries = v["crossovers"].as_array().unwrap();
    let expected = [
        (0.69, std::f64::consts::LN_2),
        (0.67, 0.673348),
        (0.51, 0.514028),
        (0.5, 0.5),
        (0.6667, 2.0 / 3.0),
    ];
    assert_eq!(entries.len(), expected.len());
    for (e, (quoted, computed)) in entries.iter().zip(expected) {
        assert_eq!(e["paper"].as_f64().unwrap(), quoted);
        assert!((e["computed"].as_f64().unwrap() - computed).abs() < 1e-5, "{e}");
        assert!((e["computed"].as_f64().unwrap() - quoted).abs() < 0.01, "{e}");
    }
}

#[test]
fn help_explains_figure_names() {
    let out = ok(&["reproduce", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for t in ["fig1", "fig2", "fig3", "fig4", "table-crossovers", "caption"] {
        assert!(text.contains(t), "{t}");
    }
}
