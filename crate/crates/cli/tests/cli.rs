use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn shinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-12
}

const XOR: &str = "x1,x2,y\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n";
const COPY: &str = "a,b,y\n0,0,0\n1,1,1\n0,0,0\n1,1,1\n";
const CONSTANT: &str = "x1,x2,y\n0,0,k\n0,1,k\n1,0,k\n1,1,k\n";

#[test]
fn xor_report() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "xor.csv", XOR);
    let out = shinv(&["invariants", arg(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(close(&doc["r_bar"], 0.0));
    assert!(close(&doc["v_bar"], 2.0));
    assert!(close(&doc["rsi_bits"], -1.0));
    assert!(close(&doc["drsi_bits"], -1.0));
    assert!(close(&doc["total_mi_bits"], 1.0));
    assert_eq!(doc["n_sources"], 2);
    assert_eq!(doc["well_defined"], true);
    assert_eq!(doc["metadata"]["n_rows"], 4);
    assert_eq!(doc["metadata"]["config"]["target"], "y");
}

#[test]
fn copy_report() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "copy.csv", COPY);
    let doc = json(&shinv(&["invariants", arg(&csv)]));
    assert!(close(&doc["r_bar"], 2.0));
    assert!(close(&doc["v_bar"], 0.0));
    assert!(close(&doc["rsi_bits"], 1.0));
    assert!(close(&doc["drsi_bits"], 1.0));
}

#[test]
fn constant_target_is_ill_defined() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "const.csv", CONSTANT);
    let out = shinv(&["invariants", arg(&csv)]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert!(doc["r_bar"].is_null());
    assert!(doc["v_bar"].is_null());
    assert!(doc["bounds"].is_null());
    assert!(close(&doc["rsi_bits"], 0.0));
    assert!(close(&doc["drsi_bits"], 0.0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn target_flag_selects_column() {
    let dir = TempDir::new().unwrap();
    // y first; target named explicitly
    let csv = write(&dir, "xor.csv", "y,x1,x2\n0,0,0\n1,0,1\n1,1,0\n0,1,1\n");
    let doc = json(&shinv(&["invariants", arg(&csv), "--target", "y"]));
    assert!(close(&doc["v_bar"], 2.0));
    assert_eq!(doc["metadata"]["variables"], serde_json::json!(["x1", "x2", "y"]));
    let out = shinv(&["invariants", arg(&csv), "--target", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "xor.csv", XOR);
    let a = shinv(&["invariants", arg(&csv)]);
    let b = shinv(&["invariants", arg(&csv)]);
    assert_eq!(a.stdout, b.stdout);
    let out = dir.path().join("report.json");
    assert_eq!(
        shinv(&["invariants", arg(&csv), "--output", arg(&out)]).status.code(),
        Some(0)
    );
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn json_keys_are_sorted() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "xor.csv", XOR);
    let text = String::from_utf8(shinv(&["invariants", arg(&csv)]).stdout).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
    for key in [
        "n_sources",
        "total_mi_bits",
        "marginal_mi_bits",
        "conditional_mi_bits",
        "r_bar",
        "v_bar",
        "rsi_bits",
        "drsi_bits",
        "bounds",
    ] {
        assert!(top.contains(&key), "{key}");
    }
}

#[test]
fn tsv_and_nats() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "xor.csv", XOR);
    let out = shinv(&["invariants", arg(&csv), "--format", "tsv", "--unit", "nats"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let field = |k: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{k}\t")))
            .unwrap()
            .to_string()
    };
    let ln2 = std::f64::consts::LN_2;
    assert!((field("total_mi_bits").parse::<f64>().unwrap() - ln2).abs() < 1e-11);
    assert!((field("rsi_bits").parse::<f64>().unwrap() + ln2).abs() < 1e-11);
    // ratios do not depend on the unit
    assert_eq!(field("v_bar"), "2.0");
    assert_eq!(field("metadata.config.unit"), "nats");
    assert_eq!(field("marginal_mi_bits"), "0.0,0.0");
}

#[test]
fn ragged_csv_names_line() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "bad.csv", "x1,x2,y\n0,0,0\n0,1\n");
    let out = shinv(&["invariants", arg(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let missing = dir.path().join("missing.csv");
    assert_eq!(shinv(&["invariants", arg(&missing)]).status.code(), Some(1));
}

fn antichain_lines(text: &str) -> usize {
    text.lines().filter(|l| !l.starts_with('#')).count()
}

#[test]
fn lattice_listing() {
    let two = shinv(&["lattice", "--n", "2"]);
    assert_eq!(two.status.code(), Some(0));
    assert_eq!(antichain_lines(&String::from_utf8(two.stdout).unwrap()), 4);

    let three = String::from_utf8(shinv(&["lattice", "--n", "3"]).stdout).unwrap();
    assert_eq!(antichain_lines(&three), 18);
    assert!(three.contains("# r-degree histogram: 0:8 1:6 2:3 3:1\n"));
    assert!(three.contains("# v-degree histogram: 0:8 1:6 2:3 3:1\n"));
    assert!(three.contains("{1}{2}{3}\t3\t0\n"));
    assert!(three.contains("{1,2,3}\t0\t3\n"));

    for bad in ["0", "6"] {
        assert_eq!(shinv(&["lattice", "--n", bad]).status.code(), Some(1));
    }
}

#[test]
fn oracle_check_examples() {
    let out = shinv(&["oracle-check", "--n", "2", "--trials", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert!(cols[1].parse::<f64>().unwrap() < 1e-9, "{line}");
        assert_eq!(cols[2], "pass");
    }
    assert!(text.ends_with("# result: pass\n"));

    let three = shinv(&["oracle-check", "--n", "3", "--trials", "200"]);
    assert_eq!(three.status.code(), Some(0));

    let strict = shinv(&["oracle-check", "--n", "2", "--trials", "50", "--tolerance", "0"]);
    assert_ne!(strict.status.code(), Some(0));

    assert_eq!(shinv(&["oracle-check", "--n", "5", "--trials", "1"]).status.code(), Some(1));
}

fn quantize_inputs(dir: &TempDir) -> (PathBuf, PathBuf) {
    let mut m = String::from("6 2\n");
    for k in 0..6 {
        m.push_str(&format!("{} {}\n", -1.0 + 0.37 * k as f64, (k as f64 * 0.9).sin()));
    }
    let matrix = write(dir, "m.txt", &m);
    let targets = write(dir, "t.txt", "a\nb\na\nb\na\nb\n");
    (matrix, targets)
}

#[test]
fn quantize_uses_grid_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (matrix, targets) = quantize_inputs(&dir);
    let args = ["quantize", "--matrix", arg(&matrix), "--targets", arg(&targets), "--seed", "3"];
    let a = shinv(&args);
    let b = shinv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let grid: Vec<f64> = (0..8).map(|l| -1.0 + 2.0 * l as f64 / 7.0).collect();
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,y"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        for c in &cells[..2] {
            let v: f64 = c.parse().unwrap();
            assert!(grid.iter().any(|g| (g - v).abs() < 1e-11), "{v}");
        }
    }
}

#[test]
fn quantize_label_mismatch_fails() {
    let dir = TempDir::new().unwrap();
    let (matrix, _) = quantize_inputs(&dir);
    let short = write(&dir, "short.txt", "a\nb\n");
    let out = shinv(&["quantize", "--matrix", arg(&matrix), "--targets", arg(&short)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quantized_table_feeds_invariants() {
    let dir = TempDir::new().unwrap();
    let (matrix, targets) = quantize_inputs(&dir);
    let csv = dir.path().join("q.csv");
    let q = shinv(&[
        "quantize", "--matrix", arg(&matrix), "--targets", arg(&targets), "--output", arg(&csv),
    ]);
    assert_eq!(q.status.code(), Some(0));
    assert!(q.stdout.is_empty());
    let out = shinv(&["invariants", arg(&csv)]);
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    assert_eq!(json(&out)["n_sources"], 2);
}
