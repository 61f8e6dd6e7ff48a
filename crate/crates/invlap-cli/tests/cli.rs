//! End-to-end contract tests for the `invlap` binary: row counts, schema,
//! closed-form agreement, verdict wording, determinism, round-trips, and
//! exit codes.

use std::process::{Command, Output};

use invlap::extremal::g1_closed;
use invlap::ModelParams;

fn invlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invlap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    let header = lines.next().expect("header row");
    assert_eq!(header, "r,g_value,a_star,method");
    lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn gp_curve_rows_match_closed_form() {
    let output = invlap(&[
        "gp-curve", "--n", "3", "--alpha", "0", "--p", "1", "--steps", "5", "--r-max", "0.8",
    ]);
    assert!(output.status.success());
    let rows = csv_rows(&stdout_of(&output));
    assert_eq!(rows.len(), 5);

    let params = ModelParams::new(3, 0.0).unwrap();
    for (i, row) in rows.iter().enumerate() {
        let r: f64 = row[0].parse().unwrap();
        let g: f64 = row[1].parse().unwrap();
        let expected_r = 0.8 * i as f64 / 4.0;
        assert!((r - expected_r).abs() < 1e-15);
        // 17 significant digits round-trip binary64 exactly, so the parsed
        // value must equal the library value bit-for-bit.
        assert_eq!(g, g1_closed(&params, r).unwrap(), "row {i}");
        assert_eq!(row[3], "closed_form");
    }
}

#[test]
fn gp_curve_center_row_is_zero_for_sup_data() {
    let output = invlap(&[
        "gp-curve", "--n", "4", "--alpha", "0.5", "--p", "inf", "--steps", "2", "--r-max", "0.5",
    ]);
    assert!(output.status.success());
    let rows = csv_rows(&stdout_of(&output));
    assert_eq!(rows.len(), 2);
    let g0: f64 = rows[0][1].parse().unwrap();
    assert_eq!(g0, 0.0);
    let g1: f64 = rows[1][1].parse().unwrap();
    assert!(g1 > 0.0);
}

#[test]
fn csv_reformat_is_bit_for_bit() {
    let output = invlap(&["gp-curve", "--n", "3", "--alpha", "1", "--p", "2", "--steps", "4"]);
    assert!(output.status.success());
    for row in csv_rows(&stdout_of(&output)) {
        for cell in &row[..3] {
            let value: f64 = cell.parse().unwrap();
            assert_eq!(&format!("{value:.16e}"), cell);
        }
    }
}

#[test]
fn json_mirrors_csv_values() {
    let csv_out = invlap(&["gp-curve", "--steps", "3", "--p", "2"]);
    let json_out = invlap(&["gp-curve", "--steps", "3", "--p", "2", "--format", "json"]);
    assert!(csv_out.status.success() && json_out.status.success());
    let rows = csv_rows(&stdout_of(&csv_out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&json_out)).unwrap();
    let array = parsed.as_array().unwrap();
    assert_eq!(array.len(), rows.len());
    for (row, obj) in rows.iter().zip(array) {
        let csv_g: f64 = row[1].parse().unwrap();
        assert_eq!(obj["g_value"].as_f64().unwrap(), csv_g);
        let csv_a: f64 = row[2].parse().unwrap();
        assert_eq!(obj["a_star"].as_f64().unwrap(), csv_a);
        assert_eq!(obj["method"].as_str().unwrap(), row[3]);
    }
}

#[test]
fn identical_configs_produce_identical_artifacts() {
    let first = invlap(&["gp-curve", "--n", "6", "--alpha", "1", "--p", "inf", "--steps", "8"]);
    let second = invlap(&["gp-curve", "--n", "6", "--alpha", "1", "--p", "inf", "--steps", "8"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn figure1_default_verdict_is_non_monotone() {
    let output = invlap(&["figure1"]);
    assert!(output.status.success());
    let rows = csv_rows(&stdout_of(&output));
    assert_eq!(rows.len(), 400);
    let summary = String::from_utf8(output.stderr).unwrap();
    assert!(summary.contains("verdict: non-monotone"), "summary: {summary}");
    assert!(summary.contains("argmax r*"));
}

#[test]
fn figure1_override_is_monotone() {
    let output = invlap(&["figure1", "--n", "3", "--alpha", "0", "--steps", "120"]);
    assert!(output.status.success());
    let summary = String::from_utf8(output.stderr).unwrap();
    assert!(summary.contains("verdict: monotone"), "summary: {summary}");
}

#[test]
fn figure1_two_steps_has_zero_first_row() {
    let output = invlap(&["figure1", "--steps", "2"]);
    assert!(output.status.success());
    let rows = csv_rows(&stdout_of(&output));
    assert_eq!(rows.len(), 2);
    let g0: f64 = rows[0][1].parse().unwrap();
    assert_eq!(g0, 0.0);
}

#[test]
fn schwarz_is_seed_deterministic() {
    let args = ["schwarz", "--steps", "3", "--trials", "2", "--p", "2"];
    let first = invlap(&args);
    let second = invlap(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let reseeded = invlap(&["schwarz", "--steps", "3", "--trials", "2", "--p", "2", "--seed", "7"]);
    assert!(reseeded.status.success());
    assert_ne!(first.stdout, reseeded.stdout);
}

#[test]
fn kernel_table_mass_routes_agree() {
    let output = invlap(&["kernel", "--n", "6", "--alpha", "1", "--steps", "5"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,mass_closed,mass_quadrature,kernel_min,kernel_max"
    );
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let closed: f64 = cells[1].parse().unwrap();
        let quad: f64 = cells[2].parse().unwrap();
        assert!((closed - quad).abs() <= 1e-9 * closed);
    }
}

#[test]
fn verify_single_check_passes() {
    let output = invlap(&["verify", "--check", "eq4.2-exponent"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("eq4.2-exponent: PASS"));
    assert!(text.contains("equator kernel value"));
}

#[test]
fn verify_lists_all_checks() {
    let output = invlap(&["verify", "--list"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    for name in [
        "p1-closed-form",
        "p2-closed-form",
        "pinf-closed-form",
        "figure1",
        "gradient-at-zero",
        "schwarz-random",
        "p1-sharpness",
        "kernel-identities",
        "eq4.2-exponent",
    ] {
        assert!(text.contains(name));
    }
}

#[test]
fn bad_parameters_exit_two() {
    assert_eq!(invlap(&["gp-curve", "--n", "2"]).status.code(), Some(2));
    assert_eq!(invlap(&["gp-curve", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(invlap(&["gp-curve", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(invlap(&["gp-curve", "--r-max", "1.0"]).status.code(), Some(2));
    assert_eq!(invlap(&["gp-curve", "--alpha", "-0.5"]).status.code(), Some(2));
    assert_eq!(invlap(&["verify", "--check", "bogus"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_artifact() {
    let dir = std::env::temp_dir().join("invlap-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let output = invlap(&[
        "gp-curve", "--steps", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("r,g_value,a_star,method\n"));
    assert_eq!(text.lines().count(), 4);
    std::fs::remove_file(path).unwrap();
}
