use std::process::{Command, Output};

use sinckit_cli::{read_scan_csv, CSV_HEADER};

fn sinckit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinckit"))
        .args(args)
        .env_remove("SINCKIT_MAX_SEGMENTS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn eval_worked_example() {
    let out = sinckit(&[
        "eval",
        "--function",
        "paper-example",
        "--tau",
        "1",
        "--sigma",
        "1",
        "--n",
        "4",
        "--lambda",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["abs_diff"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["threshold"], 0.5);
}

#[test]
fn eval_constant() {
    let out = sinckit(&[
        "eval",
        "--function",
        "constant",
        "--n",
        "2",
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["closed_form"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert_eq!(v["pass"], true);
}

#[test]
fn eval_below_threshold() {
    let base = [
        "eval",
        "--function",
        "paper-example",
        "--tau",
        "4",
        "--sigma",
        "1",
        "--n",
        "3",
        "--lambda",
        "2",
    ];
    let out = sinckit(&base);
    assert_eq!(out.status.code(), Some(3));
    let mut args = base.to_vec();
    args.push("--no-enforce");
    let out = sinckit(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["above_threshold"], false);
    assert_eq!(v["pass"], false);
    assert!(v["abs_diff"].as_f64().unwrap() > 1e-3);
}

#[test]
fn scan_threshold_sweep_csv() {
    let out = sinckit(&[
        "scan",
        "--function",
        "paper-example",
        "--tau",
        "4",
        "--sigma",
        "1",
        "--n",
        "3",
        "--lambda-min",
        "1",
        "--lambda-max",
        "8",
        "--points",
        "15",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let rows = read_scan_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 15);
    assert!(rows.windows(2).all(|w| w[0].lambda < w[1].lambda));
    for r in &rows {
        if r.lambda > 4.0 {
            assert!(r.above_threshold);
            assert!(r.abs_diff < 1e-6, "lambda {}: {}", r.lambda, r.abs_diff);
        }
    }
}

#[test]
fn scan_csv_round_trips_through_file() {
    let out = sinckit(&[
        "scan",
        "--function",
        "constant",
        "--n",
        "2",
        "--lambda-min",
        "1",
        "--lambda-max",
        "5",
        "--points",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    std::fs::write(&path, &out.stdout).unwrap();
    let rows = read_scan_csv(std::fs::File::open(&path).unwrap()).unwrap();

    let mut again = Vec::new();
    sinckit_cli::write_scan_csv(&rows, &mut again).unwrap();
    assert_eq!(again, out.stdout);
    for r in &rows {
        assert!((r.closed_form - std::f64::consts::FRAC_PI_2 * r.lambda).abs() < 1e-12);
    }
}

#[test]
fn scan_json_matches_figure_points() {
    let out = sinckit(&[
        "scan",
        "--function",
        "paper-example",
        "--tau",
        "1",
        "--sigma",
        "1",
        "--n",
        "4",
        "--lambda-min",
        "2",
        "--lambda-max",
        "4",
        "--points",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let closed: Vec<f64> = rows
        .iter()
        .map(|r| r["closed_form"].as_f64().unwrap())
        .collect();
    for (got, want) in closed
        .iter()
        .zip([6.8355147567, 23.4597868323, 55.9454132923])
    {
        assert!((got - want).abs() < 1e-9);
    }
    assert!(closed.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn segment_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sinckit"))
        .args([
            "eval",
            "--function",
            "cos",
            "--n",
            "1",
            "--lambda",
            "2",
            "--tol",
            "1e-12",
        ])
        .env("SINCKIT_MAX_SEGMENTS", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_sinckit"))
        .args([
            "eval",
            "--function",
            "constant",
            "--n",
            "2",
            "--lambda",
            "1",
        ])
        .env("SINCKIT_MAX_SEGMENTS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn coeffs_tables() {
    let v = json(&sinckit(&["coeffs", "--n", "4"]));
    assert_eq!(v["rows"][0]["prefactor"], "-1/12");
    assert_eq!(v["rows"][0]["derivative_order"], 2);
    assert_eq!(v["rows"][1]["prefactor"], "-2/9");
    assert_eq!(v["outer_weight_over_pi"], "-3/2");

    let v = json(&sinckit(&["coeffs", "--n", "1"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["outer_weight_over_pi"], "1/2");

    let v = json(&sinckit(&["coeffs", "--n", "3"]));
    assert_eq!(v["rows"][0]["term"], "-1/6*f''(0)");
    assert_eq!(v["rows"][1]["term"], "-1/2*f(0)");
    assert_eq!(v["outer_weight_over_pi"], "-3/4");

    let out = sinckit(&["coeffs", "--n", "4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "l,power,prefactor,derivative_order\n0,1,-1/12,2\n1,3,-2/9,0\n"
    );

    assert_eq!(sinckit(&["coeffs", "--n", "41"]).status.code(), Some(4));
}

#[test]
fn fp_reports() {
    let v = json(&sinckit(&[
        "fp",
        "--function",
        "paper-example",
        "--tau",
        "1",
        "--sigma",
        "1",
        "--m",
        "2",
    ]));
    assert!(v["difference"].as_f64().unwrap() <= 1e-7);
    let one = v["taylor_subtraction"].as_f64().unwrap();
    let v = json(&sinckit(&[
        "fp",
        "--function",
        "paper-example",
        "--tau",
        "2",
        "--sigma",
        "1",
        "--m",
        "2",
    ]));
    assert!((v["closed_form_mellin"].as_f64().unwrap() - 8.0 * one).abs() < 1e-8);
    let v = json(&sinckit(&["fp", "--function", "constant", "--m", "1"]));
    assert!(v["taylor_subtraction"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["closed_form_mellin"].is_null());
}

#[test]
fn oracle_and_integrand() {
    let v = json(&sinckit(&[
        "oracle",
        "--function",
        "constant",
        "--n",
        "3",
        "--lambda",
        "1",
    ]));
    assert!((v[0]["value"].as_f64().unwrap() - 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-8);

    let out = sinckit(&[
        "integrand",
        "--function",
        "paper-example",
        "--sigma",
        "1",
        "--n",
        "4",
        "--lambda",
        "2,3,4",
        "--x-max",
        "5",
        "--points",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 33);
    assert!(text.starts_with("lambda,x,value\n"));
}

#[test]
fn bad_arguments_exit_4() {
    assert_eq!(
        sinckit(&["eval", "--function", "nope", "--n", "2", "--lambda", "1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        sinckit(&["eval", "--function", "constant", "--n", "2"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        sinckit(&[
            "eval",
            "--function",
            "paper-example",
            "--n",
            "2",
            "--lambda",
            "1"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(
        sinckit(&[
            "scan",
            "--function",
            "constant",
            "--n",
            "2",
            "--lambda-min",
            "3",
            "--lambda-max",
            "1",
            "--points",
            "4"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(sinckit(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(sinckit(&["--help"]).status.code(), Some(0));
    assert_eq!(sinckit(&["--version"]).status.code(), Some(0));
}
