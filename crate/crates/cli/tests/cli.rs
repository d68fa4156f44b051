use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TABLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table1.csv");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopole"))
        .args(args)
        .env_remove("MONOPOLE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn solve_reproduces_reference_cell() {
    let o = run(&["solve", "-e", "0.3", "-l", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!((v["a1"].as_f64().unwrap() - 3.59550462).abs() < 1e-4);
    assert!((v["b2"].as_f64().unwrap() + 2.86817001).abs() < 1e-4);
    assert!(v["residual_inf"].as_f64().unwrap() < 1e-10);
}

#[test]
fn solve_with_guess_on_reference_lattice() {
    let o = run(&[
        "solve",
        "-e",
        "1",
        "-l",
        "0",
        "--guess",
        "1.5,-0.9",
        "--r-outer",
        "0.9999",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!((v["a1"].as_f64().unwrap() - 1.67098122).abs() < 1e-6);
    assert!((v["b2"].as_f64().unwrap() + 1.02894746).abs() < 1e-6);
}

#[test]
fn negative_numbers_parse_as_values() {
    let o = run(&["solve", "--epsilon", "-1", "-l", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let v = stderr_json(&o);
    assert_eq!(v["error"], "invalid_params");
    assert!(v["detail"].is_string());
    assert!(v["context"].is_object());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["solve", "-e", "1"],
        &["solve", "-e", "1", "-l", "0", "--steps", "0"],
        &["solve", "-e", "1", "-l", "0", "--guess", "1"],
        &["solve", "-e", "1", "-l", "0", "--r-outer", "1.5"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let v = stderr_json(&o);
        assert!(v["error"].is_string(), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn numerical_failure_exits_one() {
    let o = run(&["solve", "-e", "0.1", "-l", "30", "--guess", "60,80"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stderr_json(&o);
    assert!(v["error"].is_string());
    assert!(v["context"].is_object());
}

#[test]
fn table_single_cell() {
    let o = run(&["table", "--eps", "1", "--lam", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "epsilon,lambda,a1,b2,residual_inf,iterations,status"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,3,"));
    assert!(lines[1].ends_with(",converged"));
}

#[test]
fn table_check_against_bundled_values() {
    let unit = run(&["table", "--check", TABLE]);
    assert_eq!(unit.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unit.stderr).contains("FAIL"));

    let lattice = run(&[
        "table",
        "--check",
        TABLE,
        "--r-outer",
        "0.9999",
        "--check-tol",
        "1e-6",
    ]);
    assert_eq!(lattice.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lattice.stderr).contains("25 cells compared"));
}

#[test]
fn thread_count_does_not_change_output() {
    let auto = run(&["table", "--eps", "0.3,1,3", "--lam", "0,10"]);
    let single = Command::new(env!("CARGO_BIN_EXE_monopole"))
        .args(["table", "--eps", "0.3,1,3", "--lam", "0,10"])
        .env("MONOPOLE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(auto.status.code(), Some(0));
    assert_eq!(auto.stdout, single.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_monopole"))
        .args(["table", "--eps", "1", "--lam", "0"])
        .env("MONOPOLE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn profile_shape_and_determinism() {
    let args = ["profile", "-e", "0.1", "-l", "0", "--sample", "200"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, run(&args).stdout);

    let text = stdout(&first);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(text.lines().next().unwrap(), "r,gamma,phi,dgamma,dphi");
    assert_eq!(rows.len(), 200);
    assert_eq!(&rows[0][..4], &[0.0, 0.0, 0.0, 0.0]);
    assert!(rows[0][4] > 0.0);
    for r in &rows {
        assert!(r[1] <= 0.0 && r[2] >= 0.0, "{r:?}");
    }
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] + 0.5).abs() < 1e-9);
    assert!((last[2] - 1.0).abs() < 1e-9);
}

#[test]
fn stability_mode_counts() {
    let count = |r: &str, lam: &str| -> Vec<(String, u64, bool)> {
        let o = run(&["stability", "-e", "1", "-l", lam, "-r", r]);
        assert_eq!(o.status.code(), Some(0));
        stdout_json(&o)
            .as_array()
            .unwrap()
            .iter()
            .map(|x| {
                (
                    x["fixed_point"].as_str().unwrap().to_string(),
                    x["unstable_mode_count"].as_u64().unwrap(),
                    x["phi_oscillatory"].as_bool().unwrap(),
                )
            })
            .collect()
    };
    let inner = count("0.4", "1");
    let outer = count("0.6", "1");
    assert_eq!(inner[0], ("HalfPlusOne".to_string(), 1, false));
    assert_eq!(outer[0], ("HalfPlusOne".to_string(), 2, false));
    assert!(count("0.4", "0").iter().all(|(_, _, osc)| !osc));
}

#[test]
fn verify_cheap_checks_pass() {
    let o = run(&["verify", "--series", "--order"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn out_writes_data_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cell.csv");
    let o = run(&[
        "solve",
        "-e",
        "1",
        "-l",
        "1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let data = std::fs::read_to_string(&path).unwrap();
    assert!(data.starts_with("r,gamma,phi,dgamma,dphi\n"));
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("cell.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["files"][0], "cell.csv");
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 1);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 2);

    let missing = Path::new("/nonexistent-dir/out.csv");
    let o = run(&[
        "solve",
        "-e",
        "1",
        "-l",
        "1",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "io");
}
