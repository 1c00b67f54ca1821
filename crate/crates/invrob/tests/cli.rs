//! End-to-end checks of the command line binary: output formats, exit
//! codes, environment handling, and atomic writes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_invrob"));
    c.env_remove("INVROB_MARGIN");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn spec_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

#[test]
fn example_solves_and_reports_json() {
    let o = run(&["example", "--eps", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["x_star"][0].as_f64().unwrap() - 2.0).abs() <= 1e-6);
    assert!(v["v_star"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn builtin_solve_matches_the_example_byte_for_byte() {
    let a = run(&["example", "--eps", "0,5"]);
    let b = run(&["solve", "--builtin", "bicriteria-normal", "--eps", "0,5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn grid_emits_csv_that_is_stable_across_worker_counts() {
    let args = ["grid", "--builtin", "bicriteria-normal", "--grid", "0:1:0.5,0:1:0.5"];
    let one = bin().args(args).args(["--workers", "1"]).output().unwrap();
    let three = bin().args(args).args(["--workers", "3"]).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    let text = stdout(&one);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps1,eps2,x_star,d1_star,d2_star,V_star,rounds,max_violation"
    );
    assert_eq!(lines.count(), 9, "3x3 grid rows");
}

#[test]
fn grid_falls_back_to_json_for_non_tabular_instances() {
    let path = spec_path("box_gaussian_2d.json");
    let o = run(&["grid", "--file", path.to_str().unwrap(), "--grid", "0:1:0.5"]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells = v.as_array().expect("json array of cells");
    assert_eq!(cells.len(), 3);
    assert_eq!(cells[0]["eps"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_problems_exit_three() {
    assert_eq!(run(&["--definitely-not-a-flag"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--file", "/nonexistent/xyz.json"]).status.code(), Some(3));
    assert_eq!(
        run(&["grid", "--builtin", "bicriteria-normal", "--grid", "0:1:0.25,bad"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["example", "--eps", "1,2,3"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn infeasible_instances_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("impossible.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "schema": 1,
            "decision": {"bounds": [[-3.0, 3.0]]},
            "scenario": {"bounds": [[-1.0, 1.0]], "nominal": [[0.0]]},
            "objectives": [{"expr": "x[0]^2", "curvature": "convex"}],
            "budget": {"f_star": [-1.0], "eps": [0.0]},
            "coverage": {"family": "interval"},
            "measure": {"kind": "volume"}
        })
        .to_string(),
    )
    .unwrap();
    let o = run(&["solve", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn out_files_are_replaced_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("result.json");
    std::fs::write(&path, "sentinel").unwrap();
    let o = run(&["example", "--eps", "0,0", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains("sentinel"));
    let _: serde_json::Value = serde_json::from_str(&text).unwrap();
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name() != "result.json")
        .collect();
    assert!(leftovers.is_empty(), "temp files left behind: {leftovers:?}");
}

#[test]
fn dump_round_trips_through_check_and_matches_the_shipped_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("builtin.json");
    let o = run(&["spec", "dump", "bicriteria-normal", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dumped = std::fs::read(&path).unwrap();
    let shipped = std::fs::read(spec_path("bicriteria_normal.json")).unwrap();
    assert_eq!(dumped, shipped, "shipped builtin file is out of date");
    let c = run(&["spec", "check", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(v["coverage_instance"], "ok");
    assert_eq!(v["decision_dim"], 1);
}

#[test]
fn verify_accepts_solver_output_and_rejects_a_tampered_design() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let o = run(&["example", "--eps", "2,2", "--out", sol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let ok = run(&[
        "verify",
        "--builtin",
        "bicriteria-normal",
        "--eps",
        "2,2",
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&ok.stderr));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["feasible"], true);

    let mut tampered: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let hi = tampered["d_star"][1].as_f64().unwrap();
    tampered["d_star"][1] = serde_json::json!(hi + 1.5);
    std::fs::write(&sol, tampered.to_string()).unwrap();
    let bad = run(&[
        "verify",
        "--builtin",
        "bicriteria-normal",
        "--eps",
        "2,2",
        "--solution",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["feasible"], false);
}

#[test]
fn radius_subcommand_answers_the_shipped_strip() {
    let path = spec_path("feasibility_strip.json");
    let o = run(&["radius", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn margin_env_var_applies_and_the_flag_overrides_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "schema": 1,
            "decision": {"bounds": [[-12.0, 12.0]]},
            "scenario": {"bounds": [[null, null]], "nominal": [[0.0]]},
            "objectives": [{"expr": "(x[0] - u[0])^2", "curvature": "convex"}],
            "radius": {"kind": "resilience", "level": [100.0]}
        })
        .to_string(),
    )
    .unwrap();
    // level 100 admits reach 10, beyond any cap below it: the synthetic
    // margin is the binding bound and the answer reports truncation
    let env8 = bin()
        .args(["radius", "--file", path.to_str().unwrap()])
        .env("INVROB_MARGIN", "8")
        .output()
        .unwrap();
    assert_eq!(env8.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&env8.stderr));
    let v: serde_json::Value = serde_json::from_slice(&env8.stdout).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 8.0).abs() <= 1e-6);
    assert_eq!(v["truncated"], true);

    let flag6 = bin()
        .args(["radius", "--file", path.to_str().unwrap(), "--margin", "6"])
        .env("INVROB_MARGIN", "8")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&flag6.stdout).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 6.0).abs() <= 1e-6);

    let garbled = bin()
        .args(["radius", "--file", path.to_str().unwrap()])
        .env("INVROB_MARGIN", "abc")
        .output()
        .unwrap();
    assert_eq!(garbled.status.code(), Some(3));
    assert_eq!(
        bin()
            .args(["example", "--eps", "0,0", "--margin", "0"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(3)
    );
}
