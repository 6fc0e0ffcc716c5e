use std::path::PathBuf;
use std::process::{Command, Output};

use meshmd::cli::{cmd_sweep, write_sweep_csv, SWEEP_HEADER};
use meshmd::config::RunConfig;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn meshmd(args: &[&str]) -> Output {
    let ta = data("Ta.setfl");
    Command::new(env!("CARGO_BIN_EXE_meshmd"))
        .args(args)
        .args(["--potential", ta.to_str().unwrap()])
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 6] = ["--cells-x", "4", "--cells-y", "4", "--cells-z", "3"];

fn with_small<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(SMALL).collect()
}

#[test]
fn verify_passes_with_full_arms() {
    for k in ["1", "3"] {
        let out = meshmd(&with_small(&["verify", "-k", k]));
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{text}");
        assert!(text.trim_end().ends_with("PASS"), "{text}");
    }
}

#[test]
fn verify_fails_with_trimmed_arms() {
    let out = meshmd(&with_small(&["verify", "--trim-arms", "4"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).trim_end().ends_with("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(meshmd(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(meshmd(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(meshmd(&with_small(&["run", "-k", "0"])).status.code(), Some(2));
    assert_eq!(meshmd(&with_small(&["run", "--skin", "-1"])).status.code(), Some(2));

    let missing = Command::new(env!("CARGO_BIN_EXE_meshmd"))
        .args(["run", "--potential", "/nonexistent/x.setfl"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "stepz = 4\n").unwrap();
    assert_eq!(meshmd(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    let tiny = with_small(&["run", "--grid-width", "4", "--grid-height", "4"]);
    assert_eq!(meshmd(&tiny).status.code(), Some(2));
}

#[test]
fn zero_step_run_writes_one_record() {
    let out = meshmd(&with_small(&["run", "--steps", "0"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let rec: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(rec["step"], 0);
}

#[test]
fn run_writes_trajectory_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.jsonl");
    let xyz = dir.path().join("t.xyz");
    let (traj_s, xyz_s) = (traj.to_str().unwrap(), xyz.to_str().unwrap());
    let out = meshmd(&with_small(&[
        "run", "--steps", "6", "--trajectory", traj_s, "--xyz", xyz_s, "--snapshot-stride", "3",
    ]));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&traj).unwrap().lines().count(), 7);
    let frames = std::fs::read_to_string(&xyz).unwrap();
    assert_eq!(frames.matches("step ").count(), 3);

    let out = meshmd(&with_small(&[
        "run", "--steps", "4", "--trajectory", traj_s, "--xyz", xyz_s, "--snapshot-stride", "0",
    ]));
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&xyz).unwrap().is_empty());
}

#[test]
fn reference_and_wafer_runs_agree() {
    let runs: Vec<String> = ["reference", "wafer"]
        .iter()
        .map(|e| {
            let out = meshmd(&with_small(&["run", "--steps", "5", "--engine", e]));
            assert_eq!(out.status.code(), Some(0));
            let last: serde_json::Value =
                serde_json::from_str(String::from_utf8(out.stdout).unwrap().lines().last().unwrap()).unwrap();
            format!("{:.9}", last["total_energy"].as_f64().unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn sweep_emits_csv() {
    let out = meshmd(&with_small(&["sweep", "--ks", "1,2,4", "--calibrate-cycles", "743"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[2][3], "743");
    assert_eq!(&rows[0][5], "1.0000");
}

#[test]
fn empty_k_list_gives_header_only() {
    let cfg = RunConfig {
        potential: data("Ta.setfl"),
        ..RunConfig::default()
    };
    let rows = cmd_sweep(&cfg, &[], &[]).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), SWEEP_HEADER.join(",") + "\n");
}

#[test]
fn remap_demo_reaches_fixed_point() {
    let out = meshmd(&with_small(&["remap-demo", "--amplitude", "1.5", "-k", "2"]));
    assert_eq!(out.status.code(), Some(0));
    let demo: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rounds = demo["rounds"].as_array().unwrap();
    assert_eq!(rounds.last().unwrap()["swaps"], 0);
    let costs: Vec<f64> = rounds.iter().map(|r| r["cost_after"].as_f64().unwrap()).collect();
    assert!(costs.windows(2).all(|w| w[1] <= w[0]));
    assert!(costs[0] <= demo["cost_perturbed"].as_f64().unwrap());
}
