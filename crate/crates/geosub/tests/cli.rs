//! End-to-end CLI checks: generate -> solve -> verify round trips, exit-code
//! contract, and report determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn geosub(args: &[&str], dir: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geosub"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("geosub runs")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("geosub-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_simplex_with_truth_sidecar() {
    let dir = workdir("gen");
    let out = geosub(
        &[
            "generate", "--family", "simplex", "--d", "3", "--out", "s.csv",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("s.csv.truth.json")).unwrap())
            .unwrap();
    let opt = truth["truth"]["optimum_size"].as_f64().unwrap();
    assert!((opt - 0.6123724356957945).abs() < 1e-12);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn generate_planted_outliers_inlier_count() {
    let dir = workdir("gen2");
    let out = geosub(
        &[
            "generate",
            "--family",
            "planted-outliers",
            "--n",
            "100",
            "--d",
            "4",
            "--gamma",
            "0.05",
            "--out",
            "p.csv",
        ],
        &dir,
    );
    assert!(out.status.success());
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("p.csv.truth.json")).unwrap())
            .unwrap();
    assert_eq!(
        truth["truth"]["inlier_indices"].as_array().unwrap().len(),
        95
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn generate_missing_out_is_usage_error() {
    let dir = workdir("gen3");
    let out = geosub(&["generate", "--family", "simplex", "--d", "3"], &dir);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn solve_report_is_deterministic_and_within_quality() {
    let dir = workdir("solve");
    geosub(
        &[
            "generate", "--family", "simplex", "--d", "4", "--out", "s.csv",
        ],
        &dir,
    );
    let run = || {
        let out = geosub(
            &[
                "solve",
                "--algo",
                "bc-meb",
                "--epsilon",
                "0.1",
                "--seed",
                "7",
                "s.csv",
            ],
            &dir,
        );
        assert!(out.status.success());
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let mut a = run();
    let mut b = run();
    a.as_object_mut().unwrap().remove("wall_ms");
    b.as_object_mut().unwrap().remove("wall_ms");
    assert_eq!(
        a, b,
        "same command line and seed must give identical reports"
    );
    let radius = a["result"]["size"].as_f64().unwrap();
    let expected = (4.0f64 / 10.0).sqrt();
    assert!(radius >= expected - 1e-9 && radius <= 1.1 * expected + 1e-9);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn solve_hybrid_reports_a_label() {
    let dir = workdir("hyb");
    geosub(
        &[
            "generate",
            "--family",
            "uniform-ball",
            "--n",
            "300",
            "--d",
            "6",
            "--radius",
            "1",
            "--out",
            "u.csv",
        ],
        &dir,
    );
    let out = geosub(
        &[
            "solve",
            "--algo",
            "hybrid-meb",
            "--epsilon",
            "0.3",
            "--delta",
            "0.2",
            "--seed",
            "1",
            "u.csv",
        ],
        &dir,
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let label = report["result"]["label"].as_str().unwrap();
    assert!(label == "radius-approx" || label == "covering-approx");
    assert_eq!(report["counters"]["full_passes"].as_u64(), Some(1));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn solve_kcenter_over_budget_exits_2() {
    let dir = workdir("kc");
    geosub(
        &[
            "generate",
            "--family",
            "uniform-ball",
            "--n",
            "50",
            "--d",
            "3",
            "--radius",
            "1",
            "--out",
            "u.csv",
        ],
        &dir,
    );
    let out = geosub(
        &[
            "solve",
            "--algo",
            "kcenter",
            "--k",
            "3",
            "--epsilon",
            "0.2",
            "u.csv",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn verify_pass_fail_and_digest_mismatch() {
    let dir = workdir("verify");
    geosub(
        &[
            "generate",
            "--family",
            "planted-outliers",
            "--n",
            "200",
            "--d",
            "5",
            "--gamma",
            "0.05",
            "--out",
            "p.csv",
            "--seed",
            "3",
        ],
        &dir,
    );
    let out = geosub(
        &[
            "solve",
            "--algo",
            "outliers-linear",
            "--epsilon",
            "0.4",
            "--delta",
            "0.02",
            "--gamma",
            "0.05",
            "--seed",
            "5",
            "--verify-scan",
            "p.csv",
        ],
        &dir,
    );
    assert!(out.status.success());
    std::fs::write(dir.join("rep.json"), &out.stdout).unwrap();

    // Pass case.
    let ok = geosub(
        &[
            "verify",
            "--report",
            "rep.json",
            "--data",
            "p.csv",
            "--truth",
            "p.csv.truth.json",
        ],
        &dir,
    );
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );

    // Tampered radius fails.
    let mut report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("rep.json")).unwrap()).unwrap();
    report["result"]["size"] = serde_json::json!(0.01);
    report["dataset_digest"] = serde_json::Value::Null;
    std::fs::write(
        dir.join("bad.json"),
        serde_json::to_string(&report).unwrap(),
    )
    .unwrap();
    let bad = geosub(
        &[
            "verify",
            "--report",
            "bad.json",
            "--data",
            "p.csv",
            "--truth",
            "p.csv.truth.json",
        ],
        &dir,
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));

    // Digest mismatch is an error.
    geosub(
        &[
            "generate",
            "--family",
            "planted-outliers",
            "--n",
            "200",
            "--d",
            "5",
            "--gamma",
            "0.05",
            "--out",
            "q.csv",
            "--seed",
            "4",
        ],
        &dir,
    );
    let mismatch = geosub(&["verify", "--report", "rep.json", "--data", "q.csv"], &dir);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("digest"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn bench_rows_and_n_independence() {
    let dir = workdir("bench");
    let out = geosub(
        &[
            "bench",
            "--algos",
            "outliers-sublinear,baseline-scan",
            "--n-list",
            "1000,2000",
            "--d",
            "6",
            "--gamma",
            "0.1",
            "--epsilon",
            "0.4",
            "--delta",
            "0.03",
            "--seeds",
            "2",
            "--work-dir",
            "bw",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // grid size (2 algos x 2 n x 2 seeds) rows
    assert_eq!(rows.len(), 8);
    // Sublinear sample counts are identical across n.
    let sampled: Vec<&str> = rows
        .iter()
        .filter(|r| r.starts_with("outliers-sublinear"))
        .map(|r| r.split(',').nth(6).unwrap())
        .collect();
    assert!(sampled.windows(2).all(|w| w[0] == w[1]), "{sampled:?}");
    // The baseline touches exactly n per pass.
    for r in rows.iter().filter(|r| r.starts_with("baseline-scan")) {
        let cols: Vec<&str> = r.split(',').collect();
        let n: u64 = cols[1].parse().unwrap();
        let touched: u64 = cols[4].parse().unwrap();
        let passes: u64 = cols[5].parse().unwrap();
        assert_eq!(touched, n * passes);
    }
    std::fs::remove_dir_all(dir).ok();
}
