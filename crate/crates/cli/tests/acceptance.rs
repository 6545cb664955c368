//! CLI contract checks, including criterion 10 (byte-identical reruns).

use std::path::PathBuf;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hessext"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("hessext-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = temp_path(&format!("determinism-{run}.json"));
        let status = binary()
            .args([
                "extremal", "--N", "5", "--k", "1", "--alpha", "1", "--grid-n", "512", "--seed",
                "42", "--out",
            ])
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success());
        outputs.push(std::fs::read(&out).expect("output written"));
        let _ = std::fs::remove_file(&out);
    }
    let identical = outputs[0] == outputs[1];
    println!(
        "criterion 10: {} — identical config+seed reproduces byte-identical JSON ({} bytes)",
        if identical { "PASS" } else { "FAIL" },
        outputs[0].len()
    );
    assert!(identical);

    // same determinism for the expansions CSV
    let mut csvs = Vec::new();
    for run in 0..2 {
        let out = temp_path(&format!("determinism-{run}.csv"));
        let status = binary()
            .args([
                "expansions",
                "--N",
                "5",
                "--k",
                "1",
                "--alpha",
                "1",
                "--eps",
                "1e-2,1e-3",
                "--format",
                "csv",
                "--jobs",
                "2",
                "--out",
            ])
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success());
        csvs.push(std::fs::read(&out).expect("output written"));
        let _ = std::fs::remove_file(&out);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn invalid_triple_exits_2_and_names_the_constraint() {
    let output = binary()
        .args(["extremal", "--k", "3", "--N", "5"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("1 <= k < N/2"),
        "stderr must name the violated constraint: {stderr}"
    );
}

#[test]
fn invalid_ladder_exits_2() {
    let output = binary()
        .args(["mountain-pass", "--eps", "1e-3,1e-2"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    let output = binary()
        .args(["mountain-pass", "--eps", "0.3,0.1"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    let output = binary()
        .args(["extremal", "--grid-n", "128"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unconverged_solver_exits_3() {
    // near-limit alpha at coarse resolution: the ascent stalls below the
    // residual tolerance and the run must report exit code 3
    let output = binary()
        .args([
            "extremal", "--N", "5", "--k", "2", "--alpha", "0.45", "--grid-n", "256",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unconverged"), "stderr: {stderr}");
}

#[test]
fn expansions_csv_header_is_exact() {
    let output = binary()
        .args([
            "expansions",
            "--N",
            "5",
            "--k",
            "1",
            "--alpha",
            "1",
            "--eps",
            "1e-2",
            "--format",
            "csv",
        ])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let first = stdout.lines().next().unwrap();
    assert_eq!(first, "lemma,branch,eps,numeric,leading,ratio");
}

#[test]
fn extremal_json_carries_the_documented_keys() {
    let output = binary()
        .args(["extremal", "--grid-n", "512"])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    for key in [
        "\"value\"",
        "\"lambda\"",
        "\"el_residual\"",
        "\"gap\"",
        "\"converged\": true",
        "\"k_star\"",
        "\"omega_nk\"",
        "\"tau\"",
        "\"S\"",
        "\"seed\"",
    ] {
        assert!(stdout.contains(key), "missing {key} in:\n{stdout}");
    }
}

#[test]
fn solve_hessian_writes_profile_csv() {
    let out = temp_path("shoot.json");
    let status = binary()
        .args(["solve-hessian", "--grid-n", "512", "--out"])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());
    let json = std::fs::read_to_string(&out).unwrap();
    for key in [
        "\"a0\"",
        "\"residual\"",
        "\"boundary_defect\"",
        "\"admissible\"",
        "\"energy\"",
    ] {
        assert!(json.contains(key), "missing {key}");
    }
    let profile = out.with_extension("profile.csv");
    let csv = std::fs::read_to_string(&profile).unwrap();
    assert!(csv.starts_with("r,v\n"));
    assert!(csv.lines().count() > 500);
    let _ = std::fs::remove_file(&out);
    let _ = std::fs::remove_file(&profile);
}

#[test]
fn csv_format_is_rejected_outside_expansions() {
    let output = binary()
        .args(["extremal", "--format", "csv"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}
