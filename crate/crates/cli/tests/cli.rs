use std::path::PathBuf;
use std::process::{Command, Output};

use approx::assert_relative_eq;
use freewalk_cli::output::{read_profile_csv, write_profile_csv};

fn freewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freewalk")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("freewalk-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn rotation_profile_marks_rows_below_threshold() {
    let out = freewalk(&[
        "profile",
        "--group",
        "oplus",
        "--N",
        "10",
        "--state",
        "rotation:pi",
        "--k",
        "1..30",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records = read_profile_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 30);
    for r in &records {
        let below = r.k < 5;
        assert_eq!(r.dsh_status == "divergent", below, "k = {}", r.k);
        assert_eq!(r.exact_status == "divergent", below, "k = {}", r.k);
        assert_eq!(r.k0_flag, !below);
    }
}

#[test]
fn random_transposition_l2_column() {
    let out = freewalk(&["profile", "--group", "splus", "--N", "10", "--state", "randtrans", "--k", "1..10"]);
    assert_eq!(out.status.code(), Some(0));
    let records = read_profile_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 10);
    for r in &records {
        assert_relative_eq!(r.l2_norm, 0.8f64.powi(r.k as i32), max_relative = 1e-12);
        assert_eq!(r.dsh_status, "divergent");
    }
}

#[test]
fn csv_output_round_trips_byte_for_byte() {
    let out = freewalk(&["profile", "--group", "oplus", "--N", "8", "--theta", "pi/2", "--k", "1..12"]);
    let records = read_profile_csv(out.stdout.as_slice()).unwrap();
    let mut again = Vec::new();
    write_profile_csv(&records, &mut again).unwrap();
    assert_eq!(again, out.stdout);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["profile", "--group", "aut", "--N", "4", "--theta", "pi", "--k", "1..8", "--format", "json"];
    assert_eq!(freewalk(&args).stdout, freewalk(&args).stdout);
}

#[test]
fn invalid_configurations_exit_with_two() {
    for args in [
        vec!["profile", "--N", "10", "--state", "pure:8", "--k", "5..4"],
        vec!["profile", "--N", "2", "--state", "pure:1"],
        vec!["profile", "--group", "sminus", "--N", "10", "--state", "pure:1"],
        vec!["profile", "--N", "10", "--state", "pure:11"],
        vec!["profile", "--N", "10"],
        vec!["oracle", "--N", "10", "--state", "rotation:banana"],
        vec!["profile", "--N", "10", "--theta", "pi", "--tau", "2"],
    ] {
        assert_eq!(freewalk(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cutoff_summaries() {
    let v: serde_json::Value = serde_json::from_slice(
        &freewalk(&["cutoff", "--group", "oplus", "--N", "10", "--state", "pure:8"]).stdout,
    )
    .unwrap();
    assert_eq!(v["k0"], 11);
    let v: serde_json::Value = serde_json::from_slice(
        &freewalk(&["cutoff", "--group", "oplus", "--N", "8", "--theta", "pi", "--c", "1", "--c0", "1"])
            .stdout,
    )
    .unwrap();
    assert_relative_eq!(v["upper_at_c"]["value"].as_f64().unwrap(), 0.009_159_3, epsilon = 1e-6);
    assert_eq!(v["admissible"], true);
    let v: serde_json::Value = serde_json::from_slice(
        &freewalk(&["cutoff", "--group", "oplus", "--N", "7", "--theta", "pi"]).stdout,
    )
    .unwrap();
    assert_eq!(v["admissible"], false);
}

#[test]
fn oracle_outputs() {
    let out = freewalk(&["oracle", "--N", "10", "--state", "counit", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "k=3 DIVERGENT");
    let out = freewalk(&["oracle", "--N", "10", "--state", "pure:6", "--k", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "ok");
    assert_relative_eq!(v["tv"].as_f64().unwrap(), 0.326_123_612_417_479, epsilon = 1e-10);
    let out = freewalk(&["oracle", "--N", "10", "--state", "pure:6", "--k", "60"]);
    let value: f64 = stdout(&out).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(value < 1e-10);
}

#[test]
fn verify_exit_codes() {
    let out = freewalk(&["verify", "--only", "encadrement", "--points", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
    assert!(stdout(&out).contains("PASS"));
    assert_eq!(freewalk(&["verify", "--only", "bogus"]).status.code(), Some(2));
    // The literal ratio range t - 1/t <= a_n fails from n = 2 on.
    let out = freewalk(&["verify", "--only", "misc-identities", "--points", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("ratio-range-literal"));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = scratch("config");
    let path = dir.join("run.cfg");
    std::fs::write(&path, "# profile settings\ngroup = oplus\nN = 10\nstate = pure:8\nk = 1..3\n").unwrap();
    let out = freewalk(&["profile", "--config", path.to_str().unwrap()]);
    assert_eq!(read_profile_csv(out.stdout.as_slice()).unwrap().len(), 3);
    let out = freewalk(&["profile", "--config", path.to_str().unwrap(), "--k", "11..12", "--no-exact"]);
    let records = read_profile_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.iter().map(|r| r.k).collect::<Vec<_>>(), vec![11, 12]);
    assert!(records.iter().all(|r| r.exact_status == "skipped" && r.dsh_status == "valid"));
    std::fs::write(&path, "colour = blue\n").unwrap();
    assert_eq!(freewalk(&["profile", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn mixture_state_from_file() {
    let dir = scratch("mixture");
    let path = dir.join("angles.txt");
    std::fs::write(&path, "# tau weight\n4 1\n3 1\n").unwrap();
    let state = format!("mixture:{}", path.display());
    let out = freewalk(&["cutoff", "--N", "12", "--state", &state, "--c", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_relative_eq!(v["k1"].as_f64().unwrap(), 12.0 * 12f64.ln() / 3.5, max_relative = 1e-12);
    assert!(v["lower_at_c"]["value"].as_f64().is_some());
}

#[test]
fn sweep_writes_one_file_per_combination() {
    let dir = scratch("sweep");
    let out = freewalk(&[
        "sweep",
        "--group",
        "oplus",
        "--N",
        "8,10",
        "--state",
        "pure:1,pure:6",
        "--k",
        "1..4",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files.len(), 4);
    assert_eq!(files[0].to_str().unwrap(), "oplus_N10_state-pure-1.csv");
}
