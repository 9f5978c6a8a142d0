use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multihop-teleport"))
}

fn stdout_of(args: &[&str]) -> (bool, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn simulate_is_byte_identical_for_same_seed() {
    let args = ["simulate", "--protocol", "gmtp", "--n", "2", "--alpha2", "0.3", "--trials", "20000", "--seed", "17"];
    let (ok1, a) = stdout_of(&args);
    let (ok2, b) = stdout_of(&args);
    assert!(ok1 && ok2);
    assert_eq!(a, b);
    let (_, c) = stdout_of(&["simulate", "--protocol", "gmtp", "--n", "2", "--alpha2", "0.3", "--trials", "20000", "--seed", "18"]);
    assert_ne!(a, c);
}

#[test]
fn sweep_csv_round_trips() {
    let (ok, out) = stdout_of(&["sweep", "--curve", "ratio"]);
    assert!(ok);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "concurrence,N,p_smtp,p_gmtp,ratio");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 3 * 101);
    for row in &rows {
        for cell in [&row[0], &row[2], &row[3], &row[4]] {
            let x: f64 = cell.parse().unwrap();
            // 17 significant digits reproduce the same text and the same bits.
            assert_eq!(&format!("{x:.16e}"), cell);
        }
    }
}

#[test]
fn sweep_json_lines() {
    let (ok, out) = stdout_of(&["sweep", "--n", "10", "--grid", "0.96:0.01:0.96", "--format", "json"]);
    assert!(ok);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["N"], 10);
    assert!((v["p_gmtp"].as_f64().unwrap() - 0.2069).abs() < 1e-4);
    assert!((v["p_smtp"].as_f64().unwrap() - 0.0014).abs() < 1e-4);
}

#[test]
fn verify_passes_with_exit_zero() {
    let (ok, out) = stdout_of(&["verify", "--trials", "20000"]);
    assert!(ok, "{out}");
    assert!(out.lines().skip(1).all(|l| l.ends_with(",pass")));
    assert_eq!(out.lines().filter(|l| l.starts_with("gmtp_closed_form")).count(), 20);
}

#[test]
fn hetero_command() {
    let (ok, out) = stdout_of(&["hetero", "--alphas2", "0.2,0.4", "--trials", "10000", "--seed", "5"]);
    assert!(ok);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[2].parse::<f64>().unwrap() - 0.4).abs() < 1e-12);
    assert!((row[3].parse::<f64>().unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn writes_transcripts_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let transcripts = dir.path().join("t.jsonl");
    let report = dir.path().join("r.json");
    let status = bin()
        .args(["simulate", "--protocol", "smtp", "--hops", "3", "--concurrence", "0.9", "--trials", "200", "--seed", "2"])
        .args(["--format", "json", "--out", report.to_str().unwrap()])
        .args(["--transcripts", transcripts.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let lines: Vec<Value> = std::fs::read_to_string(&transcripts)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 200);
    let successes = lines.iter().filter(|t| t["success"] == true).count() as u64;
    for t in &lines {
        for hop in t["hops"].as_array().unwrap() {
            assert!(hop["bell_outcome"].as_u64().unwrap() <= 3);
        }
    }
    let report: Value = serde_json::from_str(std::fs::read_to_string(&report).unwrap().trim()).unwrap();
    assert_eq!(report["successes"].as_u64().unwrap(), successes);

    // Same seed without transcripts gives the same count.
    let (_, plain) = stdout_of(&["simulate", "--protocol", "smtp", "--hops", "3", "--concurrence", "0.9", "--trials", "200", "--seed", "2", "--format", "json"]);
    let plain: Value = serde_json::from_str(plain.trim()).unwrap();
    assert_eq!(plain["successes"], report["successes"]);
}

#[test]
fn bad_arguments_fail() {
    let out = bin().args(["analytic", "--alpha2", "1.5"]).output().unwrap();
    assert!(!out.status.success());
    let out = bin().args(["simulate", "--protocol", "smtp", "--n", "1"]).output().unwrap();
    assert!(!out.status.success());
}
