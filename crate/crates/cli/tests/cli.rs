use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

use parasqueeze_core::entropy::delta_s_exact;
use parasqueeze_core::thermal::{pn_equilibrium, pn_exact, SqueezedThermalState};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parasqueeze"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["occupations", "--epsilon", "0:0.3:0.05"];
    let one = bin().args(args).env("PARASQUEEZE_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("PARASQUEEZE_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn occupation_rows_match_library() {
    let csv = run_ok(&["occupations", "--omega-over-t", "0.4", "--epsilon", "0,0.2", "--levels", "3..5"]);
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "omega_over_t,epsilon,n,p_exact,p_approx,p_eq,status");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let (x, eps, n) = (num(&r[0]), num(&r[1]), r[2].parse::<usize>().unwrap());
        let st = SqueezedThermalState::from_epsilon(x, eps).unwrap();
        let want = pn_exact(&st, n).unwrap();
        assert!((num(&r[3]) - want).abs() <= 1e-11 * want, "{r:?}");
        assert!((num(&r[5]) - pn_equilibrium(x, n)).abs() <= 1e-11 * want);
        assert_eq!(r[6], "ok");
        if eps == 0.0 {
            assert_eq!(r[3], r[5]);
            assert_eq!(r[4], r[5]);
        }
    }
}

#[test]
fn default_levels_bracket_the_crossing() {
    let csv = run_ok(&["occupations", "--omega-over-t", "0.2", "--epsilon", "0"]);
    let levels: Vec<usize> = rows(&csv).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(levels, vec![8, 9, 10, 11, 12]);
}

#[test]
fn entropy_is_quadratic_at_small_offsets() {
    let csv = run_ok(&["entropy", "--omega-over-t", "0.4", "--epsilon", "0.002:0.02:0.002"]);
    let pts: Vec<(f64, f64)> = rows(&csv).iter().map(|r| (num(&r[1]), num(&r[2]))).collect();
    assert!(pts.len() >= 9);
    // Least squares for δS = c ε², judged by R².
    let c = pts.iter().map(|(e, d)| e * e * d).sum::<f64>() / pts.iter().map(|(e, _)| e.powi(4)).sum::<f64>();
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let ss_res: f64 = pts.iter().map(|(e, d)| (d - c * e * e).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|(_, d)| (d - mean).powi(2)).sum();
    assert!(1.0 - ss_res / ss_tot > 0.999);
    let (e, d) = pts[3];
    assert!((d - delta_s_exact(0.4, 1.0 + e).unwrap()).abs() <= 1e-11 * d);
}

#[test]
fn entropy_vanishes_without_squeezing() {
    let csv = run_ok(&["entropy", "--epsilon", "0"]);
    for r in rows(&csv) {
        for v in &r[2..7] {
            assert_eq!(num(v), 0.0);
        }
    }
}

#[test]
fn resonant_ratchet_gains_eight_in_three_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let sched = write(&dir, "s.json", &format!(r#"{{"regime":"ratchet","s":2,"theta":{PI},"cycles":3}}"#));
    let summary = dir.path().join("summary.json");
    let csv = run_ok(&["evolve", "--schedule", sched.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    let last = rows(&csv).pop().unwrap();
    assert_eq!(last[0], "6");
    assert!((num(&last[2]) - 8.0).abs() < 1e-9);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert!((doc["gain"].as_f64().unwrap() - 8.0).abs() < 1e-9);
    assert_eq!(doc["runaway"], false);
}

#[test]
fn empty_schedule_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let sched = write(&dir, "e.json", r#"{"steps": []}"#);
    let out = run_ok(&["--format", "json", "evolve", "--schedule", sched.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["summary"]["total_map"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn resonance_scan_skips_pole_and_flags_runaway() {
    let csv = run_ok(&["resonance-scan", "--theta", "0.5,pi/2", "--s", "1.5,6"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][3], "0");
    assert_eq!(rows[1][3], "1");
}

#[test]
fn flow_of_constant_profile_is_a_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let prof = write(&dir, "p.json", "[[0, 1.0], [3.0, 1.0]]");
    let csv = run_ok(&["flow", "--profile", prof.to_str().unwrap()]);
    let r = &rows(&csv)[0];
    assert!((num(&r[0]) - 3f64.cos()).abs() < 1e-8);
    assert!((num(&r[4]) - 1.0).abs() < 1e-8);
}

#[test]
fn exit_codes_follow_error_kind() {
    assert_eq!(exit_code(&["occupations", "--epsilon", "nope"]), 2);
    assert_eq!(exit_code(&["occupations", "--omega-over-t", "-1"]), 2);
    assert_eq!(exit_code(&["evolve", "--schedule", "/definitely/missing.json"]), 4);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", "{not json");
    assert_eq!(exit_code(&["evolve", "--schedule", bad.to_str().unwrap()]), 2);
    let out = dir.path().join("no_such_dir").join("out.csv");
    assert_eq!(exit_code(&["--out", out.to_str().unwrap(), "entropy", "--epsilon", "0"]), 4);
}
