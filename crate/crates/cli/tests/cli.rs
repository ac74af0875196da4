//! End-to-end runs of the binary: file round-trips and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn trisum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trisum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn theta_prints_the_constant() {
    let out = trisum(&["theta", "-p", "3", "--digits", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("theta(3) = 2.755105"), "got: {text}");
}

#[test]
fn rho_and_psi_print() {
    let out = trisum(&["rho", "-p", "2", "--digits", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("rho(2) = 0.500000"));

    let out = trisum(&["psi", "-p", "2", "--digits", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("psi(0) = 0.666667") && text.contains("psi(1) = 0.333333"));

    let out = trisum(&["psi", "-p", "2", "--rational"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "p=2\n2/3 1/3\n");
}

#[test]
fn couple_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write(dir.path(), "t.dist", "p=2\n2/3 1/3\n2/3 1/3\n2/3 1/3\n");
    let cpl = dir.path().join("t.cpl").to_string_lossy().into_owned();

    let out = trisum(&["couple", "-i", &dist, "-o", &cpl]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = fs::read_to_string(&cpl).unwrap();
    assert_eq!(written, "p=2 s=1\n0 0 1 1/3\n0 1 0 1/3\n1 0 0 1/3\n");

    let out = trisum(&["verify-coupling", "-i", &cpl, "--against", &dist]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));

    // Checking against different marginals fails with exit 1.
    let other = write(dir.path(), "u.dist", "p=2\n1/2 1/2\n1/2 1/2\n1/2 1/2\n");
    let out = trisum(&["verify-coupling", "-i", &cpl, "--against", &other]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn couple_rejects_invalid_instances() {
    let dir = tempfile::tempdir().unwrap();
    // Means sum to 3, not 2.
    let dist = write(
        dir.path(),
        "bad.dist",
        "p=3\n1/3 1/3 1/3\n1/3 1/3 1/3\n1/3 1/3 1/3\n",
    );
    let out = trisum(&["couple", "-i", &dist]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write(dir.path(), "broken.dist", "p=3\n1/3 1/3\n");
    let out = trisum(&["couple", "-i", &dist]);
    assert_eq!(out.status.code(), Some(2));

    let out = trisum(&["couple", "-i", "/nonexistent/x.dist"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown flags are usage errors.
    let out = trisum(&["theta", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_reports_both_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = write(dir.path(), "inf.dist", "p=3\n1/2 0 1/2\n0 1 0\n1 0 0\n");
    let out = trisum(&["oracle", "-i", &infeasible, "-s", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("INFEASIBLE"));
    assert!(text.contains("row a=") && text.contains("diag c="));

    let feasible = write(
        dir.path(),
        "f.dist",
        "p=3\n1 0 0\n1/3 1/3 1/3\n1/3 1/3 1/3\n",
    );
    let out = trisum(&["oracle", "-i", &feasible, "-s", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("FEASIBLE"));
    assert!(text.contains("0 0 2 1/3"));
}

#[test]
fn decompose_prints_terms() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write(dir.path(), "d.dist", "p=3\n1/4 1/2 1/4\n");
    let out = trisum(&["decompose", "-i", &dist]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("expect_sum = 1"));
    assert!(text.contains("term 1: weight"));
}

#[test]
fn sumfree_verify_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ok.tri", "p=3 n=1\n0 | 0 | 0\n1 | 1 | 1\n");
    let out = trisum(&["sumfree-verify", "-i", &good]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("VALID"));

    let bad = write(dir.path(), "bad.tri", "p=3 n=1\n0 | 0 | 0\n1 | 2 | 0\n");
    let out = trisum(&["sumfree-verify", "-i", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violation=(0,0,1)"));
}

#[test]
fn demo_runs_the_pipeline() {
    let out = trisum(&["demo", "-p", "3", "--digits", "10"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("verify: PASS"));
    assert!(text.contains("eta(psi)"));
    assert!(text.contains("ln(theta_3)"));
}

#[test]
fn psi_rational_file_reparses_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.dist").to_string_lossy().into_owned();
    let out = trisum(&["psi", "-p", "4", "--rational", "-o", &path]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    // Re-parse and feed back through the toolchain: couple it with itself.
    let triple = format!(
        "p=4\n{row}{row}{row}",
        row = text.lines().nth(1).map(|l| format!("{l}\n")).unwrap()
    );
    let tri_path = write(dir.path(), "triple.dist", &triple);
    let out = trisum(&["couple", "-i", &tri_path]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("p=4 s=3\n"));
}
