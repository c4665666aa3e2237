//! Criteria 1-10 through the `scurve` binary: one line per criterion.
//!
//! `verify` runs twice with the same configuration; criterion 10 passes
//! only if its in-process check passes and the two reports are
//! byte-identical.

use std::path::Path;
use std::process::{Command, ExitCode};

fn verify(out: &Path) -> (Option<i32>, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_scurve"))
        .arg("--out")
        .arg(out)
        .arg("verify")
        .env_remove("SCURVE_CONFIG")
        .output()
        .expect("scurve runs");
    (output.status.code(), String::from_utf8_lossy(&output.stdout).into_owned())
}

fn main() -> ExitCode {
    let out = tempfile::tempdir().expect("temp dir");
    let (first_code, first_stdout) = verify(out.path());
    let first = std::fs::read(out.path().join("report.json")).expect("first report");
    let (second_code, _) = verify(out.path());
    let second = std::fs::read(out.path().join("report.json")).expect("second report");
    let identical = first == second;

    let mut all = true;
    let mut seen = 0;
    for line in first_stdout.lines().filter(|l| l.starts_with("criterion")) {
        seen += 1;
        if line.starts_with("criterion 10") {
            let ok = line.contains(" PASS ") && identical;
            all &= ok;
            println!(
                "criterion 10 {} determinism (in-process repeat: {}; two verify runs byte-identical: {identical})",
                if ok { "PASS" } else { "FAIL" },
                if line.contains(" PASS ") { "pass" } else { "fail" },
            );
        } else {
            all &= line.contains(" PASS ");
            println!("{line}");
        }
    }
    let exit_ok = first_code == Some(0) && second_code == Some(0);
    println!("verify exit codes: {first_code:?}, {second_code:?}");
    if seen != 10 || !all || !exit_ok {
        println!("acceptance: FAIL ({seen} criteria reported)");
        return ExitCode::FAILURE;
    }
    println!("acceptance: PASS");
    ExitCode::SUCCESS
}
