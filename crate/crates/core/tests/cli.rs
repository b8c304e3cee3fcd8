//! End-to-end checks of the `fiberqed` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const DOC: &str = r#"
name = "cli"
[scenario]
protocol = "transfer"
[system]
r = 1.2
[grid]
stop = 3.0
step = 0.1
[[sweep]]
param = "n"
values = [1, 10, 100]
"#;

fn fiberqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiberqed"))
        .args(args)
        .output()
        .unwrap()
}

/// Every artifact except the manifest, whose `[session]` table is volatile.
fn stable_artifacts(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn run_doc(dir: &Path, extra: &[&str]) -> Output {
    let config = dir.join("doc.toml");
    fs::write(&config, DOC).unwrap();
    let out = dir.join("out");
    let mut args = vec!["--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    args.extend(["run", config.to_str().unwrap()]);
    fiberqed(&args)
}

#[test]
fn lists_every_preset() {
    let out = fiberqed(&["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3", "fig7a", "fig8b", "swap-loss"] {
        assert!(
            text.lines().any(|l| l.starts_with(name)),
            "{name} missing from\n{text}"
        );
    }
}

#[test]
fn run_writes_series_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_doc(dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files = stable_artifacts(&dir.path().join("out"));
    let names: Vec<_> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "cli_000_n1.csv",
            "cli_001_n10.csv",
            "cli_002_n100.csv",
            "cli_summary.csv"
        ]
    );
    assert!(dir.path().join("out/cli_manifest.toml").exists());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("3 run(s), 0 failed"));
}

#[test]
fn serial_and_parallel_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_doc(a.path(), &["--threads", "1"]).status.success());
    assert!(run_doc(b.path(), &["--threads", "4"]).status.success());
    assert_eq!(
        stable_artifacts(&a.path().join("out")),
        stable_artifacts(&b.path().join("out"))
    );
}

#[test]
fn repeated_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_doc(dir.path(), &[]).status.success());
    let first = stable_artifacts(&dir.path().join("out"));
    assert!(run_doc(dir.path(), &[]).status.success());
    assert_eq!(first, stable_artifacts(&dir.path().join("out")));
}

#[test]
fn grid_step_flag_overrides_every_run() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_doc(dir.path(), &["--grid-step", "0.5"])
        .status
        .success());
    let series = fs::read_to_string(dir.path().join("out/cli_000_n1.csv")).unwrap();
    // {0, 0.5, …, 3.0} plus the header row.
    assert_eq!(series.lines().filter(|l| !l.starts_with('#')).count(), 8);
}

#[test]
fn preset_with_overrides_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = fiberqed(&[
        "--out",
        out_dir,
        "--grid-step",
        "0.2",
        "preset",
        "fig2",
        "grid.stop=2.0",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("fig2_summary.csv").exists());
}

#[test]
fn errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = fiberqed(&[
        "--out",
        dir.path().to_str().unwrap(),
        "preset",
        "no-such-preset",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("fig2"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\n[scenario]\nprotocol = \"teleport\"\n").unwrap();
    let out = fiberqed(&[
        "--out",
        dir.path().to_str().unwrap(),
        "run",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
