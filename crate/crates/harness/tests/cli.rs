use std::path::Path;
use std::process::{Command, Output};

use levy_rare::experiment::CSV_HEADER;
use levy_rare::plot_data::PLOT_HEADER;

const SMALL: &str = r#"
seed = 7
modes = ["algo2", "algo3", "crude"]
alpha_list = [1.6]
n_list = [20, 40]

[samples]
is_samples = 300
crude_min_samples = 2000
crude_max_samples = 4000
crude_hits = 4
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levy-rare"))
}

fn run(args: &[&str], workers: &str) -> Output {
    bin().args(args).env("LEVY_RARE_WORKERS", workers).output().expect("spawn")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let out = run(&["--no-timing", "run", &cfg, "--out", first.to_str().unwrap()], "1");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("parameter regime"));
    let out = run(&["--no-timing", "run", &cfg, "--out", second.to_str().unwrap()], "3");
    assert!(out.status.success());
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 6);

    // plot-data on the same file
    let out = run(&["plot-data", first.to_str().unwrap()], "1");
    assert!(out.status.success());
    let plot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(plot.lines().next().unwrap(), PLOT_HEADER.join(","));
    assert!(plot.contains("dashed") && plot.contains("dotted") && plot.contains("solid"));
}

#[test]
fn crude_command_runs_only_crude() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let csv = dir.path().join("crude.csv");
    let out = run(&["--no-timing", "crude", &cfg, "--out", csv.to_str().unwrap()], "1");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| l.starts_with("crude,")));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    let out = run(&["run", missing.to_str().unwrap()], "1");
    assert_eq!(out.status.code(), Some(2));
    for bad in ["unknown_key = 1", "[params]\nw = 1.5", "[event]\na = 2.0\nb = 1.0", "alpha_list = []"] {
        let cfg = write(dir.path(), "bad.toml", bad);
        let out = run(&["run", &cfg], "1");
        assert_eq!(out.status.code(), Some(2), "{bad}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn capability_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // no jumps at all, so the two-sided skeleton cannot be conditioned
    let cfg = write(
        dir.path(),
        "cap.toml",
        "modes = [\"algo2\"]\nalpha_list = [1.6]\nn_list = [20]\n[model]\nrate = 0.0\n\
         [event]\nkind = \"down_and_in\"\na = 1.0\nb = 1.0\nc = 0.5\n[samples]\nis_samples = 10\n",
    );
    let out = run(&["run", &cfg, "--out", dir.path().join("x.csv").to_str().unwrap()], "1");
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_csv_gives_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "empty.csv", &format!("{}\n", CSV_HEADER.join(",")));
    let out = run(&["table1", "--csv", &csv], "1");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let out = run(&["plot-data", &csv], "1");
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), PLOT_HEADER.join(","));
}

#[test]
fn diagnose_prints_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "diag.toml",
        "[diagnostic]\nz_list = [2.0]\nt_list = [0.1, 1.0]\ndelta_list = [0.1]\nsamples = 20000\n",
    );
    let out = run(&["diagnose", &cfg], "1");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.3989"), "{text}");
}
