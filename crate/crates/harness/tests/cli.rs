use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oblknn"));
    c.env("RUST_LOG", "error");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn write_config(dir: &Path, n_select: usize) -> PathBuf {
    let path = dir.join("exp.toml");
    fs::write(
        &path,
        format!(
            "[experiment]\noutput_dir = \"out\"\n\n[cv]\nfolds = 2\nruns = 1\n\n\
             [[dataset]]\nid = \"zoo\"\npath = \"{}\"\nn_select = {n_select}\n\n\
             [[algorithm]]\nid = \"KNN\"\n\n[[algorithm]]\nid = \"WOBLKNN\"\nscheme = \"global\"\nweighted = true\n",
            data("zoo.csv").display()
        ),
    )
    .unwrap();
    path
}

#[test]
fn run_succeeds_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 10);
    let out = dir.path().join("elsewhere");
    let status = bin()
        .args(["run", cfg.to_str().unwrap(), "--runs", "2", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for f in ["accuracy.csv", "f1.csv", "runtime.csv", "friedman.csv", "reports.csv", "manifest.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(!dir.path().join("out").exists());
    let reports = fs::read_to_string(out.join("reports.csv")).unwrap();
    let row = reports.lines().nth(1).unwrap();
    // n_runs,n_folds,seed at the end
    assert!(row.ends_with(",2,2,0"), "{row}");
}

#[test]
fn partial_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 500);
    let status = bin().args(["run", cfg.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(1));
    let acc = fs::read_to_string(dir.path().join("out/accuracy.csv")).unwrap();
    assert!(acc.contains("FAILED"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin().args(["run", "/no/such/config.toml"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[[algorithm]]\nid = \"KNN\"\n").unwrap();
    assert_eq!(bin().args(["run", bad.to_str().unwrap()]).status().unwrap().code(), Some(2));
}

#[test]
fn oppose_writes_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs/zoo.csv");
    let status = bin()
        .args(["oppose", data("zoo.csv").to_str().unwrap(), "--scheme", "localized", "--p", "3"])
        .args(["--standardize", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 101);
    assert!(text.starts_with("row_id,kind,class,f0,"));
    let missing_p = bin()
        .args(["oppose", data("zoo.csv").to_str().unwrap(), "--scheme", "localized"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(missing_p.code(), Some(2));
}

#[test]
fn validate_reports_shape() {
    let before = fs::read(data("spect.csv")).unwrap();
    let output = bin().args(["validate", data("spect.csv").to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("samples   267"));
    assert!(text.contains("features  22"));
    assert_eq!(fs::read(data("spect.csv")).unwrap(), before);
}
