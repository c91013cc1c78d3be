use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mixlap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixlap"))
        .current_dir(dir)
        .env_remove("MIXLAP_OUTPUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SOLVE: &str = r#"
command = "solve"
s = 0.5
domain = [-1.0, 1.0]
n = 127
f = { constant = 1.0 }
output_dir = "out"
"#;

#[test]
fn solve_writes_one_row_per_node() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.toml"), SOLVE).unwrap();
    let o = mixlap(tmp.path(), &["solve", "--config", "run.toml"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = tmp.path().join("out");
    let csv = fs::read_to_string(out.join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,u"));
    assert_eq!(lines.count(), 127);
    assert!(out.join("report.json").exists());
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.ends_with("3/3 checks passed\n"));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["n"], 127);
}

#[test]
fn rerun_after_deleting_output_reproduces_files() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.toml"), SOLVE).unwrap();
    let read = |name: &str| fs::read(tmp.path().join("out").join(name)).unwrap();
    assert!(mixlap(tmp.path(), &["solve", "-c", "run.toml"])
        .status
        .success());
    let first: Vec<_> = ["solution.csv", "report.json", "summary.txt"]
        .map(read)
        .into();
    fs::remove_dir_all(tmp.path().join("out")).unwrap();
    assert!(mixlap(tmp.path(), &["solve", "-c", "run.toml"])
        .status
        .success());
    let second: Vec<_> = ["solution.csv", "report.json", "summary.txt"]
        .map(read)
        .into();
    assert_eq!(first, second);
}

#[test]
fn verify_summaries_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let o = mixlap(tmp.path(), &["verify", "--seed", "42", "-o", dir]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let a = fs::read(tmp.path().join("a/summary.txt")).unwrap();
    let b = fs::read(tmp.path().join("b/summary.txt")).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains("seed: 42"));
}

#[test]
fn counterexample_summary_reports_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mixlap(tmp.path(), &["counterexample", "-s", "0.25", "-o", "ce"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(tmp.path().join("ce/summary.txt")).unwrap();
    assert!(summary.contains("eps0: 0.5"));
    assert!(summary.contains("passed: true"));
}

#[test]
fn barrier_dump_has_four_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mixlap(
        tmp.path(),
        &[
            "barrier", "-s", "0.75", "-n", "20", "--domain", "0,0.05", "-o", "b",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("b/barrier.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,beta,gamma,l_gamma"));
    assert_eq!(csv.lines().count(), 21);
    let summary = fs::read_to_string(tmp.path().join("b/summary.txt")).unwrap();
    assert!(summary.contains("[barrier: L gamma >= 1]"));
}

#[test]
fn invalid_settings_exit_with_status_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mixlap(
        tmp.path(),
        &["solve", "-s", "1.2", "-n", "7", "-f", "constant:1"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s must lie in (0,1)"));

    let o = mixlap(
        tmp.path(),
        &["solve", "-s", "0.5", "-n", "0", "-f", "constant:1"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n must be"));

    fs::write(tmp.path().join("bad.toml"), format!("{SOLVE}\nwidth = 3\n")).unwrap();
    let o = mixlap(tmp.path(), &["solve", "-c", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("width"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn flags_override_config_and_env_sets_default_dir() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        SOLVE.replace("output_dir = \"out\"\n", ""),
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mixlap"))
        .current_dir(tmp.path())
        .env("MIXLAP_OUTPUT_DIR", "from-env")
        .args(["solve", "-c", "run.toml", "-n", "15"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("from-env/solution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn sampled_loads_are_read_from_csv() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("f.csv"), "x,f\n-1,0\n0,1\n1,0\n").unwrap();
    let o = mixlap(
        tmp.path(),
        &[
            "solve",
            "-s",
            "0.3",
            "-n",
            "31",
            "-f",
            "sampled:f.csv",
            "-o",
            "out",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(tmp.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("[weak_mp]"));

    fs::write(tmp.path().join("g.csv"), "0,1\n0,2\n").unwrap();
    let o = mixlap(
        tmp.path(),
        &[
            "solve",
            "-s",
            "0.3",
            "-n",
            "31",
            "-f",
            "sampled:g.csv",
            "-o",
            "out",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("strictly increasing"));
}
