use std::path::Path;
use std::process::{Command, Output};

fn oswr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oswr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ratio_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = oswr(&["ratio-sweep", "--set", "ratios=10,100", "--out-dir", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("ratio_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(stdout(&out).contains("wrote"));
}

#[test]
fn nothing_is_written_without_out_dir() {
    let out = oswr(&["rho-curves", "--set", "ratios=10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("nothing written"));
}

#[test]
fn run_reads_the_scenario_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    std::fs::write(&cfg, "scenario = v3_root_scan\nratios = 10\nscan_points = 600\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = oswr(&["run", path_str(&cfg), "--out-dir", path_str(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let scan = std::fs::read_to_string(out_dir.join("v3_root_scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 601);
    assert!(out_dir.join("v3_root_scan_summary.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = oswr(&["dx-sweep", "--set", "ratios=10", "--out-dir", path_str(dir.path())]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 1);
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn config_errors_exit_with_one() {
    let bad_value = oswr(&["ratio-sweep", "--set", "dt=0"]);
    assert_eq!(code(&bad_value), 1);
    assert!(stderr(&bad_value).contains("dt"));

    let unknown = oswr(&["ratio-sweep", "--set", "colour=blue"]);
    assert_eq!(code(&unknown), 1);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "scenario=ratio_sweep\nthis line has no equals sign\n").unwrap();
    let parse = oswr(&["run", path_str(&cfg)]);
    assert_eq!(code(&parse), 1);
    assert!(stderr(&parse).contains("line 2"), "{}", stderr(&parse));

    let missing = oswr(&["run", path_str(&dir.path().join("missing.cfg"))]);
    assert_eq!(code(&missing), 1);

    let no_command = oswr(&[]);
    assert_eq!(code(&no_command), 1);
}

#[test]
fn unconverged_rows_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = oswr(&[
        "ratio-sweep",
        "--set",
        "ratios=10",
        "--set",
        "max_iter=2",
        "--out-dir",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
    // the table is still written
    assert!(dir.path().join("ratio_sweep.csv").exists());
}

#[test]
fn help_lists_keys_and_exit_codes() {
    let out = oswr(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for key in ["oracle_param_points", "max_iter", "Exit codes"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn check_passes_with_default_seed() {
    let out = oswr(&["check"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("PASS").count(), 3);
}
