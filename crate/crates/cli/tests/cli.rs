use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dirset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirset")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn enumerate_prints_structured_report() {
    let o = dirset(&["enumerate", "-s", "perfect-powers", "--bound", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("values: 8 16 27\n"));
}

#[test]
fn exit_codes_separate_config_and_resource_errors() {
    let missing = dirset(&["cover", "-s", "primes", "--k", "2", "--bound", "100", "--resolution", "10"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("epsilon"));

    let bad_spec = dirset(&["enumerate", "-s", "block(1: 1..2)", "--bound", "10"]);
    assert_eq!(bad_spec.status.code(), Some(1));

    let too_big = dirset(&["directions", "-s", "naturals", "--k", "3", "--bound", "1000", "--mode", "exhaustive"]);
    assert_eq!(too_big.status.code(), Some(2), "{}", stderr(&too_big));

    let unseeded = dirset(&["directions", "-s", "naturals", "--k", "2", "--bound", "100", "--mode", "sampled"]);
    assert_eq!(unseeded.status.code(), Some(1));
    assert!(stderr(&unseeded).contains("seed"));

    assert_eq!(dirset(&["reproduce", "no-such-scenario"]).status.code(), Some(1));
    assert_eq!(dirset(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(dirset(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "command = \"gaps\"\nspecs = [\"block(5: 1..2)\"]\nbound = 100\nresolution = 50\n\n[scan]\nlo = \"1\"\nhi = \"5\"\nmethod = \"pair-scan\"\n",
    )
    .unwrap();
    let o = dirset(&["--config", cfg.to_str().unwrap(), "--bound", "1000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("lo,hi,lo_float,hi_float,width\n"));
    assert!(out.contains("249/125,625/249"), "{out}");
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "command = \"enumerate\"\nbounds = 10\n").unwrap();
    let o = dirset(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bounds"), "{}", stderr(&o));

    fs::write(&cfg, "command = \"enumerate\"\nspecs = [\"file(/nonexistent/values.txt)\"]\nbound = 10\n").unwrap();
    let o = dirset(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("specs[0]"), "{}", stderr(&o));
}

#[test]
fn explicit_set_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let values = dir.path().join("values.txt");
    fs::write(&values, "1\n2\n4\n8\n").unwrap();
    let spec = format!("file({})", values.display());
    let o = dirset(&["aps", "-s", &spec, "--bound", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("count: 0\n"));
}

#[test]
fn directions_export_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = dirset(&["directions", "-s", "naturals", "--k", "2", "--bound", "3", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let export = fs::read_to_string(dir.path().join("directions.points.txt")).unwrap();
    assert_eq!(export, "1 1\n1 2\n1 3\n2 1\n2 3\n3 1\n3 2\n");
    assert!(fs::read_to_string(dir.path().join("directions.txt")).unwrap().contains("count: 7\n"));
}

fn read_tree(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reproduce_writes_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, workers: &str| {
        dirset(&["reproduce", "two-partition-ratios", "--workers", workers, "--out", dir.to_str().unwrap()])
    };
    let (ra, rb) = (run(a.path(), "1"), run(b.path(), "4"));
    assert_eq!(ra.status.code(), Some(0), "{}", stderr(&ra));
    assert_eq!(rb.status.code(), Some(0));
    assert_eq!(stdout(&ra), stdout(&rb));
    let (ta, tb) = (read_tree(&a.path().join("two-partition-ratios")), read_tree(&b.path().join("two-partition-ratios")));
    assert!(ta.iter().any(|(name, _)| name == "windows.csv"));
    assert_eq!(ta, tb);
}

#[test]
fn failed_scenario_exits_three() {
    let o = dirset(&["reproduce", "phi-constant"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stdout(&o).contains("status: FAIL"));
}

#[test]
fn count_fx_checkpoints() {
    let o = dirset(&["count-fx", "--function", "totient", "--bound", "100", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("x,count,ratio_to_reference\n10,"));
}
