use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hardcore(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hardcore"));
    cmd.env_remove("HARDCORE_CACHE_DIR");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir).arg("-v"),
        None => cmd.arg("--no-cache"),
    };
    cmd.args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let line = stderr(o).lines().last().unwrap_or_default().to_string();
    serde_json::from_str(&line).expect("error record on stderr")
}

#[test]
fn torus_value_at_minus_one() {
    let o = hardcore(None, &["value", "--bc", "cc", "--lh", "7", "--lv", "14"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-27");
}

#[test]
fn c0p_factorization_of_width_three() {
    let o = hardcore(None, &["factorize", "--op", "c0p", "--lh", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(x^3-1)(x-1)^-1");
}

#[test]
fn partition_of_free_two_by_two() {
    let o = hardcore(None, &["partition", "--bc", "ff", "--lv", "2", "--lh", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "zpoly squares ff 2 2\n1\n4\n2\n");
}

#[test]
fn oversized_lattice_is_a_resource_cap() {
    let o = hardcore(
        None,
        &["partition", "--bc", "ff", "--lv", "30", "--lh", "30"],
    );
    assert_eq!(o.status.code(), Some(3));
    let rec = error_record(&o);
    assert_eq!(rec["schema"], "hardcore/1");
    assert_eq!(rec["error"], "resource_cap");
    assert_eq!(rec["exit_code"], 3);
}

#[test]
fn bad_arguments_exit_with_one() {
    let o = hardcore(None, &["partition", "--bc", "xx", "--lv", "2", "--lh", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hardcore(None, &["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["partition", "--bc", "cc", "--lv", "6", "--lh", "6"];
    let first = hardcore(Some(dir.path()), &args);
    assert!(first.status.success());
    assert!(stderr(&first).contains("cache miss"));
    assert!(stderr(&first).contains("cache store"));
    let second = hardcore(Some(dir.path()), &args);
    assert!(second.status.success());
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn zeros_key_depends_on_digits() {
    let dir = tempfile::tempdir().unwrap();
    let run = |digits: &str| {
        let o = hardcore(
            Some(dir.path()),
            &[
                "zeros", "--bc", "cc", "--lv", "4", "--lh", "4", "--digits", digits,
            ],
        );
        assert!(o.status.success());
        o
    };
    let a = run("5");
    let b = run("8");
    assert_ne!(a.stdout, b.stdout);
    assert!(
        stderr(&b).contains("cache hit"),
        "polynomial entry is shared"
    );
    assert!(stderr(&b).contains("cache miss"), "zeros entry is new");
    let first = stdout(&a);
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("re,im,multiplicity"));
    assert_eq!(lines.count(), 8);
    let again = run("5");
    assert_eq!(a.stdout, again.stdout);
}

#[test]
fn corrupt_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["partition", "--bc", "ff", "--lv", "3", "--lh", "4"];
    let clean = hardcore(Some(dir.path()), &args);
    assert!(clean.status.success());
    let art = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "art"))
        .unwrap();
    fs::write(&art, "zpoly squares ff 3 4\n1\n2\n3\n").unwrap();
    let redo = hardcore(Some(dir.path()), &args);
    assert!(redo.status.success());
    assert!(stderr(&redo).contains("warning"));
    assert_eq!(clean.stdout, redo.stdout);
    let hit = hardcore(Some(dir.path()), &args);
    assert!(stderr(&hit).contains("cache hit"));
    assert!(!stderr(&hit).contains("warning"));
}

#[test]
fn out_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let o = hardcore(
        None,
        &[
            "--out",
            path.to_str().unwrap(),
            "rows",
            "--lh",
            "3",
            "--boundary",
            "free",
        ],
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 5);
    assert!(!dir.path().join("rows.csv.partial").exists());
}

#[test]
fn torus_table_matches_reference() {
    let o = hardcore(None, &["reproduce", "appendix-b-torus", "--lh-max", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stderr(&o).contains("diff:"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("6: ")));
}

#[test]
fn factorization_tables_match_reference() {
    for target in [
        "appendix-a-free",
        "appendix-a-free-parity",
        "appendix-a-c0p",
    ] {
        let o = hardcore(None, &["reproduce", target, "--lh-max", "8"]);
        assert_eq!(o.status.code(), Some(0), "{target}: {}", stderr(&o));
    }
}

#[test]
fn conjectures_hold() {
    let o = hardcore(None, &["conjectures", "--lh-max", "6", "--lv-max", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["schema"], "hardcore/1");
}
