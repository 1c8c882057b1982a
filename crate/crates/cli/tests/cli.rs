use std::process::{Command, Output};

use nkgeom::report::parse_jsonl;

fn nkcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkcheck")).args(args).env_remove("NKCHECK_OUT_DIR").output().unwrap()
}

#[test]
fn clean_run_exits_zero_and_writes_jsonl() {
    let out = nkcheck(&["--model", "s6", "--suite", "gray,nk-core", "--samples", "3", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = parse_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(reports.iter().all(|r| r.model == "s6" && r.seed == 2));
    assert!(reports.iter().any(|r| r.id == "gray-1" && r.samples == 3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("with unexpected outcome"));
}

#[test]
fn tightened_tolerance_exits_one() {
    let out = nkcheck(&["--model", "s6", "--suite", "nk-core", "--samples", "2", "--tol.einstein-scal", "0"]);
    // einstein-scal is 30 up to rounding; a zero tolerance fails unless every sample is bit-exact
    let reports = parse_jsonl(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let r = reports.iter().find(|r| r.id == "einstein-scal").unwrap();
    assert_eq!(r.tolerance, 0.0);
    assert_eq!(out.status.code(), Some(if r.pass { 0 } else { 1 }));

    let out = nkcheck(&["--model", "s3s3", "--suite", "nk-core", "--samples", "2", "--tol.nk-product-control=1e9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nk-product-control expected to fail but passed"));
}

#[test]
fn bad_configuration_exits_two() {
    for args in [
        &["--model", "cp3"][..],
        &["--model", "s6", "--suite", "base"],
        &["--samples", "0"],
        &["--tol.gray-1", "abc"],
        &["--tol.gray-1"],
        &["--deriv-mode", "symbolic"],
    ] {
        let out = nkcheck(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn out_dir_variable_sets_the_default_path() {
    let dir = std::env::temp_dir().join(format!("nkcheck-cli-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_nkcheck"))
        .args(["--model", "s2s2", "--suite", "base", "--samples", "2", "--seed", "5"])
        .env("NKCHECK_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.join("s2s2-5.jsonl")).unwrap();
    assert!(!parse_jsonl(&text).unwrap().is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let strip = |o: Output| {
        let mut r = parse_jsonl(&String::from_utf8(o.stdout).unwrap()).unwrap();
        r.iter_mut().for_each(|r| r.wall_ms = 0.0);
        r
    };
    let args = ["--model", "s3s3", "--suite", "lie", "--samples", "3", "--seed", "9"];
    assert_eq!(strip(nkcheck(&args)), strip(nkcheck(&args)));
}

#[test]
fn list_checks_prints_ids() {
    let out = nkcheck(&["--model", "s6", "--suite", "reduction", "--list-checks"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("killing-unit-length") && l.contains("expected fail")));
}
