use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nforge_cli::Report;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn nforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nforge")).args(args).env_remove("NFORGE_CACHE_DIR").output().unwrap()
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn run(cmd: &str, file: &str) -> (Report, i32) {
    let out = nforge(&[cmd, problem(file).to_str().unwrap()]);
    (report(&out), out.status.code().unwrap())
}

#[test]
fn groebner_of_x() {
    let (r, code) = run("groebner", "ideals.json");
    assert_eq!(code, 0);
    assert_eq!(r.result["basis"], serde_json::json!(["x"]));
    assert_eq!(r.schema_version, 1);
}

#[test]
fn double_point_is_not_certified() {
    let (r, code) = run("certify-smooth", "double_point.json");
    assert_eq!(code, 1);
    assert!(r.checks[0].detail.starts_with("NotCertified"));
}

#[test]
fn bad_image_fails_at_load() {
    let (r, code) = run("groebner", "bad_image.json");
    assert_eq!(code, 2);
    let e = r.error.unwrap();
    assert_eq!(e.kind, "NotWellDefined");
    assert_eq!(e.location.as_deref(), Some("morphisms[0] `v`"));
    assert!(e.message.contains("maps to `-t^3`"), "{}", e.message);
}

#[test]
fn schema_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"rings": []}"#).unwrap();
    let out = nforge(&["groebner", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).error.unwrap().kind, "SchemaError");

    let undeclared = dir.path().join("undeclared.json");
    std::fs::write(&undeclared, r#"{"rings": [{"name": "B", "base": {"kind": "polynomial", "vars": ["t"]}, "vars": ["Y"], "relations": ["Y - u"]}]}"#).unwrap();
    let out = nforge(&["groebner", undeclared.to_str().unwrap()]);
    let e = report(&out).error.unwrap();
    assert_eq!(e.kind, "ParseError");
    assert!(e.location.unwrap().starts_with("rings[0] `B`.relations[0]"));

    let missing = nforge(&["groebner", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn node_step_passes_and_reverifies() {
    let out = nforge(&["neron-step", problem("run1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r.checks.len() > 20 && r.checks.iter().all(|c| c.passed));
    assert_eq!(r.result["output"]["e"], 1);

    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("step.json");
    std::fs::write(&saved, &out.stdout).unwrap();
    let v = nforge(&["verify", problem("run1.json").to_str().unwrap(), "--report", saved.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    assert!(report(&v).checks.iter().any(|c| c.name == "embedded table reproduced" && c.passed));
}

#[test]
fn machine_report_round_trips_and_pretty_has_table() {
    let out = nforge(&["jacobian", problem("run1.json").to_str().unwrap()]);
    let r = report(&out);
    assert_eq!(r.to_json().as_bytes(), &out.stdout[..]);
    let pretty = nforge(&["jacobian", problem("run1.json").to_str().unwrap(), "--format", "pretty"]);
    let text = String::from_utf8(pretty.stdout).unwrap();
    assert!(text.contains("  #  result  check"));
    assert!(text.contains("PASS    d ≡ P mod I"));
}

#[test]
fn cache_env_overrides_flag_and_never_changes_output() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag_cache = flag_dir.path().join("c");
    let file = problem("run1.json");
    let go = || {
        Command::new(env!("CARGO_BIN_EXE_nforge"))
            .args(["groebner", file.to_str().unwrap(), "--cache-dir", flag_cache.to_str().unwrap()])
            .env("NFORGE_CACHE_DIR", env_dir.path())
            .output()
            .unwrap()
    };
    let first = go();
    let entries: Vec<_> = std::fs::read_dir(env_dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    assert!(entries[0].extension().is_some_and(|x| x == "gb"));
    assert!(!flag_cache.exists());
    let second = go();
    assert_eq!(first.stdout, second.stdout);
    let uncached = nforge(&["groebner", file.to_str().unwrap()]);
    assert_eq!(first.stdout, uncached.stdout);
}

#[test]
fn truncation_flag_overrides_the_file() {
    let file = problem("smooth.json");
    let out = nforge(&["resolve-chain", file.to_str().unwrap(), "--truncation-order", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.options.truncation_order, Some(20));
    assert_eq!(r.result["status"], "terminated");
}

#[test]
fn stalled_chain_is_reported() {
    let (r, code) = run("resolve-chain", "product.json");
    assert_eq!(code, 0);
    assert_eq!(r.result["status"], "stalled");
    assert_eq!(r.result["iteration"], 1);
}
