use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ampforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ampforge")).args(args).output().unwrap()
}

fn project(src: &str, test: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("src")).unwrap();
    fs::create_dir_all(dir.path().join("tests")).unwrap();
    fs::write(dir.path().join("src/a.mini"), src).unwrap();
    fs::write(dir.path().join("tests/a_test.mini"), test).unwrap();
    dir
}

fn p(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

const SRC: &str = "class A { var n: int; init() { self.n = 0; } pub fn bump() { self.n += 1; } pub fn get_n() -> int { return self.n; } }";

#[test]
fn mutate_prints_json() {
    let dir = project(SRC, "fn test_a() { let a = new A(); a.bump(); assert_eq(1, a.get_n()); }");
    let o = ampforge(&["mutate", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["killed", "mutants", "score"]);
    let m = &v["mutants"][0];
    for k in ["id", "file", "line", "operator", "method"] {
        assert!(m.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["score"], 100.0);
}

#[test]
fn mutate_writes_json_file() {
    let dir = project(SRC, "fn test_a() { let a = new A(); a.bump(); }");
    let out = dir.path().join("m.json");
    let o = ampforge(&["mutate", p(dir.path()), "--json", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["killed"].as_array().unwrap().len(), 0);
}

#[test]
fn baseline_red_exits_2() {
    let dir = project(SRC, "fn test_a() { let a = new A(); assert_eq(5, a.get_n()); }");
    for cmd in ["mutate", "amplify"] {
        let o = ampforge(&[cmd, p(dir.path())]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("test_a"));
    }
}

#[test]
fn parse_error_exits_3() {
    let dir = project("class A { pub fn f( }", "fn test_a() { }");
    let o = ampforge(&["amplify", p(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("src/a.mini:1:"));
}

#[test]
fn static_error_exits_3() {
    let dir = project(SRC, "fn test_a() { let a = new A(); a.missing(); }");
    let o = ampforge(&["mutate", p(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn amplify_writes_report_and_patches() {
    let dir = project(SRC, "fn test_a() { let a = new A(); a.bump(); }");
    let out = dir.path().join("r.json");
    let patches = dir.path().join("patches");
    let o = ampforge(&["amplify", p(dir.path()), "--seed", "3", "--out", p(&out), "--patches", p(&patches)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = ampforge_core::report::read_report(&out).unwrap();
    assert_eq!(report.config.seed, 3);
    assert!(report.totals.killed_after > report.totals.killed_before);
    let names: Vec<String> = fs::read_dir(&patches).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names.len(), report.totals.focused_tests);
    assert!(String::from_utf8_lossy(&o.stdout).contains("Improve test on A."));
}

#[test]
fn unknown_amplifier_is_rejected() {
    let dir = project(SRC, "fn test_a() { }");
    let o = ampforge(&["amplify", p(dir.path()), "--amplifiers", "NumericLiteral,Bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Bogus"));
}
