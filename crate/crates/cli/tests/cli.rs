//! End-to-end tests of the binary: exit codes, JSON determinism, and the
//! file-fixture path.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nullgeo"))
}

fn tmp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nullgeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn passing_fixture_exits_zero() {
    let out = bin()
        .args(["--fixture", "ex3_graph", "--suite", "section2", "--points", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("s2.shape-xi-zero"));
    assert!(text.contains("PASS"));
}

#[test]
fn unknown_fixture_exits_one_and_lists_names() {
    let out = bin().args(["--fixture", "nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ex3_graph"), "{err}");
}

#[test]
fn unsupported_suite_exits_one() {
    let out = bin()
        .args(["--fixture", "ctrl_sasaki", "--suite", "section2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failing_row_exits_two() {
    // perturb phi so the almost-contact rows fail while bootstrap still passes
    let mut spec = nullgeo::fixtures::registry::spec("ctrl_sasaki").unwrap();
    spec.expectations.clear();
    spec.contact.as_mut().unwrap().phi[2][0] = "-1.001".into();
    let path = tmp_dir().join("broken.toml");
    std::fs::write(&path, nullgeo::fixtures::spec_to_toml(&spec)).unwrap();
    let out = bin()
        .args(["--fixture", path.to_str().unwrap(), "--suite", "contact", "--points", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL"), "{err}");
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let dir = tmp_dir();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = bin()
            .args([
                "--fixture",
                "ctrl_totally_geodesic",
                "--suite",
                "all",
                "--points",
                "16",
                "--format",
                "json",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let ja = std::fs::read(&a).unwrap();
    let jb = std::fs::read(&b).unwrap();
    assert_eq!(ja, jb);
    // schema sanity
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["fixture"], "ctrl_totally_geodesic");
    assert!(v["reports"].as_array().unwrap().len() >= 2);
}

#[test]
fn list_flag_prints_registry() {
    let out = bin().arg("--list").arg("--fixture").arg("x").output().unwrap();
    // --list short-circuits before fixture resolution
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ctrl_sasaki_indef"));
    assert_eq!(out.status.code(), Some(0));
}
