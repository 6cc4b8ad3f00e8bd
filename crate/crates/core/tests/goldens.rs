//! Golden-report regression tests: the full suite run over each registry
//! fixture at default settings must serialize byte-for-byte to the committed
//! JSON. Regenerate with `BLESS=1 cargo test -p nullgeo --test goldens`.

use std::path::PathBuf;

use nullgeo::fixtures;
use nullgeo::report::{RunConfig, RunReport};
use nullgeo::suites;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

fn render(name: &str) -> String {
    let fx = fixtures::load(name).unwrap();
    let cfg = RunConfig::default();
    let reports = suites::run_all(&fx, &cfg).unwrap();
    RunReport::new(fx.name(), cfg, reports).to_json()
}

#[test]
fn registry_reports_match_goldens() {
    let bless = std::env::var_os("BLESS").is_some();
    let dir = golden_dir();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut drift = Vec::new();
    for name in fixtures::registry::names() {
        let rendered = render(name);
        let path = dir.join(format!("{name}.json"));
        if bless {
            std::fs::write(&path, &rendered).unwrap();
            continue;
        }
        let committed = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
        if committed != rendered {
            drift.push(name);
        }
    }
    assert!(
        drift.is_empty(),
        "golden drift in {drift:?}; regenerate with BLESS=1 after reviewing"
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = render("ex3_graph");
    let b = render("ex3_graph");
    assert_eq!(a, b);
    let a = render("ctrl_sasaki_indef");
    let b = render("ctrl_sasaki_indef");
    assert_eq!(a, b);
}
