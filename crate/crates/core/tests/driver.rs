use std::path::PathBuf;
use std::process::Command;

use integrability::analysis::Outcome;
use integrability::cli::report::{emit_report, OutputFormat, Report};
use integrability::cli::{exit_code, parse_point, run, MetricSource, ParitySelection, RunConfig, RunError};
use integrability::ratexpr::{int, ratio};

fn quiet() -> impl Fn(&str) + Sync {
    |_: &str| {}
}

fn cfg(delta: u32, degree: u32) -> RunConfig {
    RunConfig { delta, degree, n_max: degree, geodesic: false, ..RunConfig::default() }
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("integrability-driver-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_integrability"))
}

#[test]
fn exit_codes_follow_verdicts() {
    let r = run(&cfg(2, 2), &quiet()).unwrap();
    assert_eq!(exit_code(&r), 0);
    // Δ must be seen stable over two levels at or beyond ℓ = 2
    let r = run(&cfg(1, 2), &quiet()).unwrap();
    assert_eq!(exit_code(&r), 3);
    let r = run(&RunConfig { n_max: 6, ..cfg(1, 2) }, &quiet()).unwrap();
    assert_eq!(exit_code(&r), 2);
    let even = r.parity_results.iter().find(|p| p.parity.to_string() == "even").unwrap();
    assert!(matches!(even.verdict.outcome, Outcome::CandidateKernel { dimension: 5, excess: 1, .. }));
    // too few levels to see the symbol reach full rank
    let r = run(&RunConfig { n_max: 1, ..cfg(2, 4) }, &quiet()).unwrap();
    assert_eq!(exit_code(&r), 3);
}

#[test]
fn json_round_trip_and_determinism() {
    let c = RunConfig { geodesic: true, ..cfg(2, 3) };
    let a = run(&c, &quiet()).unwrap();
    let back: Report = serde_json::from_slice(&emit_report(&a, OutputFormat::Json)).unwrap();
    assert_eq!(back, a);
    let b = run(&c, &quiet()).unwrap();
    assert_eq!(a.json_without_timing(), b.json_without_timing());
}

#[test]
fn empty_parity_selection_echoes_config() {
    let r = run(&RunConfig { parity: ParitySelection::None, ..cfg(2, 6) }, &quiet()).unwrap();
    assert!(r.parity_results.is_empty());
    assert_eq!(r.config.degree, 6);
    assert_eq!(exit_code(&r), 0);
}

#[test]
fn resumed_run_matches_cold_run() {
    let dir = tmp("resume");
    let cold = run(&cfg(2, 4), &quiet()).unwrap();
    let partial = RunConfig { n_max: 2, early_abort: false, cache_dir: Some(dir.clone()), ..cfg(2, 4) };
    run(&partial, &quiet()).unwrap();
    let hits = std::sync::Mutex::new(0);
    let warm = run(&RunConfig { cache_dir: Some(dir.clone()), ..cfg(2, 4) }, &|l: &str| {
        if l.contains("loaded from cache") {
            *hits.lock().unwrap() += 1;
        }
    })
    .unwrap();
    assert_eq!(*hits.lock().unwrap(), 6);
    assert_eq!(cold.json_without_timing(), warm.json_without_timing());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn corrupt_cache_entry_is_rebuilt() {
    let dir = tmp("corrupt");
    let c = RunConfig { cache_dir: Some(dir.clone()), parity: ParitySelection::Even, ..cfg(2, 2) };
    let first = run(&c, &quiet()).unwrap();
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        let t = std::fs::read_to_string(&p).unwrap();
        std::fs::write(&p, format!("{}# tampered\n", t)).unwrap();
    }
    let second = run(&c, &quiet()).unwrap();
    assert_eq!(first.json_without_timing(), second.json_without_timing());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn singular_point_is_an_error_with_suggestions() {
    let e = run(&RunConfig { point: [int(1), int(0)], ..cfg(2, 2) }, &quiet()).unwrap_err();
    match e {
        RunError::SingularPoint { suggestions, .. } => assert!(!suggestions.is_empty()),
        other => panic!("unexpected {}", other),
    }
}

#[test]
fn metric_file_matches_builtin() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/schwarzschild_prolate.metric");
    let from_file = run(&RunConfig { metric: MetricSource::File(path), ..cfg(1, 2) }, &quiet()).unwrap();
    let builtin = run(&cfg(1, 2), &quiet()).unwrap();
    assert_eq!(from_file.parity_results, builtin.parity_results);
}

#[test]
fn point_parsing() {
    assert_eq!(parse_point("1/2,2").unwrap(), [ratio(1, 2), int(2)]);
    assert_eq!(parse_point(" -3/4 , 5/6 ").unwrap(), [ratio(-3, 4), ratio(5, 6)]);
    assert!(parse_point("1/2").is_err());
}

#[test]
fn binary_exit_codes_and_outputs() {
    let out = bin().args(["--delta", "2", "--degree", "2", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.parity_results.len(), 2);

    let out = bin().args(["--delta", "1", "--degree", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["--point", "1,0", "--degree", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));

    let out = bin().args(["--delta", "-1"]).output().unwrap();
    assert_ne!(out.status.code(), Some(0));

    let dir = tmp("bin");
    let report = dir.join("report.md");
    let mats = dir.join("matrices");
    std::fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .args(["--degree", "2", "--parity", "even", "--max-prolong", "3", "--format", "markdown"])
        .arg("--out")
        .arg(&report)
        .arg("--emit-matrix")
        .arg(&mats)
        .arg("--cache-dir")
        .arg(dir.join("cache"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let md = std::fs::read_to_string(&report).unwrap();
    assert!(md.contains("| n | 0 | 1 | 2 |"));
    assert!(mats.join("even_n0.triplets").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("even n=0"));
    std::fs::remove_dir_all(dir).unwrap();
}
