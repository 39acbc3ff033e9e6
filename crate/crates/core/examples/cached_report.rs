//! A cached end-to-end run: the second run loads every matrix from disk and yields the same report.

use integrability::cli::report::{emit_report, OutputFormat, Report};
use integrability::cli::{run, ParitySelection, RunConfig};

fn main() {
    let dir = std::env::temp_dir().join("integrability-example-cache");
    let cfg = RunConfig {
        degree: 4,
        parity: ParitySelection::Both,
        n_max: 4,
        cache_dir: Some(dir.clone()),
        ..RunConfig::default()
    };
    let cold = run(&cfg, &|line| eprintln!("[cold] {}", line)).unwrap();
    let warm = run(&cfg, &|line| eprintln!("[warm] {}", line)).unwrap();
    println!("identical reports: {}", cold.json_without_timing() == warm.json_without_timing());

    let json = emit_report(&warm, OutputFormat::Json);
    let back: Report = serde_json::from_slice(&json).unwrap();
    println!("JSON round trip: {}", back == warm);
    println!("{}", String::from_utf8(emit_report(&warm, OutputFormat::Markdown)).unwrap());
    std::fs::remove_dir_all(dir).ok();
}
