//! Quadratic integrals across the family: flat space (δ = 0) and Schwarzschild (δ = 1, Carter's constant)
//! leave a kernel beyond the trivial integrals; the other members do not.

use integrability::cli::{exit_code, run, ParitySelection, RunConfig};

fn main() {
    for delta in 0..=3 {
        let cfg = RunConfig { delta, degree: 2, parity: ParitySelection::Both, n_max: 6, geodesic: false, ..RunConfig::default() };
        let report = run(&cfg, &|_| {}).unwrap();
        let verdicts: Vec<String> = report
            .parity_results
            .iter()
            .map(|p| format!("{} {}", p.parity, p.verdict.outcome.label()))
            .collect();
        println!("delta {}: {} (exit code {})", delta, verdicts.join(", "), exit_code(&report));
    }
}
