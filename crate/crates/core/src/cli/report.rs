//! Report structure and its JSON, markdown and plain-text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::geodesic::GeodesicReport;
use super::reference::Comparison;
use crate::analysis::{FiniteTypeReport, Outcome, Verdict};
use crate::exactla::{Certificate, RankMethod};
use crate::pde::Parity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Markdown,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "text" | "txt" => Ok(OutputFormat::Text),
            other => Err(format!("unknown format `{}` (expected json, markdown or text)", other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub metric: String,
    pub delta: Option<u32>,
    pub degree: u32,
    pub parity: String,
    pub point: [String; 2],
    pub max_prolong: u32,
    pub rank_method: RankMethod,
    pub primes: usize,
    pub hamiltonian: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub num_equations: usize,
    pub dim_u: usize,
    pub rank: usize,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub n: u32,
    pub certified: bool,
    pub certificate: Option<Certificate>,
    pub modular_ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub method: RankMethod,
    pub primes: Vec<u64>,
    pub point: [String; 2],
    pub all_certified: bool,
    pub levels: Vec<LevelCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMetrics {
    pub n: u32,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub max_entry_bits: u64,
    pub mean_entry_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityResult {
    pub parity: Parity,
    pub trivial_dim: usize,
    pub delta_table: Vec<TableRow>,
    pub aborted_early: bool,
    pub finite_type: FiniteTypeReport,
    pub verdict: Verdict,
    pub certification: Certification,
    pub metrics: Vec<LevelMetrics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub parity_results: Vec<ParityResult>,
    pub reference: Vec<Comparison>,
    pub notes: Vec<String>,
    pub geodesic: Option<GeodesicReport>,
    pub timing: Timing,
}

impl Report {
    /// JSON without the timing block, for determinism comparisons.
    pub fn json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("timing");
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

pub fn emit_report(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Markdown => render(report, true).into_bytes(),
        OutputFormat::Text => render(report, false).into_bytes(),
    }
}

fn grid(out: &mut String, rows: &[(String, Vec<String>)], markdown: bool) {
    if rows.is_empty() {
        return;
    }
    if markdown {
        let ncols = rows[0].1.len();
        for (i, (head, cells)) in rows.iter().enumerate() {
            let _ = writeln!(out, "| {} | {} |", head, cells.join(" | "));
            if i == 0 {
                let _ = writeln!(out, "|---|{}", "---:|".repeat(ncols));
            }
        }
        out.push('\n');
        return;
    }
    let head_w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let ncols = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| rows.iter().filter_map(|r| r.1.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    for (head, cells) in rows {
        let mut line = format!("{:<w$}", head, w = head_w);
        for (c, cell) in cells.iter().enumerate() {
            let _ = write!(line, "  {:>w$}", cell, w = widths[c]);
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out.push('\n');
}

fn heading(out: &mut String, text: &str, level: usize, markdown: bool) {
    if markdown {
        let _ = writeln!(out, "{} {}\n", "#".repeat(level), text);
    } else {
        let _ = writeln!(out, "{}\n{}\n", text, if level == 1 { "=" } else { "-" }.repeat(text.chars().count()));
    }
}

fn verdict_line(v: &Verdict) -> String {
    let mut s = v.outcome.label().to_string();
    if let Outcome::CandidateKernel { dimension, excess, .. } = &v.outcome {
        let _ = write!(s, " (kernel dimension {}, {} beyond the trivial integrals)", dimension, excess);
    }
    let _ = write!(s, ": {}", v.justification.reason);
    s
}

fn render(r: &Report, markdown: bool) -> String {
    let mut out = String::new();
    let c = &r.config;
    heading(&mut out, "Polynomial integral search", 1, markdown);
    let _ = writeln!(
        out,
        "metric {}, degree {}, parity {}, point ({}, {}), n up to {}, rank method {}\n",
        c.metric,
        c.degree,
        c.parity,
        c.point[0],
        c.point[1],
        c.max_prolong,
        match c.rank_method {
            RankMethod::Bareiss => "exact".to_string(),
            RankMethod::Modular => format!("modular with {} primes", c.primes),
            RankMethod::Both => format!("exact, cross-checked modulo {} primes", c.primes),
        }
    );
    for pr in &r.parity_results {
        let name = format!("S_{}", pr.parity);
        heading(&mut out, &format!("{} (trivial integrals: {})", name, pr.trivial_dim), 2, markdown);
        let t = &pr.delta_table;
        let rows = vec![
            ("n".to_string(), t.iter().map(|x| x.n.to_string()).collect()),
            ("# of eqn".to_string(), t.iter().map(|x| x.num_equations.to_string()).collect()),
            ("dim(u)".to_string(), t.iter().map(|x| x.dim_u.to_string()).collect()),
            ("rk(A)".to_string(), t.iter().map(|x| x.rank.to_string()).collect()),
            ("Δ".to_string(), t.iter().map(|x| x.delta.to_string()).collect()),
            (
                "certified".to_string(),
                pr.certification.levels.iter().map(|l| if l.certified { "yes" } else { "no" }.to_string()).collect(),
            ),
        ];
        grid(&mut out, &rows, markdown);
        let f = &pr.finite_type;
        let ell = f.ell.map_or("none".to_string(), |l| l.to_string());
        let _ = writeln!(out, "Symbol of {} (ℓ = {}):\n", name, ell);
        let rows = vec![
            ("n".to_string(), f.rows.iter().map(|x| x.n.to_string()).collect()),
            ("# of eqn".to_string(), f.rows.iter().map(|x| x.distinct_rows.to_string()).collect()),
            ("dim(v)".to_string(), f.rows.iter().map(|x| x.dim_v.to_string()).collect()),
            ("rk(B)".to_string(), f.rows.iter().map(|x| x.symbol_rank.to_string()).collect()),
            ("Δ".to_string(), f.rows.iter().map(|x| x.symbol_delta.to_string()).collect()),
        ];
        grid(&mut out, &rows, markdown);
        let _ = writeln!(out, "Verdict: {}\n", verdict_line(&pr.verdict));
    }
    if !r.reference.is_empty() {
        heading(&mut out, "Reference tables", 2, markdown);
        for cmp in &r.reference {
            let _ = writeln!(out, "{}: {}/{} columns reproduced", cmp.table, cmp.matched, cmp.columns);
        }
        out.push('\n');
    }
    if !r.notes.is_empty() {
        heading(&mut out, "Notes", 2, markdown);
        for n in &r.notes {
            let _ = writeln!(out, "- {}", n);
        }
        out.push('\n');
    }
    if let Some(g) = &r.geodesic {
        heading(&mut out, "Geodesic sanity (non-rigorous)", 2, markdown);
        let _ = writeln!(
            out,
            "{} RK4 steps of {}: relative drift of H {:.3e}, drift of cyclic momenta {} and {}\n",
            g.steps, g.step_size, g.drift_h, g.drift_p_cyclic1, g.drift_p_cyclic2
        );
    }
    out
}
