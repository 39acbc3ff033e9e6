use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use integrability::cli::report::OutputFormat;
use integrability::cli::{exit_code, parse_point, run, write_report, MetricSource, ParitySelection, RunConfig};
use integrability::exactla::RankMethod;
use integrability::ratexpr::Rational;

/// Search for polynomial first integrals of a geodesic flow by prolongation and exact rank computation.
#[derive(Parser, Debug)]
#[command(name = "integrability", version)]
struct Args {
    /// `builtin:zipoy-voorhees` or a path to a metric definition file
    #[arg(long, default_value = "builtin:zipoy-voorhees")]
    metric: MetricSource,
    /// Parameter of the built-in family (non-negative integer)
    #[arg(long, default_value = "2", value_parser = parse_delta)]
    delta: u32,
    /// Degree of the integral in the momenta
    #[arg(long, default_value_t = 6)]
    degree: u32,
    /// odd, even, both or none
    #[arg(long, default_value = "both")]
    parity: ParitySelection,
    /// Regular evaluation point `x,y` with exact rational coordinates
    #[arg(long, default_value = "1/2,2", value_parser = parse_point_arg)]
    point: [Rational; 2],
    /// Highest prolongation level n
    #[arg(long = "max-prolong", default_value_t = 6)]
    max_prolong: u32,
    /// exact, modular or both
    #[arg(long = "rank-method", default_value = "modular")]
    rank_method: RankMethod,
    /// Number of random 60-bit primes for the modular rank
    #[arg(long, default_value_t = 2)]
    primes: usize,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, markdown or text
    #[arg(long, default_value = "text")]
    format: OutputFormat,
    /// Matrix cache directory (falls back to $INTEGRABILITY_CACHE_DIR)
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
    /// Directory receiving every assembled matrix in triplet format
    #[arg(long = "emit-matrix")]
    emit_matrix: Option<PathBuf>,
}

fn parse_delta(s: &str) -> Result<u32, String> {
    integrability::metric::ZipoyVoorheesParams::parse(s).map(|p| p.delta).map_err(|e| e.to_string())
}

fn parse_point_arg(s: &str) -> Result<[Rational; 2], String> {
    parse_point(s)
}

fn main() -> ExitCode {
    let a = Args::parse();
    let cfg = RunConfig {
        metric: a.metric,
        delta: a.delta,
        degree: a.degree,
        parity: a.parity,
        point: a.point,
        n_max: a.max_prolong,
        rank_method: a.rank_method,
        primes: a.primes,
        out: a.out,
        format: a.format,
        cache_dir: a.cache_dir,
        emit_matrix: a.emit_matrix,
        ..RunConfig::default()
    };
    let progress = |line: &str| eprintln!("{}", line);
    let result = run(&cfg, &progress).and_then(|r| write_report(&r, &cfg).map(|bytes| (r, bytes)));
    match result {
        Ok((report, bytes)) => {
            if let Some(b) = bytes {
                let _ = std::io::stdout().write_all(&b);
            }
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
