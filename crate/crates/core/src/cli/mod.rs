//! Batch driver: configuration, the end-to-end run, matrix caching, reports and exit codes.

pub mod cache;
pub mod geodesic;
pub mod reference;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use thiserror::Error;

use crate::analysis::{
    delta_table_with, finite_type_level, trivial_basis_for, verdict, AnalysisError, DeltaTable, Outcome, TableOptions,
};
use crate::exactla::{random_primes, RankMethod, SparseRationalMatrix, DEFAULT_PRIME_SEED};
use crate::metric::{builtin_zipoy_voorhees, Hamiltonian, MetricError, MetricSpec, ZipoyVoorheesParams};
use crate::pde::{poisson_bracket_system, split_parity, LinearPdeSystem, Parity, PdeError};
use crate::prolongation::{assemble_with, prolong, suggest_points, JetEvaluator};
use crate::ratexpr::{format_rational, parse_rational, ratio, int, Rational};

use cache::{matrix_key, CacheError, MatrixCache};
use geodesic::{default_initial_state, geodesic_sanity};
use report::{
    Certification, ConfigEcho, LevelCertificate, LevelMetrics, OutputFormat, ParityResult, Report, TableRow, Timing,
};

/// Steps of the geodesic check attached to reports for built-in metrics.
pub const REPORT_GEODESIC_STEPS: usize = 10_000;
pub const GEODESIC_STEP: f64 = 1e-3;
pub const DEFAULT_DEGREE_CAP: u32 = 8;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("evaluation point is singular: {message}; try one of: {suggestions}")]
    SingularPoint { message: String, suggestions: String },
    #[error("rank at n = {n} for the {parity} system is not certified")]
    Uncertified { parity: Parity, n: u32 },
    #[error("could not write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricSource {
    Builtin(String),
    File(PathBuf),
}

impl FromStr for MetricSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(name) = s.strip_prefix("builtin:") {
            return match name {
                "zipoy-voorhees" | "zv" => Ok(MetricSource::Builtin("zipoy-voorhees".into())),
                other => Err(format!("unknown builtin metric `{}` (available: zipoy-voorhees)", other)),
            };
        }
        let path = s.strip_prefix("file:").unwrap_or(s);
        if path.is_empty() {
            return Err("empty metric path".into());
        }
        Ok(MetricSource::File(PathBuf::from(path)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParitySelection {
    Odd,
    Even,
    Both,
    None,
}

impl ParitySelection {
    pub fn parities(self) -> Vec<Parity> {
        match self {
            ParitySelection::Odd => vec![Parity::Odd],
            ParitySelection::Even => vec![Parity::Even],
            ParitySelection::Both => vec![Parity::Odd, Parity::Even],
            ParitySelection::None => vec![],
        }
    }

    fn name(self) -> &'static str {
        match self {
            ParitySelection::Odd => "odd",
            ParitySelection::Even => "even",
            ParitySelection::Both => "both",
            ParitySelection::None => "none",
        }
    }
}

impl FromStr for ParitySelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "odd" => Ok(ParitySelection::Odd),
            "even" => Ok(ParitySelection::Even),
            "both" => Ok(ParitySelection::Both),
            "none" => Ok(ParitySelection::None),
            other => Err(format!("unknown parity `{}` (expected odd, even, both or none)", other)),
        }
    }
}

/// Parse `"1/2,2"` into an exact point.
pub fn parse_point(text: &str) -> Result<[Rational; 2], String> {
    let (a, b) = text.split_once(',').ok_or_else(|| format!("point `{}` must be `x,y`", text))?;
    let p = |s: &str| parse_rational(s.trim()).map_err(|e| format!("point coordinate `{}`: {}", s.trim(), e));
    Ok([p(a)?, p(b)?])
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub metric: MetricSource,
    /// Parameter of the built-in family; ignored for metric files.
    pub delta: u32,
    pub degree: u32,
    pub parity: ParitySelection,
    pub point: [Rational; 2],
    pub n_max: u32,
    pub rank_method: RankMethod,
    pub primes: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    pub emit_matrix: Option<PathBuf>,
    pub early_abort: bool,
    /// Fail with an error when some computed level is uncertified.
    pub require_certified: bool,
    /// Attach the floating-point geodesic check for built-in metrics.
    pub geodesic: bool,
    /// Largest accepted ansatz degree.
    pub degree_cap: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metric: MetricSource::Builtin("zipoy-voorhees".into()),
            delta: 2,
            degree: 6,
            parity: ParitySelection::Both,
            point: [ratio(1, 2), int(2)],
            n_max: 6,
            rank_method: RankMethod::Modular,
            primes: 2,
            out: None,
            format: OutputFormat::Text,
            cache_dir: None,
            emit_matrix: None,
            early_abort: true,
            require_certified: false,
            geodesic: true,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if self.degree == 0 {
            return Err(RunError::Config("degree must be at least 1".into()));
        }
        if self.degree > self.degree_cap {
            return Err(RunError::Config(format!(
                "degree {} exceeds the cap {}; raise `degree_cap` to proceed",
                self.degree, self.degree_cap
            )));
        }
        if self.primes == 0 && self.rank_method != RankMethod::Bareiss {
            return Err(RunError::Config("the modular rank method needs at least one prime".into()));
        }
        Ok(())
    }

    pub fn metric_label(&self) -> String {
        match &self.metric {
            MetricSource::Builtin(name) => format!("builtin:{} (delta = {})", name, self.delta),
            MetricSource::File(p) => p.display().to_string(),
        }
    }

    fn is_builtin(&self) -> bool {
        matches!(self.metric, MetricSource::Builtin(_))
    }
}

pub fn load_metric(cfg: &RunConfig) -> Result<MetricSpec, RunError> {
    Ok(match &cfg.metric {
        MetricSource::Builtin(_) => builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: cfg.delta }),
        MetricSource::File(p) => MetricSpec::from_file(p)?,
    })
}

/// Serializes every file write of a run (cache entries and exported matrices).
struct Writer {
    lock: Mutex<()>,
}

impl Writer {
    fn write(&self, path: &Path, body: &str) -> Result<(), RunError> {
        let _g = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        fs::write(path, body).map_err(|source| RunError::Io { path: path.into(), source })
    }

    fn store(&self, cache: &MatrixCache, key: &str, m: &SparseRationalMatrix) -> Result<(), RunError> {
        let _g = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        Ok(cache.store(key, m)?)
    }
}

fn entry_bits(m: &SparseRationalMatrix) -> (u64, u64) {
    let mut max = 0;
    let mut total = 0u64;
    let mut count = 0u64;
    for row in m.rows() {
        for (_, v) in row {
            let b = v.numer().bits() + v.denom().bits();
            max = max.max(b);
            total += b;
            count += 1;
        }
    }
    (max, total.checked_div(count).unwrap_or(0))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    h: &'a Hamiltonian,
    cache: Option<&'a MatrixCache>,
    writer: &'a Writer,
    opts: &'a TableOptions,
    progress: &'a (dyn Fn(&str) + Sync),
}

fn run_parity(ctx: &Ctx, parity: Parity, system: &LinearPdeSystem) -> Result<ParityResult, RunError> {
    let cfg = ctx.cfg;
    let point = &cfg.point;
    let tag = parity.to_string();
    let basis = trivial_basis_for(ctx.h, cfg.degree, parity);
    let ftype = finite_type_level(system, parity, point, cfg.n_max, ctx.opts)?;
    (ctx.progress)(&format!("{}: symbol full rank from ℓ = {:?}", tag, ftype.ell));
    let htext = ctx.h.canonical_text();
    let mut ev: Option<JetEvaluator> = None;
    let mut metrics = Vec::new();
    let mut io_err: Option<RunError> = None;
    let mut emit_err: Option<RunError> = None;
    let matrix = |n: u32| -> Result<SparseRationalMatrix, AnalysisError> {
        let key = matrix_key(&htext, cfg.degree, parity, n, point);
        if let Some(c) = ctx.cache {
            match c.load(&key) {
                Ok(Some(m)) => {
                    (ctx.progress)(&format!("{} n={}: loaded from cache", tag, n));
                    return Ok(m);
                }
                Ok(None) => {}
                Err(e) => (ctx.progress)(&format!("{} n={}: ignoring cache entry: {}", tag, n, e)),
            }
        }
        if ev.is_none() {
            ev = Some(JetEvaluator::new(system, point, cfg.n_max)?);
        }
        let m = assemble_with(&prolong(system, n), ev.as_ref().expect("evaluator")).matrix;
        if let Some(c) = ctx.cache {
            if let Err(e) = ctx.writer.store(c, &key, &m) {
                io_err.get_or_insert(e);
            }
        }
        Ok(m)
    };
    let progress = |row: &crate::analysis::DeltaRow, a: &SparseRationalMatrix| {
        let (max_bits, mean_bits) = entry_bits(a);
        metrics.push(LevelMetrics {
            n: row.n,
            rows: a.nrows(),
            cols: a.ncols(),
            nnz: a.nnz(),
            max_entry_bits: max_bits,
            mean_entry_bits: mean_bits,
        });
        (ctx.progress)(&format!(
            "{} n={}: {}x{} nnz {} bits max {} mean {}: rank {} Δ {} {}",
            tag,
            row.n,
            a.nrows(),
            a.ncols(),
            a.nnz(),
            max_bits,
            mean_bits,
            row.rank,
            row.delta,
            if row.certified { "certified" } else { "UNCERTIFIED" }
        ));
        if let Some(dir) = &cfg.emit_matrix {
            let path = dir.join(format!("{}_n{}.triplets", tag, row.n));
            if let Err(e) = ctx.writer.write(&path, &a.to_triplets()) {
                emit_err.get_or_insert(e);
            }
        }
    };
    let table = delta_table_with(system, &basis, point, cfg.n_max, ctx.opts, matrix, progress)?;
    if let Some(e) = io_err.or(emit_err) {
        return Err(e);
    }
    if cfg.require_certified {
        if let Some(r) = table.rows.iter().find(|r| !r.certified) {
            return Err(RunError::Uncertified { parity, n: r.n });
        }
    }
    let v = verdict(&table, &ftype, point);
    Ok(parity_result(&table, ftype, v, &ctx.opts.primes, cfg, metrics))
}

fn parity_result(
    table: &DeltaTable,
    finite_type: crate::analysis::FiniteTypeReport,
    verdict: crate::analysis::Verdict,
    primes: &[u64],
    cfg: &RunConfig,
    metrics: Vec<LevelMetrics>,
) -> ParityResult {
    let levels: Vec<LevelCertificate> = table
        .rows
        .iter()
        .map(|r| LevelCertificate {
            n: r.n,
            certified: r.certified,
            certificate: r.rank_detail.certificate.clone(),
            modular_ranks: r.rank_detail.modular_ranks.clone(),
        })
        .collect();
    ParityResult {
        parity: table.parity,
        trivial_dim: table.trivial_dim,
        delta_table: table
            .rows
            .iter()
            .map(|r| TableRow { n: r.n, num_equations: r.num_equations, dim_u: r.dim_u, rank: r.rank, delta: r.delta })
            .collect(),
        aborted_early: table.aborted_early,
        finite_type,
        verdict,
        certification: Certification {
            method: cfg.rank_method,
            primes: if cfg.rank_method == RankMethod::Bareiss { vec![] } else { primes.to_vec() },
            point: point_strings(&cfg.point),
            all_certified: levels.iter().all(|l| l.certified),
            levels,
        },
        metrics,
    }
}

/// Size of the largest matrix of the run, with a rough memory figure for its exact form.
fn size_estimate(parity: Parity, s: &LinearPdeSystem, n_max: u32) -> String {
    let rows = s.equations.len() * (n_max as usize + 1) * (n_max as usize + 2) / 2;
    let cols = crate::prolongation::jet_dimension(s.unknowns.len(), n_max);
    let nnz_per_row = s.equations.iter().map(|e| e.terms.len()).max().unwrap_or(0) * (n_max as usize + 1) * (n_max as usize + 2) / 2;
    // about 64 bytes per stored rational entry
    let mib = (rows * nnz_per_row.min(cols) * 64) as f64 / (1u64 << 20) as f64;
    format!("{}: largest matrix {}x{} at n={}, at most {:.1} MiB of exact entries", parity, rows, cols, n_max, mib)
}

fn point_strings(p: &[Rational; 2]) -> [String; 2] {
    [format_rational(&p[0]), format_rational(&p[1])]
}

fn echo(cfg: &RunConfig, h: Option<&Hamiltonian>) -> ConfigEcho {
    ConfigEcho {
        metric: cfg.metric_label(),
        delta: cfg.is_builtin().then_some(cfg.delta),
        degree: cfg.degree,
        parity: cfg.parity.name().into(),
        point: point_strings(&cfg.point),
        max_prolong: cfg.n_max,
        rank_method: cfg.rank_method,
        primes: cfg.primes,
        hamiltonian: h.map(|h| h.to_string()).unwrap_or_default(),
    }
}

fn reference_notes(cfg: &RunConfig, results: &[ParityResult]) -> Vec<reference::Comparison> {
    let mut out = Vec::new();
    if !cfg.is_builtin() || cfg.degree != 6 {
        return out;
    }
    let at_ref_point = cfg.point == [ratio(1, 2), int(2)];
    for pr in results {
        let (name, table) = match pr.parity {
            Parity::Odd => ("odd Δ table", &reference::ODD_DELTA2[..]),
            Parity::Even => ("even Δ table", &reference::EVEN_DELTA2[..]),
        };
        if cfg.delta == 2 && at_ref_point {
            let rows: Vec<crate::analysis::DeltaRow> = pr
                .delta_table
                .iter()
                .zip(&pr.certification.levels)
                .map(|(r, l)| crate::analysis::DeltaRow {
                    n: r.n,
                    num_equations: r.num_equations,
                    dim_u: r.dim_u,
                    rank: r.rank,
                    delta: r.delta,
                    certified: l.certified,
                    rank_detail: crate::exactla::RankResult {
                        rank: r.rank,
                        method: cfg.rank_method,
                        primes_used: vec![],
                        modular_ranks: vec![],
                        certified_exact: l.certified,
                        certificate: None,
                    },
                    trivial_in_kernel: true,
                })
                .collect();
            out.push(reference::compare_delta(name, table, &rows));
        }
        if pr.parity == Parity::Even {
            out.push(reference::compare_symbol(
                "even symbol table",
                &reference::EVEN_SYMBOL,
                &pr.finite_type.rows,
                pr.finite_type.ell,
                reference::EVEN_ELL,
            ));
        }
    }
    out
}

/// Run the whole pipeline. `progress` receives one line per computed level.
pub fn run(cfg: &RunConfig, progress: &(dyn Fn(&str) + Sync)) -> Result<Report, RunError> {
    let start = Instant::now();
    cfg.validate()?;
    let mut notes = Vec::new();
    let parities = cfg.parity.parities();
    if parities.is_empty() {
        return Ok(Report {
            config: echo(cfg, None),
            parity_results: vec![],
            reference: vec![],
            notes,
            geodesic: None,
            timing: Timing { total_seconds: start.elapsed().as_secs_f64() },
        });
    }
    let spec = load_metric(cfg)?;
    let h = Hamiltonian::from_metric(&spec)?;
    let system = poisson_bracket_system(&h, cfg.degree)?;
    if let Err(e) = h.check_point(&cfg.point) {
        let suggestions = suggest_points(&system, &cfg.point, 3)
            .iter()
            .map(|p| format!("{},{}", format_rational(&p[0]), format_rational(&p[1])))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(RunError::SingularPoint { message: e.to_string(), suggestions });
    }
    let (odd, even) = split_parity(&system)?;
    for (p, s) in [(Parity::Odd, &odd), (Parity::Even, &even)] {
        if parities.contains(&p) {
            progress(&size_estimate(p, s, cfg.n_max));
        }
    }
    let cache = MatrixCache::resolve(cfg.cache_dir.as_deref())?;
    if let Some(dir) = &cfg.emit_matrix {
        fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
    }
    let opts = TableOptions {
        method: cfg.rank_method,
        primes: random_primes(cfg.primes, DEFAULT_PRIME_SEED),
        early_abort: cfg.early_abort,
        ..TableOptions::default()
    };
    let writer = Writer { lock: Mutex::new(()) };
    let ctx = Ctx { cfg, h: &h, cache: cache.as_ref(), writer: &writer, opts: &opts, progress };
    let (r_odd, r_even) = rayon::join(
        || parities.contains(&Parity::Odd).then(|| run_parity(&ctx, Parity::Odd, &odd)),
        || parities.contains(&Parity::Even).then(|| run_parity(&ctx, Parity::Even, &even)),
    );
    let mut results = Vec::new();
    for r in [r_odd, r_even].into_iter().flatten() {
        results.push(r?);
    }
    notes.push(
        "trivial integrals are the polynomials in H and the two cyclic momenta; extra Killing symmetries of a user metric are not accounted for"
            .into(),
    );
    for pr in &results {
        if pr.aborted_early {
            notes.push(format!(
                "{}: stopped after Δ = 0 was certified on {} consecutive levels",
                pr.parity,
                opts.confirm_levels + 1
            ));
        }
    }
    let reference = reference_notes(cfg, &results);
    for c in &reference {
        notes.extend(c.notes.iter().cloned());
    }
    let geodesic = if cfg.geodesic && cfg.is_builtin() {
        match geodesic_sanity(&h, default_initial_state(), REPORT_GEODESIC_STEPS, GEODESIC_STEP) {
            Ok(g) => Some(g),
            Err(e) => {
                notes.push(format!("geodesic check (non-rigorous): {}", e));
                None
            }
        }
    } else {
        None
    };
    Ok(Report {
        config: echo(cfg, Some(&h)),
        parity_results: results,
        reference,
        notes,
        geodesic,
        timing: Timing { total_seconds: start.elapsed().as_secs_f64() },
    })
}

/// 0 when every selected parity has no nontrivial integral, 2 when any parity yields a candidate
/// kernel, otherwise 3 if any is inconclusive. Errors map to 1 in the binary.
pub fn exit_code(report: &Report) -> i32 {
    let outcomes: Vec<&Outcome> = report.parity_results.iter().map(|p| &p.verdict.outcome).collect();
    if outcomes.iter().any(|o| matches!(o, Outcome::CandidateKernel { .. })) {
        2
    } else if outcomes.iter().any(|o| matches!(o, Outcome::Inconclusive)) {
        3
    } else {
        0
    }
}

/// Write the rendered report to `cfg.out`, or return it for stdout when no path is given.
pub fn write_report(report: &Report, cfg: &RunConfig) -> Result<Option<Vec<u8>>, RunError> {
    let bytes = report::emit_report(report, cfg.format);
    match &cfg.out {
        Some(p) => {
            fs::write(p, &bytes).map_err(|source| RunError::Io { path: p.clone(), source })?;
            Ok(None)
        }
        None => Ok(Some(bytes)),
    }
}
