//! Trivial integrals, Δ tables, finite-type level and the existence verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{
    certified_rank, random_primes, rank_exact, Certificate, LinAlgError, RankMethod, RankResult, SparseRationalMatrix,
    DEFAULT_LIFT_STEPS, DEFAULT_PRIME_SEED,
};
use crate::momentum::MomentumPolynomial;
use crate::pde::{coefficients_for, LinearPdeSystem, Parity};
use crate::prolongation::{assemble_with, jet_dimension, jet_vector, prolong, symbol_assemble, AssemblyError, JetEvaluator};
use crate::ratexpr::{format_rational, RatExprError, Rational};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("trivial generator is singular at the point: {0}")]
    SingularGenerator(#[from] RatExprError),
    #[error("trivial jet vector {index} is not annihilated at level {n}")]
    TrivialNotInKernel { index: usize, n: u32 },
}

/// Products `H^a I1^b I2^c` of fixed degree and parity, where `I1`, `I2` are the cyclic momenta.
#[derive(Clone, Debug)]
pub struct TrivialBasis {
    pub degree: u32,
    pub parity: Parity,
    /// `(a, b, c)` per generator.
    pub exponents: Vec<(u32, u32, u32)>,
    pub generators: Vec<MomentumPolynomial>,
}

/// All `H^a I1^b I2^c` with `2a + b + c = degree` and `b + c` of the given parity, ordered by
/// `a` descending then `b` descending.
pub fn trivial_basis(degree: u32, parity: Parity, h: &MomentumPolynomial, i1: &MomentumPolynomial, i2: &MomentumPolynomial) -> TrivialBasis {
    let mut exponents = Vec::new();
    for a in (0..=degree / 2).rev() {
        let rest = degree - 2 * a;
        let par = if rest.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
        if par != parity {
            continue;
        }
        for b in (0..=rest).rev() {
            exponents.push((a, b, rest - b));
        }
    }
    let max_a = exponents.iter().map(|e| e.0).max().unwrap_or(0);
    let hp: Vec<MomentumPolynomial> = std::iter::successors(Some(MomentumPolynomial::one(h.vars().clone())), |p| Some(p.mul(h)))
        .take(max_a as usize + 1)
        .collect();
    let generators = exponents.iter().map(|&(a, b, c)| hp[a as usize].mul(&i1.pow(b)).mul(&i2.pow(c))).collect();
    TrivialBasis { degree, parity, exponents, generators }
}

/// The trivial basis for a Hamiltonian whose cyclic momenta occupy momentum slots 2 and 3.
pub fn trivial_basis_for(h: &crate::metric::Hamiltonian, degree: u32, parity: Parity) -> TrivialBasis {
    let v = h.coords.base_vars.clone();
    trivial_basis(degree, parity, &h.poly, &MomentumPolynomial::momentum(v.clone(), 2), &MomentumPolynomial::momentum(v, 3))
}

/// Jet vectors of the generators at level `n`, in the column order of `system`.
pub fn trivial_jet_vectors(basis: &TrivialBasis, system: &LinearPdeSystem, point: &[Rational; 2], n: u32) -> Result<Vec<Vec<Rational>>, AnalysisError> {
    basis
        .generators
        .iter()
        .map(|g| Ok(jet_vector(&coefficients_for(system, g), point, n)?))
        .collect()
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub method: RankMethod,
    pub primes: Vec<u64>,
    /// Stop once Δ has been zero for `1 + confirm_levels` consecutive certified levels.
    pub early_abort: bool,
    pub confirm_levels: u32,
    pub lift_steps: usize,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            method: RankMethod::Modular,
            primes: random_primes(2, DEFAULT_PRIME_SEED),
            early_abort: true,
            confirm_levels: 1,
            lift_steps: DEFAULT_LIFT_STEPS,
        }
    }
}

impl TableOptions {
    pub fn with_prime_count(count: usize) -> Self {
        TableOptions { primes: random_primes(count, DEFAULT_PRIME_SEED), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub n: u32,
    pub num_equations: usize,
    pub dim_u: usize,
    pub rank: usize,
    pub delta: i64,
    pub certified: bool,
    pub rank_detail: RankResult,
    /// Every trivial jet vector is annihilated exactly at this level (checked before ranking;
    /// a failure aborts the table).
    pub trivial_in_kernel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaTable {
    pub parity: Parity,
    pub trivial_dim: usize,
    pub rows: Vec<DeltaRow>,
    pub aborted_early: bool,
    /// Exactly verified kernel vectors at the last level.
    #[serde(skip)]
    pub last_kernel: Vec<Vec<Rational>>,
}

/// Assemble, certify the rank, and record `Δ = dim_u - rank - trivial_dim` for `n = 0..=n_max`.
pub fn delta_table(
    system: &LinearPdeSystem,
    basis: &TrivialBasis,
    point: &[Rational; 2],
    n_max: u32,
    opts: &TableOptions,
    progress: impl FnMut(&DeltaRow, &SparseRationalMatrix),
) -> Result<DeltaTable, AnalysisError> {
    let ev = JetEvaluator::new(system, point, n_max)?;
    delta_table_with(system, basis, point, n_max, opts, |n| Ok(assemble_with(&prolong(system, n), &ev).matrix), progress)
}

/// As [`delta_table`], with the level-`n` matrix supplied by `matrix` (for caching).
pub fn delta_table_with(
    system: &LinearPdeSystem,
    basis: &TrivialBasis,
    point: &[Rational; 2],
    n_max: u32,
    opts: &TableOptions,
    mut matrix: impl FnMut(u32) -> Result<SparseRationalMatrix, AnalysisError>,
    mut progress: impl FnMut(&DeltaRow, &SparseRationalMatrix),
) -> Result<DeltaTable, AnalysisError> {
    let parity = basis.parity;
    let top = trivial_jet_vectors(basis, system, point, n_max)?;
    let trivial_dim = if top.is_empty() { 0 } else { rank_exact(&SparseRationalMatrix::from_dense(&top)).rank };
    let mut rows = Vec::new();
    let mut zero_run = 0;
    let mut aborted_early = false;
    let mut last_kernel = Vec::new();
    for n in 0..=n_max {
        let a = matrix(n)?;
        let dim = a.ncols();
        // level-n jets are a prefix of the level-n_max jets
        let known: Vec<Vec<Rational>> = top.iter().map(|v| v[..dim].to_vec()).collect();
        if let Some(index) = known.iter().position(|v| !a.mul_vec(v).iter().all(num_traits::Zero::is_zero)) {
            return Err(AnalysisError::TrivialNotInKernel { index, n });
        }
        let cr = certified_rank(&a, &opts.primes, &known, opts.method, opts.lift_steps)?;
        let rank = cr.result.rank;
        let row = DeltaRow {
            n,
            num_equations: a.nrows(),
            dim_u: dim,
            rank,
            delta: dim as i64 - rank as i64 - trivial_dim as i64,
            certified: cr.result.certified_exact,
            rank_detail: cr.result,
            trivial_in_kernel: true,
        };
        progress(&row, &a);
        let zero = row.delta == 0 && row.certified;
        rows.push(row);
        last_kernel = cr.kernel;
        zero_run = if zero { zero_run + 1 } else { 0 };
        if opts.early_abort && zero_run > opts.confirm_levels && n < n_max {
            aborted_early = true;
            break;
        }
    }
    Ok(DeltaTable { parity, trivial_dim, rows, aborted_early, last_kernel })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub n: u32,
    /// Rows with nonzero top-order part.
    pub symbol_rows: usize,
    /// Pairwise non-proportional rows among those.
    pub distinct_rows: usize,
    pub dim_v: usize,
    pub symbol_rank: usize,
    pub symbol_delta: i64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTypeReport {
    pub parity: Parity,
    pub rows: Vec<SymbolRow>,
    pub ell: Option<u32>,
}

/// Symbol ranks for `n = 0..=n_max`; `ell` is the first level with certified symbol Δ = 0.
pub fn finite_type_level(system: &LinearPdeSystem, parity: Parity, point: &[Rational; 2], n_max: u32, opts: &TableOptions) -> Result<FiniteTypeReport, AnalysisError> {
    let mut rows = Vec::new();
    let mut ell = None;
    for n in 0..=n_max {
        let sm = symbol_assemble(system, n, point)?;
        let cr = certified_rank(&sm.matrix, &opts.primes, &[], opts.method, opts.lift_steps)?;
        let dim_v = sm.matrix.ncols();
        let row = SymbolRow {
            n,
            symbol_rows: sm.matrix.nrows(),
            distinct_rows: sm.distinct_rows,
            dim_v,
            symbol_rank: cr.result.rank,
            symbol_delta: dim_v as i64 - cr.result.rank as i64,
            certified: cr.result.certified_exact,
        };
        if ell.is_none() && row.symbol_delta == 0 && row.certified {
            ell = Some(n);
        }
        rows.push(row);
    }
    Ok(FiniteTypeReport { parity, rows, ell })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    NoNontrivialIntegral,
    Inconclusive,
    /// Kernel beyond the trivial integrals at one point; candidates only, existence not concluded.
    CandidateKernel {
        /// Full kernel dimension at the last level.
        dimension: usize,
        /// Excess over the trivial integrals.
        excess: usize,
        /// Exact kernel vectors (integer entries as strings), at most a few.
        samples: Vec<Vec<String>>,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::NoNontrivialIntegral => "NoNontrivialIntegral",
            Outcome::Inconclusive => "Inconclusive",
            Outcome::CandidateKernel { .. } => "CandidateKernel",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub point: [String; 2],
    pub n: Option<u32>,
    pub ell: Option<u32>,
    pub rank: Option<usize>,
    pub dim_u: Option<usize>,
    pub delta: Option<i64>,
    pub certified: bool,
    pub certificate: Option<Certificate>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub justification: Justification,
}

/// Maximum number of kernel vectors attached to a candidate verdict.
pub const MAX_SAMPLES: usize = 4;

pub fn verdict(table: &DeltaTable, ftype: &FiniteTypeReport, point: &[Rational; 2]) -> Verdict {
    let pt = [format_rational(&point[0]), format_rational(&point[1])];
    let mk = |outcome, row: Option<&DeltaRow>, reason: String| Verdict {
        outcome,
        justification: Justification {
            point: pt.clone(),
            n: row.map(|r| r.n),
            ell: ftype.ell,
            rank: row.map(|r| r.rank),
            dim_u: row.map(|r| r.dim_u),
            delta: row.map(|r| r.delta),
            certified: row.is_some_and(|r| r.certified),
            certificate: row.and_then(|r| r.rank_detail.certificate.clone()),
            reason,
        },
    };
    let Some(ell) = ftype.ell else {
        return mk(Outcome::Inconclusive, table.rows.last(), "symbol never reached full rank within the computed levels".into());
    };
    let beyond: Vec<&DeltaRow> = table.rows.iter().filter(|r| r.n >= ell).collect();
    if let Some(r) = beyond.iter().find(|r| r.delta == 0 && r.certified) {
        return mk(
            Outcome::NoNontrivialIntegral,
            Some(r),
            format!("certified Δ = 0 at n = {} ≥ ℓ = {}: every solution jet is a trivial one", r.n, ell),
        );
    }
    if let Some(r) = beyond.iter().find(|r| r.delta == 0) {
        return mk(Outcome::Inconclusive, Some(r), format!("Δ = 0 at n = {} but the rank is not certified", r.n));
    }
    if beyond.len() >= 2 {
        let (p, l) = (beyond[beyond.len() - 2], beyond[beyond.len() - 1]);
        if p.delta == l.delta && l.delta > 0 && p.certified && l.certified {
            let samples = table
                .last_kernel
                .iter()
                .take(MAX_SAMPLES)
                .map(|v| v.iter().map(format_rational).collect())
                .collect();
            return mk(
                Outcome::CandidateKernel { dimension: l.dim_u - l.rank, excess: l.delta as usize, samples },
                Some(l),
                format!(
                    "Δ stabilised at {} for n = {}, {} ≥ ℓ = {}; pointwise evidence only, existence is not concluded",
                    l.delta, p.n, l.n, ell
                ),
            );
        }
    }
    mk(
        Outcome::Inconclusive,
        table.rows.last(),
        format!("Δ neither vanished nor stabilised over two certified levels at or beyond ℓ = {}", ell),
    )
}

/// Number of jets of the ansatz unknowns at level `n` (re-exported for report layout).
pub fn dim_u(num_unknowns: usize, n: u32) -> usize {
    jet_dimension(num_unknowns, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};

    fn ham(d: u32) -> Hamiltonian {
        Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: d })).unwrap()
    }

    #[test]
    fn generator_counts() {
        let h = ham(2);
        assert_eq!(trivial_basis_for(&h, 6, Parity::Even).generators.len(), 16);
        assert_eq!(trivial_basis_for(&h, 6, Parity::Odd).generators.len(), 0);
        let b2 = trivial_basis_for(&h, 2, Parity::Even);
        assert_eq!(b2.exponents, vec![(1, 0, 0), (0, 2, 0), (0, 1, 1), (0, 0, 2)]);
        assert_eq!(trivial_basis_for(&h, 3, Parity::Odd).generators.len(), 6);
    }

    #[test]
    fn generators_commute_with_h() {
        let h = ham(2);
        for g in trivial_basis_for(&h, 4, Parity::Even).generators {
            assert!(MomentumPolynomial::poisson_bracket(&h.poly, &g).is_zero());
        }
    }
}
