//! Exact rank and kernel computations for sparse rational matrices.
//!
//! Two paths: integer-preserving elimination over the rationals, and elimination modulo random
//! 60-bit primes. A modular rank is promoted to an exact one only by the kernel certificate:
//! if `rank mod p = cols - d` and `d` independent vectors are verified to satisfy `m v = 0` over
//! the rationals, the rational rank is exactly `cols - d` (modular rank never exceeds it).

mod dixon;
mod exact;
pub mod modp;
mod sparse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_bigint::BigInt;
use num_traits::Zero;

pub use dixon::{lift_kernel, rational_reconstruct};
pub use exact::{kernel_exact, primitive_integer_vector};
pub use modp::{is_prime_u64, random_primes, EchelonModP, MontgomeryField};
pub use sparse::SparseRationalMatrix;

use crate::ratexpr::Rational;

/// Seed for the default prime draw; reports stay reproducible run to run.
pub const DEFAULT_PRIME_SEED: u64 = 0x1d_2e_3f_40;

/// Default number of Dixon lifting steps before giving up on a kernel reconstruction.
pub const DEFAULT_LIFT_STEPS: usize = 600;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("triplet format error on line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("modulus {0} is not an odd prime above 2^16")]
    InvalidPrime(u64),
    #[error("every candidate prime divides some denominator")]
    AllPrimesDivideDenominators,
    #[error("no primes supplied")]
    NoPrimes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    #[serde(rename = "exact")]
    Bareiss,
    Modular,
    Both,
}

impl std::str::FromStr for RankMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" | "bareiss" => Ok(RankMethod::Bareiss),
            "modular" => Ok(RankMethod::Modular),
            "both" => Ok(RankMethod::Both),
            other => Err(format!("unknown rank method `{}` (expected exact, modular or both)", other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub method: RankMethod,
    /// Primes used by the modular path (empty for the exact path).
    pub primes_used: Vec<u64>,
    /// Rank modulo each prime, in `primes_used` order.
    pub modular_ranks: Vec<usize>,
    pub certified_exact: bool,
    /// How the certificate was obtained, when the modular path is certified.
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Exact elimination over the rationals.
    ExactElimination,
    /// Modular rank already equals `min(rows, cols)`.
    FullRank,
    /// `cols - rank` independent kernel vectors verified exactly.
    KernelVectors { count: usize, supplied: usize, lifted: usize },
}

/// Exact rank by fraction-free elimination.
pub fn rank_exact(m: &SparseRationalMatrix) -> RankResult {
    RankResult {
        rank: exact::rank_exact(m),
        method: RankMethod::Bareiss,
        primes_used: Vec::new(),
        modular_ranks: Vec::new(),
        certified_exact: true,
        certificate: Some(Certificate::ExactElimination),
    }
}

fn check_primes(primes: &[u64]) -> Result<(), LinAlgError> {
    if primes.is_empty() {
        return Err(LinAlgError::NoPrimes);
    }
    for &p in primes {
        if p <= 1 << 16 || p >= 1 << 63 || !is_prime_u64(p) {
            return Err(LinAlgError::InvalidPrime(p));
        }
    }
    Ok(())
}

/// Echelon form of `m` reduced modulo `p`, or `None` if `p` divides a denominator.
pub fn echelon_mod_p(m: &SparseRationalMatrix, p: u64) -> Option<EchelonModP> {
    let field = MontgomeryField::new(p);
    let cols = m.ncols();
    let pb = BigInt::from(p);
    let mut ech = EchelonModP::new(field, cols);
    for (i, r) in m.rows().enumerate() {
        if r.is_empty() {
            continue;
        }
        let mut dense = vec![0u64; cols];
        for (c, v) in r {
            let d = field.from_bigint(v.denom());
            if d == 0 {
                debug_assert!((v.denom() % &pb).is_zero());
                return None;
            }
            dense[*c] = field.mul(field.from_bigint(v.numer()), field.inv(d));
        }
        ech.insert(dense, i);
        if ech.rank() == cols {
            break;
        }
    }
    Some(ech)
}

fn modular_echelons(m: &SparseRationalMatrix, primes: &[u64]) -> Result<(Vec<u64>, Vec<EchelonModP>), LinAlgError> {
    check_primes(primes)?;
    let found: Vec<(u64, EchelonModP)> =
        primes.par_iter().filter_map(|&p| echelon_mod_p(m, p).map(|e| (p, e))).collect();
    if found.is_empty() {
        return Err(LinAlgError::AllPrimesDivideDenominators);
    }
    Ok(found.into_iter().unzip())
}

/// Rank modulo each usable prime (concurrently); reports the maximum. Primes dividing a
/// denominator are skipped. Certified only when the modular rank is already `min(rows, cols)`;
/// use [`certified_rank`] for the kernel certificate.
pub fn rank_modular(m: &SparseRationalMatrix, primes: &[u64]) -> Result<RankResult, LinAlgError> {
    let (used, echelons) = modular_echelons(m, primes)?;
    let ranks: Vec<usize> = echelons.iter().map(|e| e.rank()).collect();
    let rank = *ranks.iter().max().unwrap();
    let full = rank == m.nrows().min(m.ncols());
    Ok(RankResult {
        rank,
        method: RankMethod::Modular,
        primes_used: used,
        modular_ranks: ranks,
        certified_exact: full,
        certificate: full.then_some(Certificate::FullRank),
    })
}

/// A rank together with every exactly verified kernel vector found along the way.
#[derive(Clone, Debug)]
pub struct CertifiedRank {
    pub result: RankResult,
    pub kernel: Vec<Vec<Rational>>,
}

fn verifies(rows: &[Vec<(usize, BigInt)>], v: &[Rational]) -> bool {
    rows.iter().all(|r| r.iter().fold(Rational::zero(), |acc, (c, a)| acc + &v[*c] * a).is_zero())
}

/// Rank with the kernel certificate.
///
/// `known` vectors (for example jets of known solutions) are verified exactly and used first;
/// if they do not fill the modular kernel, the remaining kernel is reconstructed by p-adic
/// lifting and verified. Without success the result is reported uncertified.
pub fn certified_rank(
    m: &SparseRationalMatrix,
    primes: &[u64],
    known: &[Vec<Rational>],
    method: RankMethod,
    lift_steps: usize,
) -> Result<CertifiedRank, LinAlgError> {
    if method == RankMethod::Bareiss {
        return Ok(CertifiedRank { result: rank_exact(m), kernel: Vec::new() });
    }
    let (used, echelons) = modular_echelons(m, primes)?;
    let rows = m.integer_rows();
    let cols = m.ncols();
    let ranks: Vec<usize> = echelons.iter().map(|e| e.rank()).collect();
    let rank = *ranks.iter().max().unwrap();
    let d = cols - rank;
    let mut result = RankResult {
        rank,
        method,
        primes_used: used,
        modular_ranks: ranks.clone(),
        certified_exact: false,
        certificate: None,
    };
    let mut kernel = Vec::new();
    if rank == m.nrows().min(cols) {
        result.certified_exact = true;
        result.certificate = Some(Certificate::FullRank);
    } else {
        let verified: Vec<Vec<Rational>> = known.iter().filter(|v| v.len() == cols && verifies(&rows, v)).cloned().collect();
        let known_rank = if verified.is_empty() {
            0
        } else {
            exact::rank_exact(&SparseRationalMatrix::from_dense(&verified))
        };
        if known_rank >= d {
            result.certified_exact = true;
            result.certificate = Some(Certificate::KernelVectors { count: d, supplied: known_rank, lifted: 0 });
            kernel = verified;
        } else {
            for ech in echelons.iter().filter(|e| e.rank() == rank) {
                if let Some(vecs) = lift_kernel(&rows, ech, lift_steps) {
                    result.certified_exact = true;
                    result.certificate = Some(Certificate::KernelVectors { count: d, supplied: 0, lifted: vecs.len() });
                    kernel = vecs.into_iter().map(|v| v.into_iter().map(Rational::from_integer).collect()).collect();
                    break;
                }
            }
        }
    }
    if method == RankMethod::Both {
        let ex = exact::rank_exact(m);
        result.rank = ex;
        result.certified_exact = true;
        result.certificate = Some(Certificate::ExactElimination);
    }
    Ok(CertifiedRank { result, kernel })
}

/// Exact basis of the right null space, each vector scaled to primitive integers.
///
/// Tries modular elimination plus lifting (verified exactly); falls back to rational elimination.
pub fn kernel_basis(m: &SparseRationalMatrix) -> Vec<Vec<Rational>> {
    let rows = m.integer_rows();
    for p in random_primes(2, DEFAULT_PRIME_SEED) {
        if let Some(vecs) = echelon_mod_p(m, p).and_then(|ech| lift_kernel(&rows, &ech, DEFAULT_LIFT_STEPS)) {
            return vecs.into_iter().map(|v| v.into_iter().map(Rational::from_integer).collect()).collect();
        }
    }
    kernel_exact(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::int;

    fn m(d: &[&[i64]]) -> SparseRationalMatrix {
        SparseRationalMatrix::from_dense(&d.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn identity_and_small() {
        let id = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(rank_exact(&id).rank, 3);
        assert_eq!(rank_modular(&id, &random_primes(2, 1)).unwrap().rank, 3);
        assert!(kernel_basis(&id).is_empty());
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, vec![vec![int(1), int(-1)]]);
    }

    #[test]
    fn unlucky_prime_lowers_rank() {
        let p: u64 = 1_000_000_007;
        let a = m(&[&[2, 0], &[0, p as i64]]);
        let r = rank_modular(&a, &[p]).unwrap();
        assert_eq!(r.rank, 1);
        assert!(!r.certified_exact);
        assert_eq!(rank_exact(&a).rank, 2);
        // the certificate cannot be produced from the unlucky prime
        let c = certified_rank(&a, &[p], &[], RankMethod::Modular, 50).unwrap();
        assert!(!c.result.certified_exact);
    }

    #[test]
    fn certificate_with_lifting() {
        let a = m(&[&[1, 2, 3, 4, 5], &[2, 4, 6, 8, 10], &[1, -1, 0, 2, 7], &[0, 3, 3, 2, -2]]);
        let c = certified_rank(&a, &random_primes(2, 3), &[], RankMethod::Modular, 50).unwrap();
        assert!(c.result.certified_exact);
        assert_eq!(c.result.rank, rank_exact(&a).rank);
        assert_eq!(c.kernel.len(), 5 - c.result.rank);
        for v in &c.kernel {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn bad_primes_rejected() {
        let a = m(&[&[1]]);
        assert!(matches!(rank_modular(&a, &[65521]), Err(LinAlgError::InvalidPrime(65521))));
        assert!(matches!(rank_modular(&a, &[]), Err(LinAlgError::NoPrimes)));
    }
}
