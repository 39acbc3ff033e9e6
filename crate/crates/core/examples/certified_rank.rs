//! Modular rank with an exact certificate, compared against fraction-free exact elimination.

use std::time::Instant;

use integrability::analysis::{trivial_basis_for, trivial_jet_vectors};
use integrability::exactla::{certified_rank, random_primes, rank_exact, rank_modular, RankMethod, SparseRationalMatrix};
use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};
use integrability::pde::{poisson_bracket_system, split_parity, Parity};
use integrability::prolongation::{assemble, prolong};
use integrability::ratexpr::{int, ratio};

fn main() {
    let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: 2 })).unwrap();
    let (_, even) = split_parity(&poisson_bracket_system(&h, 6).unwrap()).unwrap();
    let point = [ratio(1, 2), int(2)];
    let n = 4;
    let a = assemble(&prolong(&even, n), &point).unwrap().matrix;
    let primes = random_primes(2, 7);

    let t = Instant::now();
    let m = rank_modular(&a, &primes).unwrap();
    println!("modular rank {} (per prime {:?}) in {:.2?}", m.rank, m.modular_ranks, t.elapsed());

    let known = trivial_jet_vectors(&trivial_basis_for(&h, 6, Parity::Even), &even, &point, n).unwrap();
    let t = Instant::now();
    let c = certified_rank(&a, &primes, &known, RankMethod::Modular, 600).unwrap();
    println!("certified rank {} via {:?} in {:.2?}", c.result.rank, c.result.certificate, t.elapsed());

    let t = Instant::now();
    println!("exact rank {} in {:.2?}", rank_exact(&a).rank, t.elapsed());

    // A prime dividing a pivot drops the modular rank; the certificate step notices.
    let p = primes[0] as i64;
    let bad = SparseRationalMatrix::from_dense(&[vec![int(2), int(0)], vec![int(0), int(p)]]);
    let r = certified_rank(&bad, &[primes[0]], &[], RankMethod::Modular, 600).unwrap();
    println!("unlucky prime: rank {} certified {}", r.result.rank, r.result.certified_exact);
}
