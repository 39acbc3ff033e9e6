//! Symbol ranks and the finite-type level ℓ (the symbol is that of flat space for every member).

use integrability::analysis::{finite_type_level, TableOptions};
use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};
use integrability::pde::{poisson_bracket_system, split_parity, Parity};
use integrability::ratexpr::{int, ratio};

fn main() {
    let degree = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let point = [ratio(1, 2), int(2)];
    for delta in [0, 2] {
        let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta })).unwrap();
        let (odd, even) = split_parity(&poisson_bracket_system(&h, degree).unwrap()).unwrap();
        for (parity, sys) in [(Parity::Odd, &odd), (Parity::Even, &even)] {
            let f = finite_type_level(sys, parity, &point, degree, &TableOptions::default()).unwrap();
            let deltas: Vec<i64> = f.rows.iter().map(|r| r.symbol_delta).collect();
            let distinct: Vec<usize> = f.rows.iter().map(|r| r.distinct_rows).collect();
            println!("delta {} {}: Δ {:?}, distinct rows {:?}, ℓ = {:?}", delta, parity, deltas, distinct, f.ell);
        }
    }
}
