//! Prolong the system, assemble the numeric matrix at a point and export it as triplets.

use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};
use integrability::pde::{poisson_bracket_system, split_parity};
use integrability::prolongation::{assemble, prolong, symbol_assemble};
use integrability::ratexpr::{int, ratio};

fn main() {
    let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: 2 })).unwrap();
    let (_, even) = split_parity(&poisson_bracket_system(&h, 2).unwrap()).unwrap();
    let point = [ratio(1, 2), int(2)];
    for n in 0..=3 {
        let ps = prolong(&even, n);
        let a = assemble(&ps, &point).unwrap();
        let b = symbol_assemble(&even, n, &point).unwrap();
        println!(
            "n = {}: A is {}x{} with {} nonzeros; symbol has {} nonzero rows ({} distinct) over {} columns",
            n,
            a.matrix.nrows(),
            a.matrix.ncols(),
            a.matrix.nnz(),
            b.matrix.nrows() - b.zero_rows,
            b.distinct_rows,
            b.matrix.ncols()
        );
    }
    let a = assemble(&prolong(&even, 0), &point).unwrap();
    println!("\nfirst lines of the n = 0 triplet export:");
    for line in a.to_triplets().lines().take(6) {
        println!("  {}", line);
    }
    match assemble(&prolong(&even, 0), &[int(1), int(0)]) {
        Ok(_) => println!("unexpected success on the horizon"),
        Err(e) => println!("\n{}", e),
    }
}
