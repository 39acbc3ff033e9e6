//! The Δ table for one parity: `cargo run --release --example delta_table -- <delta> <degree> <odd|even> [n_max]`.

use integrability::analysis::{delta_table, trivial_basis_for, TableOptions};
use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};
use integrability::pde::{poisson_bracket_system, split_parity, Parity};
use integrability::ratexpr::{int, ratio};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let delta = args.first().and_then(|s| s.parse().ok()).unwrap_or(2);
    let degree = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let parity = if args.get(2).map(String::as_str) == Some("odd") { Parity::Odd } else { Parity::Even };
    let n_max = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(degree);

    let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta })).unwrap();
    let (odd, even) = split_parity(&poisson_bracket_system(&h, degree).unwrap()).unwrap();
    let system = if parity == Parity::Odd { odd } else { even };
    let basis = trivial_basis_for(&h, degree, parity);
    let point = [ratio(1, 2), int(2)];
    println!("delta {} degree {} {}: {} trivial generators", delta, degree, parity, basis.generators.len());
    println!("{:>3} {:>8} {:>8} {:>8} {:>6}  certificate", "n", "# eqn", "dim(u)", "rk(A)", "Δ");
    let table = delta_table(&system, &basis, &point, n_max, &TableOptions::default(), |r, _| {
        println!(
            "{:>3} {:>8} {:>8} {:>8} {:>6}  {:?}",
            r.n, r.num_equations, r.dim_u, r.rank, r.delta, r.rank_detail.certificate
        )
    })
    .unwrap();
    if table.aborted_early {
        println!("stopped early: Δ = 0 certified twice in a row");
    }
}
