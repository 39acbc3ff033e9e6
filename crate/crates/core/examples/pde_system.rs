//! The linear PDE system {H, F} = 0 for a degree-d momentum polynomial F, split by parity.

use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};
use integrability::pde::{poisson_bracket_system, split_parity};

fn main() {
    let degree: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: 2 })).unwrap();
    let sys = poisson_bracket_system(&h, degree).unwrap();
    println!("degree {}: {} unknowns, {} equations", degree, sys.unknowns.len(), sys.equations.len());
    let (odd, even) = split_parity(&sys).unwrap();
    println!("odd part:  {} unknowns, {} equations", odd.unknowns.len(), odd.equations.len());
    println!("even part: {} unknowns, {} equations", even.unknowns.len(), even.equations.len());
    if degree <= 2 {
        let names = ["p_x", "p_y", "p_phi", "p_t"].map(String::from);
        println!("\n{}", even.dump(&names));
    }
}
