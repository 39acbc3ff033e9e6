//! Build the geodesic Hamiltonian from the built-in family and from a metric definition file.

use std::path::Path;

use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, MetricSpec, ZipoyVoorheesParams};
use integrability::ratexpr::{int, ratio};

fn main() {
    for delta in [0, 1, 2] {
        let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta })).unwrap();
        println!("delta = {}:\n  H = {}", delta, h);
        println!("  singular set: {}", h.singular_locus.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "));
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/schwarzschild_prolate.metric");
    let file = Hamiltonian::from_metric(&MetricSpec::from_file(&path).unwrap()).unwrap();
    let builtin = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: 1 })).unwrap();
    println!("metric file agrees with delta = 1: {}", file.poly == builtin.poly);

    for pt in [[ratio(1, 2), int(2)], [int(1), int(0)]] {
        match file.check_point(&pt) {
            Ok(()) => println!("({}, {}) is regular", pt[0], pt[1]),
            Err(e) => println!("({}, {}): {}", pt[0], pt[1], e),
        }
    }
}
