//! Floating-point geodesic integration as a wiring check of Hamilton's equations (non-rigorous).

use integrability::cli::geodesic::{default_initial_state, geodesic_sanity, PhaseState};
use integrability::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};

fn main() {
    let steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    for delta in [0, 1, 2] {
        let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta })).unwrap();
        let r = geodesic_sanity(&h, default_initial_state(), steps, 1e-3).unwrap();
        println!(
            "delta {}: {} steps, H drift {:.2e}, p_phi drift {}, p_t drift {}, final (x, y) = ({:.3}, {:.3})",
            delta, r.steps, r.drift_h, r.drift_p_cyclic1, r.drift_p_cyclic2, r.final_state.q[0], r.final_state.q[1]
        );
    }
    let h = Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: 2 })).unwrap();
    let plunge = PhaseState { q: [3.0, 0.0, 0.0, 0.0], p: [-2.0, 0.0, 0.0, -1.0] };
    println!("plunging orbit: {:?}", geodesic_sanity(&h, plunge, steps, 1e-3).unwrap_err());
}
