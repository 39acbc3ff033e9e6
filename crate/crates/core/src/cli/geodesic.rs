//! Floating-point integration of Hamilton's equations as a wiring check. Non-rigorous.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::Hamiltonian;
use crate::momentum::MomentumExponents;
use crate::ratexpr::RationalFunction;

#[derive(Debug, Error, PartialEq)]
pub enum GeodesicError {
    #[error("trajectory reached the singular set of {polynomial} at step {step}")]
    Singular { step: usize, polynomial: String },
}

/// Phase-space state: coordinates and momenta in momentum-slot order
/// `(base1, base2, cyclic1, cyclic2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: [f64; 4],
    pub p: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub label: String,
    pub steps: usize,
    pub step_size: f64,
    /// Max relative drift of `H` (absolute when `H` starts at zero).
    pub drift_h: f64,
    pub drift_p_cyclic1: f64,
    pub drift_p_cyclic2: f64,
    pub final_state: PhaseState,
}

struct Term {
    e: MomentumExponents,
    c: RationalFunction,
    dc: [RationalFunction; 2],
}

/// `H`, `dH/dq`, `dH/dp` evaluated in floating point.
struct Flow {
    terms: Vec<Term>,
    guards: Vec<(String, crate::ratexpr::Polynomial)>,
}

impl Flow {
    fn new(h: &Hamiltonian) -> Self {
        let terms = h
            .poly
            .terms()
            .map(|(e, c)| Term { e: *e, c: c.clone(), dc: [c.derivative(0), c.derivative(1)] })
            .collect();
        let mut guards: Vec<(String, crate::ratexpr::Polynomial)> =
            h.singular_locus.iter().map(|p| (p.to_string(), p.clone())).collect();
        for (_, c) in h.poly.terms() {
            if !c.denom().is_constant() {
                guards.push((c.denom().to_string(), c.denom().clone()));
            }
        }
        Flow { terms, guards }
    }

    fn mono(p: &[f64; 4], e: &MomentumExponents, skip: Option<usize>) -> f64 {
        let mut m = 1.0;
        for s in 0..4 {
            let k = if Some(s) == skip { e[s] - 1 } else { e[s] };
            m *= p[s].powi(k as i32);
        }
        m
    }

    fn energy(&self, st: &PhaseState) -> f64 {
        let q = [st.q[0], st.q[1]];
        self.terms.iter().map(|t| t.c.evaluate_f64(&q) * Self::mono(&st.p, &t.e, None)).sum()
    }

    /// Time derivative of the state. Cyclic momenta have zero right-hand side by construction.
    fn rhs(&self, st: &PhaseState) -> PhaseState {
        let q = [st.q[0], st.q[1]];
        let mut dq = [0.0; 4];
        let mut dp = [0.0; 4];
        for t in &self.terms {
            let c = t.c.evaluate_f64(&q);
            for s in 0..4 {
                if t.e[s] > 0 {
                    dq[s] += c * t.e[s] as f64 * Self::mono(&st.p, &t.e, Some(s));
                }
            }
            let m = Self::mono(&st.p, &t.e, None);
            for v in 0..2 {
                dp[v] -= t.dc[v].evaluate_f64(&q) * m;
            }
        }
        PhaseState { q: dq, p: dp }
    }

    fn signs(&self, st: &PhaseState) -> Vec<f64> {
        let q = [st.q[0], st.q[1]];
        self.guards.iter().map(|(_, p)| p.evaluate_f64(&q)).collect()
    }
}

fn axpy(a: &PhaseState, h: f64, k: &PhaseState) -> PhaseState {
    let mut out = *a;
    for i in 0..4 {
        out.q[i] += h * k.q[i];
        out.p[i] += h * k.p[i];
    }
    out
}

/// Integrate with classical fourth-order Runge-Kutta and report conservation drifts.
pub fn geodesic_sanity(h: &Hamiltonian, initial: PhaseState, steps: usize, step_size: f64) -> Result<GeodesicReport, GeodesicError> {
    let flow = Flow::new(h);
    let h0 = flow.energy(&initial);
    let s0 = flow.signs(&initial);
    let check = |st: &PhaseState, step: usize| -> Result<(), GeodesicError> {
        for ((name, _), (now, then)) in flow.guards.iter().zip(flow.signs(st).iter().zip(&s0)) {
            if !now.is_finite() || now.abs() < 1e-12 || now.signum() != then.signum() {
                return Err(GeodesicError::Singular { step, polynomial: name.clone() });
            }
        }
        Ok(())
    };
    check(&initial, 0)?;
    let mut st = initial;
    let mut drift_h: f64 = 0.0;
    let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
    for step in 1..=steps {
        let k1 = flow.rhs(&st);
        let k2 = flow.rhs(&axpy(&st, step_size / 2.0, &k1));
        let k3 = flow.rhs(&axpy(&st, step_size / 2.0, &k2));
        let k4 = flow.rhs(&axpy(&st, step_size, &k3));
        for i in 0..4 {
            st.q[i] += step_size / 6.0 * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
            st.p[i] += step_size / 6.0 * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
        }
        check(&st, step)?;
        drift_h = drift_h.max((flow.energy(&st) - h0).abs() / scale);
    }
    Ok(GeodesicReport {
        label: "non-rigorous floating-point check".into(),
        steps,
        step_size,
        drift_h,
        drift_p_cyclic1: (st.p[2] - initial.p[2]).abs(),
        drift_p_cyclic2: (st.p[3] - initial.p[3]).abs(),
        final_state: st,
    })
}

/// Default initial state for the built-in family: an orbit that stays well away from the
/// horizon and the axis for 10^5 steps of 10^-3 at delta = 0, 1, 2.
pub fn default_initial_state() -> PhaseState {
    PhaseState { q: [10.0, 0.1, 0.0, 0.0], p: [0.0, 0.2, 8.0, -0.95] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_zipoy_voorhees, ZipoyVoorheesParams};

    fn ham(d: u32) -> Hamiltonian {
        Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: d })).unwrap()
    }

    #[test]
    fn stationary_when_momentum_vanishes() {
        let init = PhaseState { q: [3.0, 0.5, 0.0, 0.0], p: [0.0; 4] };
        let r = geodesic_sanity(&ham(2), init, 100, 1e-2).unwrap();
        assert_eq!(r.final_state, init);
        assert_eq!(r.drift_h, 0.0);
    }

    #[test]
    fn flat_space_conserves_energy() {
        let r = geodesic_sanity(&ham(0), default_initial_state(), 2000, 1e-3).unwrap();
        assert!(r.drift_h < 1e-8, "{}", r.drift_h);
    }

    #[test]
    fn hitting_the_axis_is_reported() {
        let init = PhaseState { q: [3.0, 0.999, 0.0, 0.0], p: [0.0, 5.0, 0.0, -1.0] };
        let err = geodesic_sanity(&ham(0), init, 10_000, 1e-3).unwrap_err();
        assert!(matches!(err, GeodesicError::Singular { .. }));
    }
}
