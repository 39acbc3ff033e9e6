//! Polynomials in the four momenta with rational-function coefficients in the two base coordinates.
//!
//! Momentum slots are always in the order `(p_q1, p_q2, p_c1, p_c2)`: the two non-cyclic
//! coordinates first, then the two cyclic ones. Coefficients never depend on the cyclic
//! coordinates, so only the first two slots carry configuration-space derivatives.

use std::collections::BTreeMap;
use std::fmt;

use crate::ratexpr::{int, RationalFunction, Rational, Vars};

/// Exponents of `(p_q1, p_q2, p_c1, p_c2)`.
pub type MomentumExponents = [u32; 4];

pub fn momentum_degree(e: &MomentumExponents) -> u32 {
    e.iter().sum()
}

/// Graded-lex key (higher total degree last, then lexicographic on the exponent vector).
fn key(e: &MomentumExponents) -> (u32, MomentumExponents) {
    (momentum_degree(e), *e)
}

#[derive(Clone, PartialEq, Eq)]
pub struct MomentumPolynomial {
    vars: Vars,
    terms: BTreeMap<(u32, MomentumExponents), RationalFunction>,
}

impl fmt::Debug for MomentumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, v)| (k.1, v.to_string()))).finish()
    }
}

impl MomentumPolynomial {
    pub fn zero(vars: Vars) -> Self {
        MomentumPolynomial { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: Vars) -> Self {
        Self::monomial(vars.clone(), [0; 4], RationalFunction::one(vars))
    }

    pub fn monomial(vars: Vars, e: MomentumExponents, c: RationalFunction) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(e, c);
        p
    }

    /// The momentum `p_slot` itself.
    pub fn momentum(vars: Vars, slot: usize) -> Self {
        let mut e = [0; 4];
        e[slot] = 1;
        Self::monomial(vars.clone(), e, RationalFunction::one(vars))
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn add_term(&mut self, e: MomentumExponents, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        let k = key(&e);
        let sum = match self.terms.remove(&k) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(k, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order of the exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&MomentumExponents, &RationalFunction)> {
        self.terms.iter().map(|(k, c)| (&k.1, c))
    }

    pub fn coefficient(&self, e: &MomentumExponents) -> Option<&RationalFunction> {
        self.terms.get(&key(e))
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|k| k.0 == degree)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, f) in self.terms() {
            out.add_term(*e, f.scale(c));
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&int(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (ea, ca) in self.terms() {
            for (eb, cb) in o.terms() {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.vars.clone());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to the momentum in `slot`.
    pub fn d_momentum(&self, slot: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in self.terms() {
            if e[slot] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[slot] -= 1;
            out.add_term(e2, c.scale(&int(e[slot] as i64)));
        }
        out
    }

    /// Partial derivative with respect to base coordinate `v` (0 or 1).
    pub fn d_coordinate(&self, v: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in self.terms() {
            out.add_term(*e, c.derivative(v));
        }
        out
    }

    /// Canonical Poisson bracket `{F, G} = sum_i dF/dq_i dG/dp_i - dF/dp_i dG/dq_i`.
    ///
    /// Only the two base coordinates contribute since no coefficient depends on the cyclic ones.
    pub fn poisson_bracket(f: &Self, g: &Self) -> Self {
        let mut out = Self::zero(f.vars.clone());
        for v in 0..2 {
            let a = f.d_coordinate(v).mul(&g.d_momentum(v));
            let b = f.d_momentum(v).mul(&g.d_coordinate(v));
            out = out.add(&a).sub(&b);
        }
        out
    }

    /// Numeric value at a phase-space point (base coordinates and four momenta).
    pub fn evaluate_f64(&self, q: &[f64; 2], p: &[f64; 4]) -> f64 {
        self.terms()
            .map(|(e, c)| {
                let mut m = c.evaluate_f64(q);
                for s in 0..4 {
                    m *= p[s].powi(e[s] as i32);
                }
                m
            })
            .sum()
    }

    pub fn evaluate(&self, q: &[Rational; 2], p: &[Rational; 4]) -> Result<Rational, crate::ratexpr::RatExprError> {
        let mut acc = int(0);
        for (e, c) in self.terms() {
            let mut m = c.evaluate(q)?;
            for s in 0..4 {
                for _ in 0..e[s] {
                    m *= &p[s];
                }
            }
            acc += m;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{parse_rational_function, vars};

    #[test]
    fn bracket_of_momenta_with_free_particle() {
        let v = vars(&["x", "y"]);
        let half = parse_rational_function("1/2", &v).unwrap();
        let mut h = MomentumPolynomial::zero(v.clone());
        h.add_term([2, 0, 0, 0], half.clone());
        h.add_term([0, 2, 0, 0], half);
        // constant-coefficient momenta commute with a flat Hamiltonian
        for s in 0..4 {
            assert!(MomentumPolynomial::poisson_bracket(&h, &MomentumPolynomial::momentum(v.clone(), s)).is_zero());
        }
        // {H, x} = -p_x for H = (p_x^2 + p_y^2)/2
        let x = MomentumPolynomial::monomial(v.clone(), [0; 4], RationalFunction::var(v.clone(), 0));
        let br = MomentumPolynomial::poisson_bracket(&h, &x);
        assert_eq!(br, MomentumPolynomial::momentum(v.clone(), 0).scale(&int(-1)));
    }
}
