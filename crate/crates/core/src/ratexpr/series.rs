//! Truncated bivariate Taylor expansions with exact coefficients.
//!
//! Jet values of a coefficient function at a point are `a! b!` times its Taylor coefficients, so
//! one expansion per coefficient replaces repeated symbolic differentiation during assembly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::ratfun::RationalFunction;
use super::{RatExprError, Rational};

/// Coefficients `c[a][b]` of `X^a Y^b` (with `a + b <= order`) of `f(x0 + X, y0 + Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taylor2 {
    order: usize,
    coeffs: Vec<Rational>,
}

fn idx(a: usize, b: usize) -> usize {
    let k = a + b;
    k * (k + 1) / 2 + b
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl Taylor2 {
    pub fn zero(order: usize) -> Self {
        Taylor2 { order, coeffs: vec![Rational::zero(); idx(0, order + 1)] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, a: usize, b: usize) -> &Rational {
        assert!(a + b <= self.order, "Taylor coefficient beyond truncation order");
        &self.coeffs[idx(a, b)]
    }

    /// Value of the partial derivative `d^a/dx^a d^b/dy^b` at the expansion point.
    pub fn derivative_value(&self, a: usize, b: usize) -> Rational {
        let c = self.coeff(a, b);
        if c.is_zero() {
            return c.clone();
        }
        c * Rational::from_integer(factorial(a) * factorial(b))
    }

    /// Expansion of a bivariate polynomial.
    pub fn of_polynomial(p: &Polynomial, point: &[Rational; 2], order: usize) -> Self {
        assert_eq!(p.nvars(), 2, "Taylor2 expands bivariate polynomials");
        let dx = p.degree_in(0) as usize;
        let dy = p.degree_in(1) as usize;
        let binom = binomials(dx.max(dy));
        let pw = |x: &Rational, d: usize| {
            let mut v = vec![Rational::one()];
            for k in 1..=d {
                let n = &v[k - 1] * x;
                v.push(n);
            }
            v
        };
        let px = pw(&point[0], dx);
        let py = pw(&point[1], dy);
        let mut out = Self::zero(order);
        for (m, c) in p.terms() {
            let (a, b) = (m.0[0] as usize, m.0[1] as usize);
            // (x0 + X)^a (y0 + Y)^b = sum C(a,i) C(b,j) x0^(a-i) y0^(b-j) X^i Y^j
            for i in 0..=a.min(order) {
                let xi = c * &px[a - i] * Rational::from_integer(binom[a][i].clone());
                if xi.is_zero() {
                    continue;
                }
                for j in 0..=b.min(order - i) {
                    let t = &xi * &py[b - j] * Rational::from_integer(binom[b][j].clone());
                    out.coeffs[idx(i, j)] += t;
                }
            }
        }
        out
    }

    /// Expansion of a rational function regular at the point.
    pub fn of_rational_function(
        f: &RationalFunction,
        point: &[Rational; 2],
        order: usize,
    ) -> Result<Self, RatExprError> {
        let num = Self::of_polynomial(f.numer(), point, order);
        if f.denom().is_one() {
            return Ok(num);
        }
        let den = Self::of_polynomial(f.denom(), point, order);
        num.div(&den)
            .ok_or_else(|| RatExprError::DenominatorVanishes { denominator: f.denom().to_string() })
    }

    /// Series quotient, or `None` if the divisor vanishes at the point.
    pub fn div(&self, d: &Taylor2) -> Option<Taylor2> {
        let order = self.order.min(d.order);
        let d0 = d.coeff(0, 0);
        if d0.is_zero() {
            return None;
        }
        let inv0 = d0.recip();
        let mut s = Self::zero(order);
        for k in 0..=order {
            for b in 0..=k {
                let a = k - b;
                let mut acc = self.coeff(a, b).clone();
                for i in 0..=a {
                    for j in 0..=b {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        let dij = d.coeff(i, j);
                        if dij.is_zero() {
                            continue;
                        }
                        acc -= dij * &s.coeffs[idx(a - i, b - j)];
                    }
                }
                s.coeffs[idx(a, b)] = acc * &inv0;
            }
        }
        Some(s)
    }

    pub fn mul(&self, o: &Taylor2) -> Taylor2 {
        let order = self.order.min(o.order);
        let mut s = Self::zero(order);
        for k in 0..=order {
            for b in 0..=k {
                let a = k - b;
                let sa = self.coeff(a, b);
                if sa.is_zero() {
                    continue;
                }
                for k2 in 0..=(order - k) {
                    for j in 0..=k2 {
                        let i = k2 - j;
                        let ob = o.coeff(i, j);
                        if !ob.is_zero() {
                            s.coeffs[idx(a + i, b + j)] += sa * ob;
                        }
                    }
                }
            }
        }
        s
    }
}

fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::one()]];
    for i in 1..=n {
        let prev = &t[i - 1];
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &prev[j - 1] + &prev[j];
        }
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{int, parse_rational_function, ratio, vars};

    #[test]
    fn matches_symbolic_derivatives() {
        let v = vars(&["x", "y"]);
        let f = parse_rational_function("(x^2 - y)/(x*y + 3) + 1/(x - y)", &v).unwrap();
        let pt = [ratio(1, 2), int(2)];
        let s = Taylor2::of_rational_function(&f, &pt, 4).unwrap();
        let mut g = f.clone();
        for a in 0..=2 {
            let mut h = g.clone();
            for b in 0..=2 {
                assert_eq!(s.derivative_value(a, b), h.evaluate(&pt).unwrap(), "a={} b={}", a, b);
                h = h.derivative(1);
            }
            g = g.derivative(0);
        }
    }

    #[test]
    fn product_rule() {
        let v = vars(&["x", "y"]);
        let f = parse_rational_function("1/(x+y+1)", &v).unwrap();
        let g = parse_rational_function("x^3 - y", &v).unwrap();
        let pt = [int(1), ratio(-1, 3)];
        let sf = Taylor2::of_rational_function(&f, &pt, 5).unwrap();
        let sg = Taylor2::of_rational_function(&g, &pt, 5).unwrap();
        let sfg = Taylor2::of_rational_function(&(&f * &g), &pt, 5).unwrap();
        assert_eq!(sf.mul(&sg), sfg);
    }

    #[test]
    fn pole_detected() {
        let v = vars(&["x", "y"]);
        let f = parse_rational_function("1/(x-1)", &v).unwrap();
        assert!(Taylor2::of_rational_function(&f, &[int(1), int(0)], 2).is_err());
    }
}
