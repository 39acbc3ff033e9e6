//! Sparse multivariate polynomials over the rationals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Exponent vector, ordered graded-lexicographically (first variable most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shared, ordered list of variable names.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// A polynomial in a fixed, ordered set of variables with rational coefficients.
///
/// Terms are kept in a map keyed by grlex-ordered monomials; zero coefficients are never stored,
/// so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

impl Polynomial {
    pub fn zero(vars: Vars) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn from_int(vars: Vars, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    /// The polynomial consisting of the single variable with index `idx`.
    pub fn var(vars: Vars, idx: usize) -> Self {
        assert!(idx < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial(e), Rational::one());
        p
    }

    pub fn from_terms<I>(vars: Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().map(|(m, c)| m.degree() == 0 && c.is_one()) == Some(true)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Constant term (coefficient of the unit monomial).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.nvars()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Variables (by index) that actually occur.
    pub fn occurring_vars(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.vars.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[v];
            if k == 0 {
                continue;
            }
            let mut e = m.clone();
            e.0[v] -= 1;
            out.terms
                .insert(e, c * Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point dimension mismatch");
        // Power tables avoid recomputing x^k per term.
        let maxdeg: Vec<u32> = (0..self.nvars()).map(|v| self.degree_in(v)).collect();
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .zip(&maxdeg)
            .map(|(x, &d)| {
                let mut row = Vec::with_capacity(d as usize + 1);
                row.push(Rational::one());
                for k in 1..=d as usize {
                    let next = &row[k - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t *= &powers[v][k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = super::rational_to_f64(c);
            for (v, &k) in m.0.iter().enumerate() {
                t *= point[v].powi(k as i32);
            }
            acc += t;
        }
        acc
    }

    /// Coefficients with respect to variable `v`; entry `k` multiplies `v^k` and is free of `v`.
    pub fn coefficients_in(&self, v: usize) -> Vec<Polynomial> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(self.vars.clone()); d + 1];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut e = m.clone();
            e.0[v] = 0;
            out[k].terms.insert(e, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(vars: Vars, v: usize, coeffs: &[Polynomial]) -> Self {
        let mut out = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                let mut e = m.clone();
                e.0[v] += k as u32;
                out.add_term(e, a.clone());
            }
        }
        out
    }

    /// Multiply by `v^k`.
    pub fn shift_var(&self, v: usize, k: u32) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.clone();
                    e.0[v] += k;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        if d.terms.len() == 1 {
            let mut q = Self::zero(self.vars.clone());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return None;
                }
                q.terms.insert(m.div(&lm), c / &lc);
            }
            return Some(q);
        }
        let mut rem = self.clone();
        let mut q = Self::zero(self.vars.clone());
        while let Some((rm, rc)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / &lc;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Rational `c` such that `self / c` has coprime integer coefficients and a positive leading
    /// coefficient.
    pub fn rational_content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut c = Rational::new(num_gcd, den_lcm);
        if self.leading_coefficient().is_negative() {
            c = -c;
        }
        c
    }

    /// Integer-primitive associate with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.rational_content();
        if c.is_one() {
            return self.clone();
        }
        self.scale(&c.recip())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coefficient();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Substitute the integer `value` for variable `v` (the variable stays in the list with degree 0).
    pub fn substitute_int(&self, v: usize, value: &BigInt) -> Self {
        let d = self.degree_in(v) as usize;
        let mut pw = Vec::with_capacity(d + 1);
        pw.push(BigInt::one());
        for k in 1..=d {
            let n = &pw[k - 1] * value;
            pw.push(n);
        }
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut e = m.clone();
            e.0[v] = 0;
            let t = if k == 0 { c.clone() } else { c * Rational::from_integer(pw[k].clone()) };
            out.add_term(e, t);
        }
        out
    }

    /// Maximum absolute value of the numerators (meaningful for integer polynomials).
    pub fn max_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.numer().abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub(crate) fn map_coefficients<F: Fn(&Rational) -> Rational>(&self, f: F) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Largest absolute coefficient bit length (numerator and denominator).
    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    fn check_vars(&self, other: &Polynomial) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable sets: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    /// Rename the variable set; the new list must have the same length.
    pub fn with_vars(&self, vars: Vars) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        Polynomial { vars, terms: self.terms.clone() }
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_vars(rhs);
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_vars(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        if rhs.terms.len() == 1 {
            let (m, c) = rhs.terms.iter().next().unwrap();
            return Polynomial {
                vars: self.vars.clone(),
                terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect(),
            };
        }
        // Accumulate over a common denominator so the inner loop is integer arithmetic.
        let da = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let db = rhs.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ia: Vec<(&Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&da / c.denom())))
            .collect();
        let ib: Vec<(&Monomial, BigInt)> = rhs
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&db / c.denom())))
            .collect();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(ia.len() * ib.len() / 2 + 1);
        for (ma, ca) in &ia {
            for (mb, cb) in &ib {
                let prod = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        let den = da * db;
        Polynomial {
            vars: self.vars.clone(),
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Rational::new(c, den.clone())))
                .collect(),
        }
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    /// Prints in the expression grammar, highest grlex term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let is_unit = m.degree() == 0;
            if !a.is_one() || is_unit {
                write_rational(f, &a)?;
                if !is_unit {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (v, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.vars[v])?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Polynomial, Polynomial) {
        let v = vars(&["x", "y"]);
        (Polynomial::var(v.clone(), 0), Polynomial::var(v, 1))
    }

    #[test]
    fn grlex_leading_term() {
        let (x, y) = xy();
        let p = &(&x * &y) + &x.pow(2);
        // x^2 > x*y under grlex with x first
        assert_eq!(p.leading_term().unwrap().0 .0, vec![2, 0]);
        let q = &y.pow(3) + &x.pow(2);
        assert_eq!(q.leading_term().unwrap().0 .0, vec![0, 3]);
    }

    #[test]
    fn exact_division() {
        let (x, y) = xy();
        let one = Polynomial::one(x.vars().clone());
        let a = &(&x - &y) * &(&x + &one);
        assert_eq!(a.div_exact(&(&x - &y)).unwrap(), &x + &one);
        assert!(a.div_exact(&(&x + &y)).is_none());
    }

    #[test]
    fn derivative_and_evaluate() {
        let (x, y) = xy();
        let p = &(&x.pow(2) * &y) - &y.pow(2);
        let dx = p.derivative(0);
        assert_eq!(dx, &(&x * &y).scale(&Rational::from_integer(2.into())) + &Polynomial::zero(x.vars().clone()));
        let val = (&x.pow(2) - &y.pow(2)).evaluate(&[Rational::new(1.into(), 2.into()), Rational::from_integer(2.into())]);
        assert_eq!(val, Rational::new((-15).into(), 4.into()));
    }

    #[test]
    fn display_grammar() {
        let (x, y) = xy();
        let p = &(&x.pow(2) - &y).scale(&Rational::new(3.into(), 2.into())) - &Polynomial::from_int(x.vars().clone(), 1);
        assert_eq!(p.to_string(), "3/2*x^2 - 3/2*y - 1");
    }
}
