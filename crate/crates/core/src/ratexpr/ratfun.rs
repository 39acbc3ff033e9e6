//! Canonical rational functions over the rationals.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{Polynomial, Vars};
use super::{RatExprError, Rational};

/// `num / den` with `gcd(num, den) = 1` and `den` monic under grlex.
///
/// The representation is unique, so derived equality is mathematical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self)
    }
}

impl RationalFunction {
    /// Builds and canonicalizes `num / den`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RatExprError> {
        if den.is_zero() {
            return Err(RatExprError::ZeroDenominator);
        }
        Ok(Self::new_unchecked(num, den))
    }

    fn new_unchecked(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero(num.vars().clone());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Self::from_coprime(num, den)
    }

    /// Normalizes the scalar only; caller guarantees `gcd(num, den) = 1`.
    fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coefficient();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero(vars: Vars) -> Self {
        RationalFunction { num: Polynomial::zero(vars.clone()), den: Polynomial::one(vars) }
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: Vars, c: Rational) -> Self {
        RationalFunction { num: Polynomial::constant(vars.clone(), c), den: Polynomial::one(vars) }
    }

    pub fn from_int(vars: Vars, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(c.into()))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let vars = p.vars().clone();
        RationalFunction { num: p, den: Polynomial::one(vars) }
    }

    pub fn var(vars: Vars, idx: usize) -> Self {
        Self::from_polynomial(Polynomial::var(vars, idx))
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, if this function is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant()
            .then(|| self.num.constant_term() / self.den.constant_term())
    }

    /// Whether any of the named variable indices occurs.
    pub fn depends_on(&self, v: usize) -> bool {
        self.num.degree_in(v) > 0 || self.den.degree_in(v) > 0
    }

    pub fn recip(&self) -> Result<Self, RatExprError> {
        if self.is_zero() {
            return Err(RatExprError::ZeroDenominator);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars().clone());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, e: i64) -> Result<Self, RatExprError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(RationalFunction { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Partial derivative in variable `v` (quotient rule, canonical result).
    pub fn derivative(&self, v: usize) -> Self {
        let dn = self.num.derivative(v);
        if self.den.is_constant() {
            return RationalFunction { num: dn, den: self.den.clone() };
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Self::from_coprime(dn, self.den.clone()).renormalize();
        }
        // (n/d)' = (n' d - n d') / d^2; with g = gcd(d, d'), d = g h, d' = g k:
        // (n' h - n k) / (h d), where only factors of g can still cancel.
        let g = gcd(&self.den, &dd);
        let h = self.den.div_exact(&g).expect("gcd divides");
        let k = dd.div_exact(&g).expect("gcd divides");
        let num = &(&dn * &h) - &(&self.num * &k);
        if num.is_zero() {
            return Self::zero(self.vars().clone());
        }
        let g2 = gcd(&num, &g);
        if g2.is_one() {
            Self::from_coprime(num, &h * &self.den)
        } else {
            let den = (&h * &self.den).div_exact(&g2).expect("gcd divides");
            Self::from_coprime(num.div_exact(&g2).expect("gcd divides"), den)
        }
    }

    fn renormalize(self) -> Self {
        Self::new_unchecked(self.num, self.den)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, RatExprError> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(RatExprError::DenominatorVanishes { denominator: self.den.to_string() });
        }
        Ok(self.num.evaluate(point) / d)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.num.evaluate_f64(point) / self.den.evaluate_f64(point)
    }

    pub fn with_vars(&self, vars: Vars) -> Self {
        RationalFunction { num: self.num.with_vars(vars.clone()), den: self.den.with_vars(vars) }
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::new_unchecked(&self.num + &rhs.num, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        if g.is_one() {
            // Coprime denominators: the sum is already reduced.
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            if num.is_zero() {
                return RationalFunction::zero(self.vars().clone());
            }
            return RationalFunction::from_coprime(num, &self.den * &rhs.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RationalFunction::zero(self.vars().clone());
        }
        // Only factors of g can be shared between num and b1*d1*g.
        let g2 = gcd(&num, &g);
        let (num, g) = if g2.is_one() {
            (num, g)
        } else {
            (num.div_exact(&g2).unwrap(), g.div_exact(&g2).unwrap())
        };
        RationalFunction::from_coprime(num, &(&b1 * &d1) * &g)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.vars().clone());
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let div = |p: &Polynomial, g: &Polynomial| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = &div(&self.num, &g1) * &div(&rhs.num, &g2);
        let den = &div(&self.den, &g2) * &div(&rhs.den, &g1);
        RationalFunction::from_coprime(num, den)
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = Result<RationalFunction, RatExprError>;
    fn div(self, rhs: &RationalFunction) -> Result<RationalFunction, RatExprError> {
        Ok(self * &rhs.recip()?)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: RationalFunction) -> RationalFunction {
        &self + &rhs
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: RationalFunction) -> RationalFunction {
        &self - &rhs
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: RationalFunction) -> RationalFunction {
        &self * &rhs
    }
}

impl fmt::Display for RationalFunction {
    /// Prints in the expression grammar, so the output re-parses to the same function.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            if self.num.num_terms() > 1 {
                return write!(f, "({})", self.num);
            }
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::poly::vars;

    #[test]
    fn partial_fractions_sum() {
        let v = vars(&["x"]);
        let x = Polynomial::var(v.clone(), 0);
        let one = Polynomial::one(v.clone());
        let a = RationalFunction::new(one.clone(), &x - &one).unwrap();
        let b = RationalFunction::new(one.clone(), &x + &one).unwrap();
        let s = &a + &b;
        assert_eq!(s.numer(), &x.scale(&Rational::from_integer(2.into())));
        assert_eq!(s.denom(), &(&x.pow(2) - &one));
    }

    #[test]
    fn derivative_of_reciprocal() {
        let v = vars(&["x"]);
        let x = Polynomial::var(v.clone(), 0);
        let one = Polynomial::one(v.clone());
        let f = RationalFunction::new(one.clone(), &x - &one).unwrap();
        let expect = RationalFunction::new(-&one, (&x - &one).pow(2)).unwrap();
        assert_eq!(f.derivative(0), expect);
    }

    #[test]
    fn zero_denominator_rejected() {
        let v = vars(&["x"]);
        let x = Polynomial::var(v.clone(), 0);
        assert_eq!(
            RationalFunction::new(x, Polynomial::zero(v)),
            Err(RatExprError::ZeroDenominator)
        );
    }

    #[test]
    fn evaluation_on_pole_fails() {
        let v = vars(&["x"]);
        let x = Polynomial::var(v.clone(), 0);
        let one = Polynomial::one(v.clone());
        let f = RationalFunction::new(one.clone(), &x - &one).unwrap();
        assert!(matches!(
            f.evaluate(&[Rational::one()]),
            Err(RatExprError::DenominatorVanishes { .. })
        ));
    }
}
