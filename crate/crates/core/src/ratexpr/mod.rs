//! Exact arithmetic: rationals, multivariate polynomials, rational functions, truncated Taylor
//! expansions, and the expression language used for metric input.

mod gcd;
mod parse;
mod poly;
mod ratfun;
mod series;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use gcd::gcd;
pub use parse::{parse_expression, BinOp, Expr, ExprAst};
pub use poly::{vars, Monomial, Polynomial, Vars};
pub use ratfun::RationalFunction;
pub use series::Taylor2;

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("exponent at position {position} is not an integer literal")]
    NonIntegerExponent { position: usize },
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("denominator {denominator} vanishes at the evaluation point")]
    DenominatorVanishes { denominator: String },
    #[error("evaluation point does not assign variable `{0}`")]
    MissingVariable(String),
    #[error("invalid rational literal `{0}`")]
    BadRational(String),
}

/// Compile an AST into a canonical rational function.
pub fn to_rational_function(ast: &ExprAst) -> Result<RationalFunction, RatExprError> {
    ast.to_rational_function()
}

/// Parse and compile in one step.
pub fn parse_rational_function(text: &str, variables: &Vars) -> Result<RationalFunction, RatExprError> {
    parse_expression(text, variables)?.to_rational_function()
}

/// Exact value of `f` at a point given by variable name.
pub fn evaluate(f: &RationalFunction, point: &HashMap<String, Rational>) -> Result<Rational, RatExprError> {
    let values = f
        .vars()
        .iter()
        .map(|v| point.get(v).cloned().ok_or_else(|| RatExprError::MissingVariable(v.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    f.evaluate(&values)
}

/// Parses `a`, `-a` or `a/b`.
pub fn parse_rational(text: &str) -> Result<Rational, RatExprError> {
    let bad = || RatExprError::BadRational(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerator/denominator: scale down by a common power of two.
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let shift = (nb.max(db) - 1000).max(0) as usize;
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(-3, 6)), "-1/2");
    }

    #[test]
    fn named_evaluation() {
        let v = vars(&["x", "y"]);
        let f = parse_rational_function("x^2 - y^2", &v).unwrap();
        let mut p = HashMap::new();
        p.insert("x".to_string(), ratio(1, 2));
        p.insert("y".to_string(), int(2));
        assert_eq!(evaluate(&f, &p).unwrap(), ratio(-15, 4));
        p.remove("y");
        assert_eq!(evaluate(&f, &p), Err(RatExprError::MissingVariable("y".into())));
    }
}
