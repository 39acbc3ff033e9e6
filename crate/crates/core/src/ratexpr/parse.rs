//! Recursive-descent parser for the metric expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' ['-'] int)?
//! base   := int | var | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, which binds tighter than `*` and `/`. Chained exponents
//! associate to the right (`2^3^2 = 2^9`).

use std::fmt;

use num_bigint::BigInt;

use super::poly::Vars;
use super::ratfun::RationalFunction;
use super::{format_rational, RatExprError, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// A parsed expression together with the variable list its `Var` indices refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprAst {
    pub vars: Vars,
    pub root: Expr,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, RatExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(text[start..i].parse().unwrap()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(RatExprError::Syntax { position: i, message: format!("unexpected character `{}`", c) });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: &str) -> Result<T, RatExprError> {
        Err(RatExprError::Syntax { position: self.offset(), message: message.to_string() })
    }

    fn expr(&mut self) -> Result<Expr, RatExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, RatExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, RatExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, RatExprError> {
        let at = self.offset();
        let neg = self.eat('-');
        let mut value = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                i64::try_from(n).map_err(|_| RatExprError::Syntax { position: at, message: "exponent too large".into() })?
            }
            Some(_) => return Err(RatExprError::NonIntegerExponent { position: at }),
            None => return self.syntax("missing exponent"),
        };
        if self.eat('^') {
            let at2 = self.offset();
            let e = self.exponent()?;
            let e = u32::try_from(e).map_err(|_| RatExprError::NonIntegerExponent { position: at2 })?;
            value = value
                .checked_pow(e)
                .ok_or(RatExprError::Syntax { position: at2, message: "exponent too large".into() })?;
        }
        Ok(if neg { -value } else { value })
    }

    fn base(&mut self) -> Result<Expr, RatExprError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(RatExprError::UnknownVariable { name, position: at }),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.syntax("expected a number, variable or `(`"),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parse `text` over the declared variables.
pub fn parse_expression(text: &str, variables: &Vars) -> Result<ExprAst, RatExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(RatExprError::Syntax { position: 0, message: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), vars: variables };
    let root = p.expr()?;
    if p.pos != p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(ExprAst { vars: variables.clone(), root })
}

impl ExprAst {
    pub fn to_rational_function(&self) -> Result<RationalFunction, RatExprError> {
        compile(&self.root, &self.vars)
    }

    /// Floating-point evaluation (used for round-trip checks).
    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        eval_f64(&self.root, point)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, RatExprError> {
        eval_exact(&self.root, point)
    }
}

fn compile(e: &Expr, vars: &Vars) -> Result<RationalFunction, RatExprError> {
    Ok(match e {
        Expr::Num(r) => RationalFunction::constant(vars.clone(), r.clone()),
        Expr::Var(i) => RationalFunction::var(vars.clone(), *i),
        Expr::Neg(a) => -compile(a, vars)?,
        Expr::Binary(op, a, b) => {
            let a = compile(a, vars)?;
            let b = compile(b, vars)?;
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => (&a / &b)?,
            }
        }
        Expr::Pow(a, k) => compile(a, vars)?.pow(*k)?,
    })
}

fn eval_exact(e: &Expr, point: &[Rational]) -> Result<Rational, RatExprError> {
    use num_traits::Zero;
    Ok(match e {
        Expr::Num(r) => r.clone(),
        Expr::Var(i) => point[*i].clone(),
        Expr::Neg(a) => -eval_exact(a, point)?,
        Expr::Binary(op, a, b) => {
            let a = eval_exact(a, point)?;
            let b = eval_exact(b, point)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.is_zero() {
                        return Err(RatExprError::DenominatorVanishes { denominator: "0".into() });
                    }
                    a / b
                }
            }
        }
        Expr::Pow(a, k) => {
            let a = eval_exact(a, point)?;
            if *k < 0 && a.is_zero() {
                return Err(RatExprError::DenominatorVanishes { denominator: "0".into() });
            }
            num_traits::pow::Pow::pow(a, *k as i32)
        }
    })
}

fn eval_f64(e: &Expr, point: &[f64]) -> f64 {
    match e {
        Expr::Num(r) => super::rational_to_f64(r),
        Expr::Var(i) => point[*i],
        Expr::Neg(a) => -eval_f64(a, point),
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_f64(a, point), eval_f64(b, point));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
        Expr::Pow(a, k) => eval_f64(a, point).powi(*k as i32),
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(r) if !r.is_integer() => 2,
        Expr::Num(r) if r < &Rational::from_integer(0.into()) => 3,
        Expr::Num(_) | Expr::Var(_) => 5,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, vars: &Vars, min_prec: u8) -> fmt::Result {
    let p = prec(e);
    let paren = p < min_prec;
    if paren {
        write!(f, "(")?;
    }
    match e {
        Expr::Num(r) => write!(f, "{}", format_rational(r))?,
        Expr::Var(i) => write!(f, "{}", vars[*i])?,
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_expr(f, a, vars, 3)?;
        }
        Expr::Binary(op, a, b) => {
            let (sym, lp, rp) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
            };
            write_expr(f, a, vars, lp)?;
            write!(f, " {} ", sym)?;
            write_expr(f, b, vars, rp)?;
        }
        Expr::Pow(a, k) => {
            write_expr(f, a, vars, 5)?;
            write!(f, "^{}", k)?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, &self.root, &self.vars, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{int, ratio, vars};

    fn xy() -> Vars {
        vars(&["x", "y"])
    }

    #[test]
    fn division_root() {
        let ast = parse_expression("(x^2-1)/(x^2-y^2)", &xy()).unwrap();
        assert!(matches!(ast.root, Expr::Binary(BinOp::Div, ..)));
    }

    #[test]
    fn fractional_exponent_rejected() {
        assert_eq!(
            parse_expression("x^(1/2)", &xy()),
            Err(RatExprError::NonIntegerExponent { position: 2 })
        );
        assert!(matches!(parse_expression("x^y", &xy()), Err(RatExprError::NonIntegerExponent { .. })));
    }

    #[test]
    fn unknown_variable_and_syntax_positions() {
        assert_eq!(
            parse_expression("x + z", &xy()),
            Err(RatExprError::UnknownVariable { name: "z".into(), position: 4 })
        );
        assert!(matches!(parse_expression("(x+1", &xy()), Err(RatExprError::Syntax { position: 4, .. })));
        assert!(matches!(parse_expression("x $ y", &xy()), Err(RatExprError::Syntax { position: 2, .. })));
        assert!(matches!(parse_expression("   ", &xy()), Err(RatExprError::Syntax { .. })));
    }

    #[test]
    fn precedence() {
        let v = xy();
        let p = [int(3), int(5)];
        // ^ binds tighter than unary minus
        assert_eq!(parse_expression("-x^2", &v).unwrap().evaluate(&p).unwrap(), int(-9));
        assert_eq!(parse_expression("2^3^2", &v).unwrap().evaluate(&p).unwrap(), int(512));
        assert_eq!(parse_expression("x - y - 1", &v).unwrap().evaluate(&p).unwrap(), int(-3));
        assert_eq!(parse_expression("x / y / 2", &v).unwrap().evaluate(&p).unwrap(), ratio(3, 10));
        assert_eq!(parse_expression("x^-2", &v).unwrap().evaluate(&p).unwrap(), ratio(1, 9));
        assert_eq!(parse_expression("1/2*x", &v).unwrap().evaluate(&p).unwrap(), ratio(3, 2));
    }

    #[test]
    fn compile_cancellation() {
        let v = xy();
        let f = parse_expression("x - x", &v).unwrap().to_rational_function().unwrap();
        assert!(f.is_zero());
        assert!(f.denom().is_one());
        let g = parse_expression("1/(x-1) + 1/(x+1)", &v).unwrap().to_rational_function().unwrap();
        assert_eq!(g.to_string(), "(2*x)/(x^2 - 1)");
        assert_eq!(
            parse_expression("1/(x-x)", &v).unwrap().to_rational_function(),
            Err(RatExprError::ZeroDenominator)
        );
    }

    #[test]
    fn printer_reparses() {
        let v = xy();
        for src in ["((x+1)/(x-1))^2", "-(x - y)^3 / (2 - -x)", "x^-1 - 1/3*y", "-x^2"] {
            let a = parse_expression(src, &v).unwrap();
            let b = parse_expression(&a.to_string(), &v).unwrap();
            assert_eq!(a, b, "{}", src);
        }
    }
}
