//! Prolongation of first-order linear PDE systems in two base variables, and assembly of the
//! resulting linear systems on jets at a rational point.
//!
//! Differentiating `sum coef * D^alpha(u)` by `d^c/dx^c d^d/dy^d` gives, by Leibniz,
//! `sum_{p<=c, q<=d} C(c,p) C(d,q) (D^(p,q) coef) D^(alpha + (c-p, d-q))(u)`.
//! Each prolonged equation stores that expansion as index data; coefficient values are taken
//! from exact Taylor expansions of the base coefficients at the evaluation point.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::SparseRationalMatrix;
use crate::pde::{binomial, Deriv, LinearPdeSystem};
use num_traits::Zero;

use crate::ratexpr::{format_rational, ratio, Rational, RationalFunction, Taylor2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("point ({x}, {y}) lies on the zero set of {polynomial} (equation {equation}); try one of: {suggestions}")]
    SingularPoint { x: String, y: String, polynomial: String, equation: usize, suggestions: String },
}

/// A jet coordinate: the derivative `d^a/dx^a d^b/dy^b` of an unknown at the point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetIndex {
    pub unknown: usize,
    pub a: u32,
    pub b: u32,
}

impl JetIndex {
    pub fn order(&self) -> u32 {
        self.a + self.b
    }

    /// Column of this jet among `m` unknowns: by total order, then `x`-derivatives first
    /// (`a` descending), then unknown.
    pub fn column(&self, m: usize) -> usize {
        let r = self.order() as usize;
        (r * (r + 1) / 2 + self.b as usize) * m + self.unknown
    }
}

impl fmt::Display for JetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}[{},{}]", self.unknown, self.a, self.b)
    }
}

/// Number of jets of order at most `n + 1` for `m` unknowns.
pub fn jet_dimension(m: usize, n: u32) -> usize {
    m * binomial(n as u64 + 3, 2) as usize
}

/// Jets of order at most `n + 1` in column order.
pub fn column_key(m: usize, n: u32) -> Vec<JetIndex> {
    let mut key = Vec::with_capacity(jet_dimension(m, n));
    for r in 0..=n + 1 {
        for a in (0..=r).rev() {
            for u in 0..m {
                key.push(JetIndex { unknown: u, a, b: r - a });
            }
        }
    }
    key
}

/// One summand of a prolonged equation: `multiplier * D^coefficient_derivative(coef of
/// base_term) * jet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeibnizTerm {
    pub jet: JetIndex,
    pub base_term: usize,
    pub coefficient_derivative: (u32, u32),
    pub multiplier: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongedEquation {
    pub base: usize,
    /// Differentiation multi-index `(c, d)`.
    pub by: (u32, u32),
    pub terms: Vec<LeibnizTerm>,
}

/// The `n`-th prolongation: every base equation differentiated by every `(c, d)` with
/// `c + d <= n`. Rows follow [`differentiation_indices`], then base equation order, so the
/// rows of level `n - 1` are a prefix of those of level `n`.
#[derive(Clone, Debug)]
pub struct ProlongedSystem {
    pub base: LinearPdeSystem,
    pub level: u32,
    pub equations: Vec<ProlongedEquation>,
}

/// Multi-indices of order at most `n`, by order then `c` ascending.
pub fn differentiation_indices(n: u32) -> Vec<(u32, u32)> {
    (0..=n).flat_map(|r| (0..=r).map(move |c| (c, r - c))).collect()
}

fn prolong_equation(s: &LinearPdeSystem, e: usize, (c, d): (u32, u32)) -> ProlongedEquation {
    let mut terms = Vec::new();
    for (ti, t) in s.equations[e].terms.iter().enumerate() {
        let (ax, ay) = t.derivative.multi_index();
        for p in 0..=c {
            for q in 0..=d {
                terms.push(LeibnizTerm {
                    jet: JetIndex { unknown: t.unknown, a: ax + c - p, b: ay + d - q },
                    base_term: ti,
                    coefficient_derivative: (p, q),
                    multiplier: binomial(c as u64, p as u64) * binomial(d as u64, q as u64),
                });
            }
        }
    }
    let m = s.unknowns.len();
    terms.sort_by_key(|t| (t.jet.column(m), t.base_term));
    ProlongedEquation { base: e, by: (c, d), terms }
}

pub fn prolong(s: &LinearPdeSystem, n: u32) -> ProlongedSystem {
    let idx = differentiation_indices(n);
    let equations = idx
        .iter()
        .flat_map(|&cd| (0..s.equations.len()).map(move |e| (e, cd)))
        .map(|(e, cd)| prolong_equation(s, e, cd))
        .collect();
    ProlongedSystem { base: s.clone(), level: n, equations }
}

impl ProlongedSystem {
    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn num_jets(&self) -> usize {
        jet_dimension(self.base.unknowns.len(), self.level)
    }

    /// Symbolic coefficients of one prolonged equation, summed per jet. Coefficient derivatives
    /// are memoised in `cache` keyed by (base equation, term, derivative multi-index).
    pub fn symbolic_equation(&self, i: usize, cache: &mut DerivativeCache) -> Vec<(JetIndex, RationalFunction)> {
        let eq = &self.equations[i];
        let mut out: Vec<(JetIndex, RationalFunction)> = Vec::new();
        for t in &eq.terms {
            let coef = cache.get(&self.base, eq.base, t.base_term, t.coefficient_derivative);
            let v = coef.scale(&Rational::from_integer((t.multiplier as i64).into()));
            match out.last_mut() {
                Some((j, acc)) if *j == t.jet => *acc = &*acc + &v,
                _ => out.push((t.jet, v)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }
}

/// Memoised symbolic derivatives of base coefficients.
#[derive(Default)]
pub struct DerivativeCache {
    map: HashMap<(usize, usize, (u32, u32)), RationalFunction>,
}

impl DerivativeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, s: &LinearPdeSystem, e: usize, t: usize, (p, q): (u32, u32)) -> RationalFunction {
        if let Some(f) = self.map.get(&(e, t, (p, q))) {
            return f.clone();
        }
        let f = if p > 0 {
            self.get(s, e, t, (p - 1, q)).derivative(0)
        } else if q > 0 {
            self.get(s, e, t, (p, q - 1)).derivative(1)
        } else {
            s.equations[e].terms[t].coefficient.clone()
        };
        self.map.insert((e, t, (p, q)), f.clone());
        f
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Taylor expansions of every base coefficient at a point, up to a fixed order. Built once and
/// shared by all prolongation levels up to that order.
#[derive(Clone, Debug)]
pub struct JetEvaluator {
    point: [Rational; 2],
    order: u32,
    expansions: Vec<Vec<Taylor2>>,
}

fn point_error(s: &LinearPdeSystem, point: &[Rational; 2], equation: usize, polynomial: String) -> AssemblyError {
    let sugg = suggest_points(s, point, 3);
    AssemblyError::SingularPoint {
        x: format_rational(&point[0]),
        y: format_rational(&point[1]),
        polynomial,
        equation,
        suggestions: sugg
            .iter()
            .map(|p| format!("{},{}", format_rational(&p[0]), format_rational(&p[1])))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

impl JetEvaluator {
    pub fn new(s: &LinearPdeSystem, point: &[Rational; 2], order: u32) -> Result<Self, AssemblyError> {
        let expansions: Vec<Result<Vec<Taylor2>, AssemblyError>> = s
            .equations
            .par_iter()
            .enumerate()
            .map(|(e, eq)| {
                eq.terms
                    .iter()
                    .map(|t| {
                        Taylor2::of_rational_function(&t.coefficient, point, order as usize)
                            .map_err(|_| point_error(s, point, e, t.coefficient.denom().to_string()))
                    })
                    .collect()
            })
            .collect();
        Ok(JetEvaluator { point: point.clone(), order, expansions: expansions.into_iter().collect::<Result<_, _>>()? })
    }

    pub fn point(&self) -> &[Rational; 2] {
        &self.point
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Value at the point of `D^(p,q)` of the coefficient of term `t` in base equation `e`.
    pub fn derivative_value(&self, e: usize, t: usize, (p, q): (u32, u32)) -> Rational {
        self.expansions[e][t].derivative_value(p as usize, q as usize)
    }
}

/// True if every coefficient of the system is regular at the point.
pub fn is_regular(s: &LinearPdeSystem, point: &[Rational; 2]) -> bool {
    s.equations
        .iter()
        .all(|eq| eq.terms.iter().all(|t| !t.coefficient.denom().evaluate(point).is_zero()))
}

/// Nearby rational points at which the system is regular, nearest first.
pub fn suggest_points(s: &LinearPdeSystem, point: &[Rational; 2], count: usize) -> Vec<[Rational; 2]> {
    let mut out = Vec::new();
    for k in [7i64, 11, 13, 17, 19, 23] {
        for (sx, sy) in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, -1)] {
            let cand = [&point[0] + ratio(sx, k), &point[1] + ratio(sy, k)];
            if is_regular(s, &cand) && !out.contains(&cand) {
                out.push(cand);
                if out.len() == count {
                    return out;
                }
            }
        }
    }
    out
}

/// An exactly evaluated prolonged system. Each row is scaled to a primitive integer row
/// (denominators cleared per equation); rank and kernel are unaffected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembledMatrix {
    pub matrix: SparseRationalMatrix,
    pub point: [Rational; 2],
    pub column_key: Vec<JetIndex>,
    /// (base equation, differentiation multi-index) per row.
    pub row_key: Vec<(usize, (u32, u32))>,
}

impl AssembledMatrix {
    pub fn to_triplets(&self) -> String {
        self.matrix.to_triplets()
    }
}

fn integer_row(mut entries: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    entries.retain(|(_, v)| !v.is_zero());
    let vals: Vec<Rational> = entries.iter().map(|(_, v)| v.clone()).collect();
    let ints = crate::exactla::primitive_integer_vector(&vals);
    entries.iter().zip(ints).map(|((c, _), v)| (*c, Rational::from_integer(v))).collect()
}

fn evaluate_row(ps: &ProlongedSystem, ev: &JetEvaluator, i: usize) -> Vec<(usize, Rational)> {
    let m = ps.base.unknowns.len();
    let eq = &ps.equations[i];
    let mut row: Vec<(usize, Rational)> = Vec::with_capacity(eq.terms.len());
    for t in &eq.terms {
        let v = ev.derivative_value(eq.base, t.base_term, t.coefficient_derivative);
        if v.is_zero() {
            continue;
        }
        let v = v * Rational::from_integer((t.multiplier as i64).into());
        let col = t.jet.column(m);
        match row.last_mut() {
            Some((c, acc)) if *c == col => *acc += v,
            _ => row.push((col, v)),
        }
    }
    integer_row(row)
}

/// Assemble at a point, building the Taylor expansions on the fly.
pub fn assemble(ps: &ProlongedSystem, point: &[Rational; 2]) -> Result<AssembledMatrix, AssemblyError> {
    let ev = JetEvaluator::new(&ps.base, point, ps.level)?;
    Ok(assemble_with(ps, &ev))
}

/// Assemble with precomputed expansions (of order at least the prolongation level).
pub fn assemble_with(ps: &ProlongedSystem, ev: &JetEvaluator) -> AssembledMatrix {
    assert!(ev.order() >= ps.level, "Taylor order below prolongation level");
    let m = ps.base.unknowns.len();
    let rows: Vec<Vec<(usize, Rational)>> = (0..ps.equations.len()).into_par_iter().map(|i| evaluate_row(ps, ev, i)).collect();
    let cols = ps.num_jets();
    let matrix = SparseRationalMatrix::from_rows(cols, rows).expect("jet columns in range");
    AssembledMatrix {
        matrix,
        point: ev.point().clone(),
        column_key: column_key(m, ps.level),
        row_key: ps.equations.iter().map(|e| (e.base, e.by)).collect(),
    }
}

/// Top-order part of the level-`n` prolongation: rows are the equations differentiated by
/// multi-indices of order exactly `n` with nonzero top-order part, columns the jets of order
/// `n + 1` (by `a` descending, then unknown).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMatrix {
    pub matrix: SparseRationalMatrix,
    pub point: [Rational; 2],
    pub column_key: Vec<JetIndex>,
    pub row_key: Vec<(usize, (u32, u32))>,
    /// Rows dropped because their top-order part vanishes.
    pub zero_rows: usize,
    /// Number of pairwise non-proportional rows.
    pub distinct_rows: usize,
}

pub fn symbol_assemble(s: &LinearPdeSystem, n: u32, point: &[Rational; 2]) -> Result<SymbolMatrix, AssemblyError> {
    let m = s.unknowns.len();
    let mut values: Vec<Vec<Option<Rational>>> = Vec::with_capacity(s.equations.len());
    for (e, eq) in s.equations.iter().enumerate() {
        let mut v = Vec::with_capacity(eq.terms.len());
        for t in &eq.terms {
            if t.derivative == Deriv::Value {
                v.push(None);
                continue;
            }
            let val = t
                .coefficient
                .evaluate(point)
                .map_err(|_| point_error(s, point, e, t.coefficient.denom().to_string()))?;
            v.push(Some(val));
        }
        values.push(v);
    }
    let column_key: Vec<JetIndex> =
        (0..=n + 1).rev().flat_map(|a| (0..m).map(move |u| JetIndex { unknown: u, a, b: n + 1 - a })).collect();
    let col = |j: &JetIndex| j.b as usize * m + j.unknown;
    let mut rows = Vec::new();
    let mut row_key = Vec::new();
    let mut zero_rows = 0;
    for c in 0..=n {
        let d = n - c;
        for (e, eq) in s.equations.iter().enumerate() {
            let mut row: Vec<(usize, Rational)> = Vec::new();
            for (t, term) in eq.terms.iter().enumerate() {
                if let Some(v) = &values[e][t] {
                    let (ax, ay) = term.derivative.multi_index();
                    row.push((col(&JetIndex { unknown: term.unknown, a: ax + c, b: ay + d }), v.clone()));
                }
            }
            let mut sm = SparseRationalMatrix::zeros(1, column_key.len());
            for (cc, v) in row {
                sm.add_entry(0, cc, v).expect("symbol column in range");
            }
            let row = sm.row(0).to_vec();
            if row.is_empty() {
                zero_rows += 1;
                continue;
            }
            rows.push(row);
            row_key.push((e, (c, d)));
        }
    }
    let mut seen = HashSet::new();
    for r in &rows {
        let lead = r[0].1.clone();
        let normalized: Vec<(usize, Rational)> = r.iter().map(|(c, v)| (*c, v / &lead)).collect();
        seen.insert(normalized);
    }
    let distinct_rows = seen.len();
    let matrix = SparseRationalMatrix::from_rows(column_key.len(), rows).expect("symbol columns in range");
    Ok(SymbolMatrix { matrix, point: point.clone(), column_key, row_key, zero_rows, distinct_rows })
}

/// Jet vector of concrete coefficient functions (one per unknown) at the point, in the column
/// order of level `n`.
pub fn jet_vector(coefficients: &[RationalFunction], point: &[Rational; 2], n: u32) -> Result<Vec<Rational>, crate::ratexpr::RatExprError> {
    let m = coefficients.len();
    let series: Vec<Option<Taylor2>> = coefficients
        .iter()
        .map(|f| {
            if f.is_zero() {
                Ok(None)
            } else {
                Taylor2::of_rational_function(f, point, n as usize + 1).map(Some)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(column_key(m, n)
        .iter()
        .map(|j| match &series[j.unknown] {
            Some(s) => s.derivative_value(j.a as usize, j.b as usize),
            None => Rational::from_integer(0.into()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{PdeEquation, PdeTerm, SystemParity, Unknown, AnsatzIndex};
    use crate::ratexpr::{int, parse_rational_function, vars};

    fn toy(eqs: &[&[(&str, Deriv)]]) -> LinearPdeSystem {
        let v = vars(&["x", "y"]);
        LinearPdeSystem {
            vars: v.clone(),
            unknowns: vec![Unknown::new(AnsatzIndex([1, 0, 0, 0]))],
            equations: eqs
                .iter()
                .map(|terms| PdeEquation {
                    tag: [0; 4],
                    terms: terms
                        .iter()
                        .map(|(c, d)| PdeTerm { unknown: 0, derivative: *d, coefficient: parse_rational_function(c, &v).unwrap() })
                        .collect(),
                })
                .collect(),
            parity: SystemParity::Odd,
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(jet_dimension(44, 6), 1584);
        assert_eq!(jet_dimension(40, 4), 840);
        assert_eq!(jet_dimension(1, 0), 3);
        let key = column_key(2, 1);
        assert_eq!(key.len(), 12);
        for (i, j) in key.iter().enumerate() {
            assert_eq!(j.column(2), i);
        }
    }

    #[test]
    fn toy_leibniz_prolongation() {
        // d_x f - c f = 0 with c = x*y
        let s = toy(&[&[("1", Deriv::Dx), ("-x*y", Deriv::Value)]]);
        let ps = prolong(&s, 1);
        assert_eq!(ps.num_equations(), 3);
        let mut cache = DerivativeCache::new();
        // the d/dx-prolonged equation: f_xx - c f_x - c_x f
        let ex = ps.equations.iter().position(|e| e.by == (1, 0)).unwrap();
        let sym = ps.symbolic_equation(ex, &mut cache);
        let v = vars(&["x", "y"]);
        let want = [
            (JetIndex { unknown: 0, a: 0, b: 0 }, "-y"),
            (JetIndex { unknown: 0, a: 1, b: 0 }, "-x*y"),
            (JetIndex { unknown: 0, a: 2, b: 0 }, "1"),
        ];
        assert_eq!(sym.len(), 3);
        for ((j, c), (wj, wc)) in sym.iter().zip(want) {
            assert_eq!(*j, wj);
            assert_eq!(*c, parse_rational_function(wc, &v).unwrap());
        }
    }

    #[test]
    fn toy_assembly_and_symbol() {
        let s = toy(&[&[("1", Deriv::Dx)], &[("1", Deriv::Dy)]]);
        let a = assemble(&prolong(&s, 0), &[int(0), int(0)]).unwrap();
        assert_eq!(a.matrix.to_dense(), vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]]);
        let s1 = toy(&[&[("1", Deriv::Dx), ("-1", Deriv::Value)]]);
        let sym = symbol_assemble(&s1, 0, &[int(0), int(0)]).unwrap();
        assert_eq!(sym.matrix.to_dense(), vec![vec![int(1), int(0)]]);
        assert_eq!(sym.column_key[0], JetIndex { unknown: 0, a: 1, b: 0 });
    }

    #[test]
    fn singular_point_reported_with_suggestions() {
        let s = toy(&[&[("1/(x-1)", Deriv::Dx)]]);
        let err = assemble(&prolong(&s, 0), &[int(1), int(0)]).unwrap_err();
        let AssemblyError::SingularPoint { polynomial, suggestions, .. } = err;
        assert_eq!(polynomial, "x - 1");
        assert!(!suggestions.is_empty());
    }

    #[test]
    fn taylor_assembly_matches_symbolic() {
        let s = toy(&[&[("x/(y+2)", Deriv::Dx), ("x^2 - y", Deriv::Dy), ("1/(x+y+3)", Deriv::Value)]]);
        let ps = prolong(&s, 3);
        let pt = [ratio(1, 2), int(2)];
        let a = assemble(&ps, &pt).unwrap();
        let mut cache = DerivativeCache::new();
        for i in 0..ps.num_equations() {
            let sym = ps.symbolic_equation(i, &mut cache);
            let vals: Vec<(usize, Rational)> = sym.iter().map(|(j, c)| (j.column(1), c.evaluate(&pt).unwrap())).collect();
            let want = integer_row(vals);
            assert_eq!(a.matrix.row(i), want.as_slice());
        }
    }
}
