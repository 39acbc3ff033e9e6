//! Metric models: user-defined metrics from a line-oriented file, the built-in Zipoy-Voorhees
//! family, exact inversion, and the geodesic Hamiltonian.

use std::fmt;
use std::path::Path;

use num_traits::Zero;
use thiserror::Error;

use crate::momentum::MomentumPolynomial;
use crate::ratexpr::{
    int, parse_rational_function, ratio, vars, Polynomial, RatExprError, Rational, RationalFunction, Vars,
};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("metric file line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("metric file line {line}: {source}")]
    Expression { line: usize, source: RatExprError },
    #[error("metric is not symmetric: g[{i}][{j}] != g[{j}][{i}]")]
    NotSymmetric { i: usize, j: usize },
    #[error("metric determinant is identically zero")]
    SingularDeterminant,
    #[error("invalid Zipoy-Voorhees parameter: {0} (delta must be a non-negative integer)")]
    InvalidDelta(String),
    #[error("evaluation point lies on the singular locus: {0} vanishes")]
    SingularPoint(String),
    #[error("could not read metric file: {0}")]
    Io(#[from] std::io::Error),
}

/// Coordinate names and the split into base (non-cyclic) and cyclic coordinates.
///
/// `slots[s]` is the coordinate index for momentum slot `s`; slots 0,1 are the base
/// coordinates in declaration order and slots 2,3 the cyclic ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinates {
    pub names: [String; 4],
    pub slots: [usize; 4],
    pub base_vars: Vars,
}

impl Coordinates {
    pub fn new(names: [String; 4], cyclic: [&str; 2]) -> Result<Self, MetricError> {
        let find = |n: &str| names.iter().position(|c| c == n);
        let c0 = find(cyclic[0]);
        let c1 = find(cyclic[1]);
        let (c0, c1) = match (c0, c1) {
            (Some(a), Some(b)) if a != b => (a.min(b), a.max(b)),
            _ => {
                return Err(MetricError::Syntax {
                    line: 0,
                    message: format!("cyclic coordinates {:?} must be two distinct declared coordinates", cyclic),
                })
            }
        };
        let base: Vec<usize> = (0..4).filter(|&i| i != c0 && i != c1).collect();
        let base_vars = vars(&[names[base[0]].as_str(), names[base[1]].as_str()]);
        Ok(Coordinates { slots: [base[0], base[1], c0, c1], names, base_vars })
    }

    pub fn default_names() -> Self {
        Self::new(["x".into(), "y".into(), "phi".into(), "t".into()], ["phi", "t"]).unwrap()
    }

    /// Momentum name for slot `s`, e.g. `p_phi`.
    pub fn momentum_name(&self, s: usize) -> String {
        format!("p_{}", self.names[self.slots[s]])
    }
}

/// A 4x4 symmetric lower-index metric whose entries depend only on the two base coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub coords: Coordinates,
    /// Indexed by coordinate index (declaration order).
    pub g_lower: [[RationalFunction; 4]; 4],
    pub singular_locus: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseMetric {
    pub coords: Coordinates,
    pub g_upper: [[RationalFunction; 4]; 4],
    pub singular_locus: Vec<Polynomial>,
}

/// `H = 1/2 g^{ij} p_i p_j` as a momentum polynomial (slot order).
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub coords: Coordinates,
    pub poly: MomentumPolynomial,
    pub singular_locus: Vec<Polynomial>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZipoyVoorheesParams {
    pub delta: u32,
}

impl ZipoyVoorheesParams {
    /// Accepts non-negative integers only (`"2"`, `"2/1"`), rejecting anything else.
    pub fn parse(text: &str) -> Result<Self, MetricError> {
        let r = crate::ratexpr::parse_rational(text).map_err(|_| MetricError::InvalidDelta(text.into()))?;
        if !r.is_integer() || r < int(0) {
            return Err(MetricError::InvalidDelta(text.into()));
        }
        let delta = u32::try_from(r.numer()).map_err(|_| MetricError::InvalidDelta(text.into()))?;
        Ok(ZipoyVoorheesParams { delta })
    }
}

fn zeros(v: &Vars) -> [[RationalFunction; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| RationalFunction::zero(v.clone())))
}

/// The Zipoy-Voorhees metric with integer parameter `delta` in prolate spheroidal coordinates
/// `(x, y, phi, t)`:
///
/// ```text
/// ((x+1)/(x-1))^d [ (x^2-y^2) ((x^2-1)/(x^2-y^2))^(d^2) (dx^2/(x^2-1) + dy^2/(1-y^2))
///                   + (x^2-1)(1-y^2) dphi^2 ] - ((x-1)/(x+1))^d dt^2
/// ```
///
/// `delta = 0` is flat space, `delta = 1` Schwarzschild.
pub fn builtin_zipoy_voorhees(params: ZipoyVoorheesParams) -> MetricSpec {
    let coords = Coordinates::default_names();
    let v = coords.base_vars.clone();
    let d = params.delta as i64;
    let p = |s: &str| parse_rational_function(s, &v).expect("built-in expression");
    let a = p("(x+1)/(x-1)").pow(d).unwrap();
    let b = p("(x^2-1)/(x^2-y^2)").pow(d * d).unwrap();
    let conformal = &(&a * &p("x^2-y^2")) * &b;
    let mut g = zeros(&v);
    g[0][0] = &conformal * &p("1/(x^2-1)");
    g[1][1] = &conformal * &p("1/(1-y^2)");
    g[2][2] = &a * &p("(x^2-1)*(1-y^2)");
    g[3][3] = -p("(x-1)/(x+1)").pow(d).unwrap();
    let singular_locus = ["x-1", "x+1", "y-1", "y+1", "x-y", "x+y"]
        .iter()
        .map(|s| p(s).numer().clone())
        .collect();
    MetricSpec { name: format!("zipoy-voorhees(delta={})", params.delta), coords, g_lower: g, singular_locus }
}

impl MetricSpec {
    /// Parses the line-oriented metric format:
    ///
    /// ```text
    /// coords: x y phi t
    /// cyclic: phi t
    /// g 0 0 = (x^2-y^2)/(x^2-1)
    /// forbid = x^2 - y^2
    /// ```
    ///
    /// `#` starts a comment. Entries not given are zero; `g i j` fills `g j i` as well.
    pub fn parse(text: &str, name: &str) -> Result<Self, MetricError> {
        let mut names: Option<[String; 4]> = None;
        let mut cyclic: Option<[String; 2]> = None;
        let mut entries: Vec<(usize, usize, usize, String)> = Vec::new();
        let mut forbid: Vec<(usize, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| MetricError::Syntax { line: line_no, message: m.to_string() };
            if let Some(rest) = line.strip_prefix("coords:") {
                let w: Vec<String> = rest.split_whitespace().map(String::from).collect();
                names = Some(w.try_into().map_err(|_| err("`coords:` needs exactly 4 names"))?);
            } else if let Some(rest) = line.strip_prefix("cyclic:") {
                let w: Vec<String> = rest.split_whitespace().map(String::from).collect();
                cyclic = Some(w.try_into().map_err(|_| err("`cyclic:` needs exactly 2 names"))?);
            } else if let Some(rest) = line.strip_prefix("forbid") {
                let expr = rest.trim_start().strip_prefix('=').ok_or_else(|| err("expected `forbid = <expression>`"))?;
                forbid.push((line_no, expr.trim().to_string()));
            } else if let Some(rest) = line.strip_prefix("g ") {
                let (lhs, expr) = rest.split_once('=').ok_or_else(|| err("expected `g <i> <j> = <expression>`"))?;
                let idx: Vec<usize> = lhs
                    .split_whitespace()
                    .map(|s| s.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err("metric indices must be integers"))?;
                if idx.len() != 2 || idx[0] > 3 || idx[1] > 3 {
                    return Err(err("expected two indices in 0..=3"));
                }
                entries.push((line_no, idx[0], idx[1], expr.trim().to_string()));
            } else {
                return Err(err("unrecognized line"));
            }
        }
        let names = names.ok_or(MetricError::Syntax { line: 0, message: "missing `coords:` line".into() })?;
        let cyclic = cyclic.ok_or(MetricError::Syntax { line: 0, message: "missing `cyclic:` line".into() })?;
        let coords = Coordinates::new(names, [cyclic[0].as_str(), cyclic[1].as_str()])?;
        let v = coords.base_vars.clone();
        let mut g = zeros(&v);
        let mut set = [[false; 4]; 4];
        for (line, i, j, expr) in entries {
            let f = parse_rational_function(&expr, &v).map_err(|source| MetricError::Expression { line, source })?;
            if set[i][j] && g[i][j] != f {
                return Err(MetricError::NotSymmetric { i, j });
            }
            g[i][j] = f.clone();
            g[j][i] = f;
            set[i][j] = true;
            set[j][i] = true;
        }
        let mut singular_locus = Vec::new();
        for (line, expr) in forbid {
            let f = parse_rational_function(&expr, &v).map_err(|source| MetricError::Expression { line, source })?;
            singular_locus.push(f.numer().clone());
            if !f.denom().is_constant() {
                singular_locus.push(f.denom().clone());
            }
        }
        let m = MetricSpec { name: name.to_string(), coords, g_lower: g, singular_locus };
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self, MetricError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        for i in 0..4 {
            for j in 0..i {
                if self.g_lower[i][j] != self.g_lower[j][i] {
                    return Err(MetricError::NotSymmetric { i, j });
                }
            }
        }
        if determinant(&self.g_lower).is_zero() {
            return Err(MetricError::SingularDeterminant);
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self.g_lower[i][j].is_zero()))
    }

    /// Whether no entry couples a base coordinate with a cyclic one.
    pub fn is_block_diagonal(&self) -> bool {
        let s = &self.coords.slots;
        (0..2).all(|a| (2..4).all(|b| self.g_lower[s[a]][s[b]].is_zero()))
    }

    /// Errors if any declared singular-locus polynomial or metric denominator vanishes at the point.
    pub fn check_point(&self, point: &[Rational; 2]) -> Result<(), MetricError> {
        check_locus(&self.singular_locus, &self.g_lower, point)
    }
}

fn check_locus(
    locus: &[Polynomial],
    g: &[[RationalFunction; 4]; 4],
    point: &[Rational; 2],
) -> Result<(), MetricError> {
    for p in locus {
        if p.evaluate(point).is_zero() {
            return Err(MetricError::SingularPoint(p.to_string()));
        }
    }
    for row in g {
        for f in row {
            if f.denom().evaluate(point).is_zero() {
                return Err(MetricError::SingularPoint(f.denom().to_string()));
            }
        }
    }
    Ok(())
}

fn det3(m: &[[RationalFunction; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> RationalFunction {
    let e = |r: usize, c: usize| &m[rows[r]][cols[c]];
    let t1 = e(0, 0) * &(&(e(1, 1) * e(2, 2)) - &(e(1, 2) * e(2, 1)));
    let t2 = e(0, 1) * &(&(e(1, 0) * e(2, 2)) - &(e(1, 2) * e(2, 0)));
    let t3 = e(0, 2) * &(&(e(1, 0) * e(2, 1)) - &(e(1, 1) * e(2, 0)));
    &(&t1 - &t2) + &t3
}

fn others(k: usize) -> [usize; 3] {
    let v: Vec<usize> = (0..4).filter(|&i| i != k).collect();
    [v[0], v[1], v[2]]
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[[RationalFunction; 4]; 4]) -> RationalFunction {
    let v = m[0][0].vars().clone();
    let mut acc = RationalFunction::zero(v);
    for j in 0..4 {
        if m[0][j].is_zero() {
            continue;
        }
        let minor = det3(m, [1, 2, 3], others(j));
        let t = &m[0][j] * &minor;
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Exact inverse via the adjugate (reciprocals for diagonal metrics).
pub fn invert(m: &MetricSpec) -> Result<InverseMetric, MetricError> {
    let g_upper = invert_matrix(&m.g_lower)?;
    Ok(InverseMetric { coords: m.coords.clone(), g_upper, singular_locus: m.singular_locus.clone() })
}

fn invert_matrix(g: &[[RationalFunction; 4]; 4]) -> Result<[[RationalFunction; 4]; 4], MetricError> {
    let v = g[0][0].vars().clone();
    let mut out = zeros(&v);
    let diagonal = (0..4).all(|i| (0..4).all(|j| i == j || g[i][j].is_zero()));
    if diagonal {
        for i in 0..4 {
            out[i][i] = g[i][i].recip().map_err(|_| MetricError::SingularDeterminant)?;
        }
        return Ok(out);
    }
    let det = determinant(g);
    let inv_det = det.recip().map_err(|_| MetricError::SingularDeterminant)?;
    for i in 0..4 {
        for j in 0..4 {
            // (g^-1)_{ij} = (-1)^{i+j} M_{ji} / det
            let minor = det3(g, others(j), others(i));
            let c = &minor * &inv_det;
            out[i][j] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    Ok(out)
}

impl InverseMetric {
    /// Reinterpret the inverse as a metric (its inverse is the original metric).
    pub fn as_metric(&self, name: &str) -> MetricSpec {
        MetricSpec {
            name: name.to_string(),
            coords: self.coords.clone(),
            g_lower: self.g_upper.clone(),
            singular_locus: self.singular_locus.clone(),
        }
    }
}

/// `g_lower * g_upper`, for exact identity checks.
pub fn matrix_product(a: &[[RationalFunction; 4]; 4], b: &[[RationalFunction; 4]; 4]) -> [[RationalFunction; 4]; 4] {
    let v = a[0][0].vars().clone();
    let mut out = zeros(&v);
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = RationalFunction::zero(v.clone());
            for k in 0..4 {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    acc = &acc + &(&a[i][k] * &b[k][j]);
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// `H = 1/2 sum g^{ij} p_i p_j`, diagonal terms with factor 1/2 and each off-diagonal pair once.
pub fn hamiltonian(inv: &InverseMetric) -> Hamiltonian {
    let v = inv.coords.base_vars.clone();
    let slots = inv.coords.slots;
    let half = ratio(1, 2);
    let mut poly = MomentumPolynomial::zero(v);
    for a in 0..4 {
        for b in a..4 {
            let c = &inv.g_upper[slots[a]][slots[b]];
            let mut e = [0u32; 4];
            e[a] += 1;
            e[b] += 1;
            let coeff = if a == b { c.scale(&half) } else { c.clone() };
            poly.add_term(e, coeff);
        }
    }
    Hamiltonian { coords: inv.coords.clone(), poly, singular_locus: inv.singular_locus.clone() }
}

impl Hamiltonian {
    pub fn from_metric(m: &MetricSpec) -> Result<Self, MetricError> {
        Ok(hamiltonian(&invert(m)?))
    }

    /// True if no monomial has odd total degree in the cyclic momenta.
    pub fn is_cyclic_even(&self) -> bool {
        self.poly.terms().all(|(e, _)| (e[2] + e[3]) % 2 == 0)
    }

    /// Checks the singular locus and every coefficient denominator at the point.
    pub fn check_point(&self, point: &[Rational; 2]) -> Result<(), MetricError> {
        for p in &self.singular_locus {
            if p.evaluate(point).is_zero() {
                return Err(MetricError::SingularPoint(p.to_string()));
            }
        }
        for (_, c) in self.poly.terms() {
            if c.denom().evaluate(point).is_zero() {
                return Err(MetricError::SingularPoint(c.denom().to_string()));
            }
        }
        Ok(())
    }

    /// A short stable fingerprint of the Hamiltonian (used in cache keys).
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in self.poly.terms() {
            s.push_str(&format!("{:?}:{};", e, c));
        }
        s
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.poly.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for s in 0..4 {
                match e[s] {
                    0 => {}
                    1 => write!(f, "*{}", self.coords.momentum_name(s))?,
                    k => write!(f, "*{}^{}", self.coords.momentum_name(s), k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zv(d: u32) -> MetricSpec {
        builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: d })
    }

    fn rf(s: &str) -> RationalFunction {
        parse_rational_function(s, &vars(&["x", "y"])).unwrap()
    }

    #[test]
    fn flat_member() {
        let m = zv(0);
        assert_eq!(m.g_lower[3][3], rf("-1"));
        assert_eq!(m.g_lower[2][2], rf("(x^2-1)*(1-y^2)"));
        assert_eq!(m.g_lower[0][0], rf("(x^2-y^2)/(x^2-1)"));
        let inv = invert(&m).unwrap();
        assert_eq!(inv.g_upper[0][0], rf("(x^2-1)/(x^2-y^2)"));
    }

    #[test]
    fn delta_two_matches_closed_form() {
        let m = zv(2);
        assert_eq!(m.g_lower[3][3], rf("-((x-1)/(x+1))^2"));
        let gxx = rf("((x+1)/(x-1))^2 * (x^2-y^2) * ((x^2-1)/(x^2-y^2))^4 / (x^2-1)");
        assert_eq!(m.g_lower[0][0], gxx);
        let inv = invert(&m).unwrap();
        assert_eq!(inv.g_upper[3][3], rf("-((x+1)/(x-1))^2"));
    }

    #[test]
    fn schwarzschild_lapse() {
        // g_tt = -(x-1)/(x+1) = -(1 - 2M/r) with r = M(x+1)
        let m = zv(1);
        assert_eq!(m.g_lower[3][3], rf("-(x-1)/(x+1)"));
    }

    #[test]
    fn inverse_identity_for_family() {
        for d in 0..=3 {
            let m = zv(d);
            let inv = invert(&m).unwrap();
            let id = matrix_product(&m.g_lower, &inv.g_upper);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(id[i][j], rf(if i == j { "1" } else { "0" }));
                }
            }
            assert_eq!(invert(&inv.as_metric("inv")).unwrap().g_upper, m.g_lower);
        }
    }

    #[test]
    fn hamiltonian_structure() {
        let h = Hamiltonian::from_metric(&zv(2)).unwrap();
        assert_eq!(h.poly.len(), 4);
        assert!(h.is_cyclic_even());
        let h0 = Hamiltonian::from_metric(&zv(0)).unwrap();
        let c = h0.poly.coefficient(&[0, 0, 0, 2]).unwrap();
        assert_eq!(c.evaluate(&[ratio(1, 2), int(2)]).unwrap(), ratio(-1, 2));
    }

    #[test]
    fn general_inverse_with_off_diagonal() {
        let text = "coords: r th phi t\ncyclic: phi t\ng 0 0 = 1\ng 1 1 = r^2\ng 2 2 = r^2*th\ng 2 3 = r\ng 3 3 = -1\n";
        let m = MetricSpec::parse(text, "test").unwrap();
        assert!(!m.is_diagonal());
        assert!(m.is_block_diagonal());
        let inv = invert(&m).unwrap();
        let id = matrix_product(&m.g_lower, &inv.g_upper);
        let v = m.coords.base_vars.clone();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(id[i][j], RationalFunction::from_int(v.clone(), (i == j) as i64));
            }
        }
        let h = hamiltonian(&inv);
        assert!(h.poly.coefficient(&[0, 0, 1, 1]).is_some());
        assert!(h.is_cyclic_even());
    }

    #[test]
    fn metric_file_errors() {
        assert!(matches!(
            MetricSpec::parse("coords: x y phi t\ncyclic: phi t\ng 0 0 = phi\n", "m"),
            Err(MetricError::Expression { line: 3, source: RatExprError::UnknownVariable { .. } })
        ));
        assert!(matches!(
            MetricSpec::parse("coords: x y phi t\ncyclic: phi t\ng 0 0 = 1\n", "m"),
            Err(MetricError::SingularDeterminant)
        ));
        assert!(matches!(MetricSpec::parse("coords: x y\n", "m"), Err(MetricError::Syntax { line: 1, .. })));
        assert!(ZipoyVoorheesParams::parse("-1").is_err());
        assert!(ZipoyVoorheesParams::parse("1/2").is_err());
        assert_eq!(ZipoyVoorheesParams::parse("2").unwrap().delta, 2);
    }

    #[test]
    fn singular_point_rejected() {
        let m = zv(2);
        assert!(m.check_point(&[ratio(1, 2), int(2)]).is_ok());
        assert!(matches!(m.check_point(&[int(2), int(2)]), Err(MetricError::SingularPoint(_))));
        assert!(matches!(m.check_point(&[int(1), int(3)]), Err(MetricError::SingularPoint(_))));
    }
}
