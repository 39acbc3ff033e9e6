//! The first-order linear PDE system expressing `{H, I} = 0` for a homogeneous momentum ansatz.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::metric::Hamiltonian;
use crate::momentum::{MomentumExponents, MomentumPolynomial};
use crate::ratexpr::{int, RationalFunction, Vars};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdeError {
    #[error("ansatz degree must be at least 1")]
    ZeroDegree,
    #[error("Hamiltonian coefficient of {0} depends on a variable other than the base coordinates")]
    NonBaseDependence(String),
    #[error("equation {tag} mixes unknowns of both parities; the metric couples base and cyclic momenta")]
    MixedParity { tag: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(e: &MomentumExponents) -> Self {
        if (e[2] + e[3]).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Exponents `(i, j, k, m)` of `p_q1^i p_q2^j p_c1^k p_c2^m` in the ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnsatzIndex(pub MomentumExponents);

impl AnsatzIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn parity(&self) -> Parity {
        Parity::of(&self.0)
    }
}

impl fmt::Display for AnsatzIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.0;
        if e.iter().all(|&k| k < 10) {
            write!(f, "I_{}{}{}{}", e[0], e[1], e[2], e[3])
        } else {
            write!(f, "I_{{{},{},{},{}}}", e[0], e[1], e[2], e[3])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unknown {
    pub index: AnsatzIndex,
    pub parity: Parity,
}

impl Unknown {
    pub fn new(index: AnsatzIndex) -> Self {
        Unknown { index, parity: index.parity() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Deriv {
    Value,
    Dx,
    Dy,
}

impl Deriv {
    pub fn multi_index(self) -> (u32, u32) {
        match self {
            Deriv::Value => (0, 0),
            Deriv::Dx => (1, 0),
            Deriv::Dy => (0, 1),
        }
    }
}

/// `coefficient * D(unknown)`; `unknown` indexes the owning system's unknown list.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeTerm {
    pub unknown: usize,
    pub derivative: Deriv,
    pub coefficient: RationalFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdeEquation {
    /// The momentum monomial whose coefficient in `{H, I}` this equation is.
    pub tag: MomentumExponents,
    pub terms: Vec<PdeTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemParity {
    Odd,
    Even,
    Mixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearPdeSystem {
    pub vars: Vars,
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<PdeEquation>,
    pub parity: SystemParity,
}

/// All exponent vectors of total `degree`, in lexicographic order on `(i, j, k, m)`.
pub fn enumerate_ansatz(degree: u32) -> Vec<AnsatzIndex> {
    monomials(degree).into_iter().map(AnsatzIndex).collect()
}

fn monomials(degree: u32) -> Vec<MomentumExponents> {
    let mut out = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            for k in 0..=degree - i - j {
                out.push([i, j, k, degree - i - j - k]);
            }
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Expands `{H, I}` for the general degree-`degree` ansatz into one equation per momentum
/// monomial of degree `degree + 1` (`C(degree+4, 3)` equations on `C(degree+3, 3)` unknowns).
pub fn poisson_bracket_system(h: &Hamiltonian, degree: u32) -> Result<LinearPdeSystem, PdeError> {
    if degree == 0 {
        return Err(PdeError::ZeroDegree);
    }
    let vars = h.coords.base_vars.clone();
    for (e, c) in h.poly.terms() {
        if c.vars().len() != 2 || *c.vars() != vars {
            return Err(PdeError::NonBaseDependence(format!("{:?}", e)));
        }
    }
    let unknowns: Vec<Unknown> = enumerate_ansatz(degree).into_iter().map(Unknown::new).collect();
    let tags = monomials(degree + 1);
    let tag_pos: BTreeMap<MomentumExponents, usize> = tags.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut acc: Vec<BTreeMap<(usize, Deriv), RationalFunction>> = vec![BTreeMap::new(); tags.len()];

    let dh: [MomentumPolynomial; 2] = [h.poly.d_coordinate(0), h.poly.d_coordinate(1)];
    let derivs = [Deriv::Dx, Deriv::Dy];
    let mut push = |tag: MomentumExponents, key: (usize, Deriv), c: RationalFunction| {
        let slot = &mut acc[tag_pos[&tag]];
        let sum = match slot.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            slot.insert(key, sum);
        }
    };
    for (u, unk) in unknowns.iter().enumerate() {
        let ue = unk.index.0;
        for v in 0..2 {
            // dH/dq_v * dI/dp_v
            if ue[v] > 0 {
                for (e, c) in dh[v].terms() {
                    let mut tag = add(e, &ue);
                    tag[v] -= 1;
                    push(tag, (u, Deriv::Value), c.scale(&int(ue[v] as i64)));
                }
            }
            // - dH/dp_v * dI/dq_v
            for (e, c) in h.poly.terms() {
                if e[v] == 0 {
                    continue;
                }
                let mut tag = add(e, &ue);
                tag[v] -= 1;
                push(tag, (u, derivs[v]), c.scale(&int(-(e[v] as i64))));
            }
        }
    }
    let equations = tags
        .into_iter()
        .zip(acc)
        .map(|(tag, terms)| PdeEquation {
            tag,
            terms: terms
                .into_iter()
                .map(|((unknown, derivative), coefficient)| PdeTerm { unknown, derivative, coefficient })
                .collect(),
        })
        .collect();
    Ok(LinearPdeSystem { vars, unknowns, equations, parity: SystemParity::Mixed })
}

fn add(a: &MomentumExponents, b: &MomentumExponents) -> MomentumExponents {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Partition by the cyclic-degree parity of each equation's monomial.
pub fn split_parity(s: &LinearPdeSystem) -> Result<(LinearPdeSystem, LinearPdeSystem), PdeError> {
    let sub = |p: Parity| -> Result<LinearPdeSystem, PdeError> {
        let keep: Vec<usize> = (0..s.unknowns.len()).filter(|&u| s.unknowns[u].parity == p).collect();
        let mut remap = vec![usize::MAX; s.unknowns.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let mut equations = Vec::new();
        for eq in s.equations.iter().filter(|e| Parity::of(&e.tag) == p) {
            let mut terms = Vec::with_capacity(eq.terms.len());
            for t in &eq.terms {
                if s.unknowns[t.unknown].parity != p {
                    return Err(PdeError::MixedParity { tag: format!("{:?}", eq.tag) });
                }
                terms.push(PdeTerm { unknown: remap[t.unknown], ..t.clone() });
            }
            equations.push(PdeEquation { tag: eq.tag, terms });
        }
        Ok(LinearPdeSystem {
            vars: s.vars.clone(),
            unknowns: keep.iter().map(|&u| s.unknowns[u]).collect(),
            equations,
            parity: match p {
                Parity::Odd => SystemParity::Odd,
                Parity::Even => SystemParity::Even,
            },
        })
    };
    Ok((sub(Parity::Odd)?, sub(Parity::Even)?))
}

impl LinearPdeSystem {
    pub fn degree(&self) -> u32 {
        self.unknowns.first().map(|u| u.index.degree()).unwrap_or(0)
    }

    pub fn unknown_position(&self, index: &AnsatzIndex) -> Option<usize> {
        self.unknowns.iter().position(|u| u.index == *index)
    }

    /// Applies the system to concrete coefficient functions (one per unknown), returning the
    /// residual of every equation. A solution gives all zeros.
    pub fn residuals(&self, values: &[RationalFunction]) -> Vec<RationalFunction> {
        self.equations
            .iter()
            .map(|eq| {
                let mut acc = RationalFunction::zero(self.vars.clone());
                for t in &eq.terms {
                    let f = &values[t.unknown];
                    let d = match t.derivative {
                        Deriv::Value => f.clone(),
                        Deriv::Dx => f.derivative(0),
                        Deriv::Dy => f.derivative(1),
                    };
                    acc = &acc + &(&t.coefficient * &d);
                }
                acc
            })
            .collect()
    }

    /// Plain-text dump, one equation per line: `[monomial] coeff*D(I_ijkm) + ...`.
    pub fn dump(&self, momentum_names: &[String; 4]) -> String {
        let mut out = String::new();
        for eq in &self.equations {
            let mono: Vec<String> = (0..4)
                .filter(|&s| eq.tag[s] > 0)
                .map(|s| {
                    if eq.tag[s] == 1 {
                        momentum_names[s].clone()
                    } else {
                        format!("{}^{}", momentum_names[s], eq.tag[s])
                    }
                })
                .collect();
            let _ = write!(out, "[{}]", mono.join("*"));
            if eq.terms.is_empty() {
                out.push_str(" 0");
            }
            for (i, t) in eq.terms.iter().enumerate() {
                let d = match t.derivative {
                    Deriv::Value => "D",
                    Deriv::Dx => "Dx",
                    Deriv::Dy => "Dy",
                };
                let sep = if i == 0 { " " } else { " + " };
                let _ = write!(out, "{}({})*{}({})", sep, t.coefficient, d, self.unknowns[t.unknown].index);
            }
            out.push('\n');
        }
        out
    }
}

/// Coefficient functions of a momentum polynomial laid out in the system's unknown order.
pub fn coefficients_for(system: &LinearPdeSystem, p: &MomentumPolynomial) -> Vec<RationalFunction> {
    system
        .unknowns
        .iter()
        .map(|u| {
            p.coefficient(&u.index.0)
                .cloned()
                .unwrap_or_else(|| RationalFunction::zero(system.vars.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{builtin_zipoy_voorhees, Hamiltonian, ZipoyVoorheesParams};

    fn ham(d: u32) -> Hamiltonian {
        Hamiltonian::from_metric(&builtin_zipoy_voorhees(ZipoyVoorheesParams { delta: d })).unwrap()
    }

    #[test]
    fn ansatz_counts() {
        assert_eq!(enumerate_ansatz(6).len(), 84);
        assert_eq!(enumerate_ansatz(1).len(), 4);
        let odd = enumerate_ansatz(6).iter().filter(|a| a.parity() == Parity::Odd).count();
        assert_eq!((odd, 84 - odd), (40, 44));
        let a = enumerate_ansatz(3);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn equation_counts() {
        let h = ham(2);
        let s = poisson_bracket_system(&h, 1).unwrap();
        assert_eq!((s.equations.len(), s.unknowns.len()), (10, 4));
        for d in 1..=4u32 {
            let s = poisson_bracket_system(&h, d).unwrap();
            assert_eq!(s.equations.len() as u64, binomial(d as u64 + 4, 3));
        }
        assert_eq!(poisson_bracket_system(&h, 0), Err(PdeError::ZeroDegree));
    }

    #[test]
    fn degree_two_parity_split() {
        let s = poisson_bracket_system(&ham(2), 2).unwrap();
        let (odd, even) = split_parity(&s).unwrap();
        assert_eq!(even.unknowns.len(), 6);
        assert_eq!(odd.unknowns.len(), 4);
        assert_eq!(odd.equations.len() + even.equations.len(), s.equations.len());
        assert!(even.unknowns.iter().all(|u| u.parity == Parity::Even));
    }

    #[test]
    fn constant_cyclic_momentum_square_is_a_solution() {
        let h = ham(0);
        let s = poisson_bracket_system(&h, 2).unwrap();
        let v = s.vars.clone();
        let pt2 = MomentumPolynomial::monomial(v.clone(), [0, 0, 0, 2], RationalFunction::one(v));
        let r = s.residuals(&coefficients_for(&s, &pt2));
        assert!(r.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn hamiltonian_itself_solves_its_system() {
        let h = ham(2);
        let s = poisson_bracket_system(&h, 2).unwrap();
        let r = s.residuals(&coefficients_for(&s, &h.poly));
        assert!(r.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn dump_format() {
        let s = poisson_bracket_system(&ham(0), 1).unwrap();
        let names = ["p_x", "p_y", "p_phi", "p_t"].map(String::from);
        let text = s.dump(&names);
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().all(|l| l.starts_with('[')));
        assert!(text.contains("Dx(I_1000)"));
    }
}
