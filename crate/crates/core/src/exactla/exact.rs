//! Exact rank and kernel over the rationals by integer (fraction-free) elimination.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::sparse::{make_primitive, SparseRationalMatrix};
use crate::ratexpr::Rational;

type IntRow = Vec<(usize, BigInt)>;

/// `a*r - b*s` for sorted sparse integer rows.
fn combine(a: &BigInt, r: &IntRow, b: &BigInt, s: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + s.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < s.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = s.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, a * &r[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(b * &s[j].1)));
            j += 1;
        } else {
            let v = a * &r[i].1 - b * &s[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn entry(r: &IntRow, c: usize) -> Option<&BigInt> {
    r.binary_search_by_key(&c, |e| e.0).ok().map(|k| &r[k].1)
}

/// Integer echelon structure: every pivot row is zero in the pivot columns of all earlier pivots.
pub(crate) struct IntegerEchelon {
    pub pivots: Vec<(usize, IntRow)>,
    pivot_of_col: HashMap<usize, usize>,
}

impl IntegerEchelon {
    fn new() -> Self {
        IntegerEchelon { pivots: Vec::new(), pivot_of_col: HashMap::new() }
    }

    /// Eliminate every pivot column from `r`, in pivot insertion order.
    fn reduce(&self, mut r: IntRow) -> IntRow {
        loop {
            let next = r.iter().filter_map(|(c, _)| self.pivot_of_col.get(c).copied()).min();
            let Some(k) = next else { return r };
            let (c, piv) = &self.pivots[k];
            let a = entry(piv, *c).unwrap();
            let b = entry(&r, *c).unwrap();
            let g = num_integer::Integer::gcd(a, b);
            r = combine(&(a / &g), &r, &(b / &g), piv);
            make_primitive(&mut r);
        }
    }
}

/// Rank by fraction-free sparse elimination. Rows are processed sparsest first and each new
/// pivot column is the one of least remaining column count (ties: smallest entry).
pub fn rank_exact(m: &SparseRationalMatrix) -> usize {
    echelon(m).pivots.len()
}

pub(crate) fn echelon(m: &SparseRationalMatrix) -> IntegerEchelon {
    let rows = m.integer_rows();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].len(), i));
    let mut col_count = vec![0usize; m.ncols()];
    for r in &rows {
        for (c, _) in r {
            col_count[*c] += 1;
        }
    }
    let mut ech = IntegerEchelon::new();
    for i in order {
        for (c, _) in &rows[i] {
            col_count[*c] -= 1;
        }
        let r = ech.reduce(rows[i].clone());
        if r.is_empty() {
            continue;
        }
        let (pc, _) = r
            .iter()
            .min_by_key(|(c, v)| (col_count[*c], v.bits(), *c))
            .map(|(c, v)| (*c, v.clone()))
            .unwrap();
        ech.pivot_of_col.insert(pc, ech.pivots.len());
        ech.pivots.push((pc, r));
    }
    ech
}

/// Exact kernel basis by rational Gauss-Jordan elimination. Suited to small and medium sizes.
pub fn kernel_exact(m: &SparseRationalMatrix) -> Vec<Vec<Rational>> {
    let ech = echelon(m);
    let cols = m.ncols();
    // back-substitute to reduced form on the pivot columns
    let mut rows: Vec<(usize, Vec<(usize, BigInt)>)> = ech.pivots;
    let n = rows.len();
    for k in (0..n).rev() {
        let (ck, pk) = rows[k].clone();
        let a = entry(&pk, ck).unwrap().clone();
        for j in 0..n {
            if j == k {
                continue;
            }
            if let Some(b) = entry(&rows[j].1, ck).cloned() {
                let g = num_integer::Integer::gcd(&a, &b);
                let mut nr = combine(&(&a / &g), &rows[j].1, &(&b / &g), &pk);
                make_primitive(&mut nr);
                rows[j].1 = nr;
            }
        }
    }
    let mut is_pivot = vec![false; cols];
    for (c, _) in &rows {
        is_pivot[*c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|c| !is_pivot[*c]) {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::from_integer(1.into());
        for (c, r) in &rows {
            if let Some(b) = entry(r, f) {
                let a = entry(r, *c).unwrap();
                v[*c] = -Rational::new(b.clone(), a.clone());
            }
        }
        basis.push(v);
    }
    basis
}

/// Scale a rational vector to a primitive integer vector with positive first nonzero entry.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let sparse: Vec<(usize, Rational)> = v.iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect();
    let mut ints = super::sparse::primitive_integer_row(&sparse);
    if ints.first().is_some_and(|(_, x)| x.is_negative()) {
        for (_, x) in ints.iter_mut() {
            *x = -&*x;
        }
    }
    let mut out = vec![BigInt::zero(); v.len()];
    for (c, x) in ints {
        out[c] = x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{int, ratio};

    fn m(d: &[&[i64]]) -> SparseRationalMatrix {
        SparseRationalMatrix::from_dense(&d.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_exact(&m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
        assert_eq!(rank_exact(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_exact(&m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]])), 3);
        let h = SparseRationalMatrix::from_dense(&(1..=5).map(|i| (1..=5).map(|j| ratio(1, i + j - 1)).collect()).collect::<Vec<_>>());
        assert_eq!(rank_exact(&h), 5);
    }

    #[test]
    fn kernel_is_kernel() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 1]]);
        let k = kernel_exact(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }
}
