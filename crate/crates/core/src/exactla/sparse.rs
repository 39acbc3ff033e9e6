//! Row-major sparse matrices over the rationals and the triplet text format.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LinAlgError;
use crate::ratexpr::{format_rational, parse_rational, Rational};

/// Sparse rational matrix; each row holds `(column, value)` pairs sorted by column, no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl SparseRationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseRationalMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    /// Build from rows of `(column, value)` pairs in any order; zeros are dropped and
    /// duplicate columns summed.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Result<Self, LinAlgError> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            for (c, v) in r {
                m.add_entry(i, c, v)?;
            }
        }
        Ok(m)
    }

    pub fn from_dense(d: &[Vec<Rational>]) -> Self {
        let cols = d.first().map_or(0, |r| r.len());
        let data = d
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect())
            .collect();
        SparseRationalMatrix { rows: d.len(), cols, data }
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: Rational) -> Result<(), LinAlgError> {
        if r >= self.rows || c >= self.cols {
            return Err(LinAlgError::IndexOutOfRange { row: r, col: c, rows: self.rows, cols: self.cols });
        }
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(k) => {
                row[k].1 += v;
                if row[k].1.is_zero() {
                    row.remove(k);
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (c, v));
                }
            }
        }
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, Rational)]> {
        self.data.iter().map(|r| r.as_slice())
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.data[r][k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (i, r) in self.data.iter().enumerate() {
            for (c, v) in r {
                d[i][*c] = v.clone();
            }
        }
        d
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|r| r.iter().fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c]))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (c, v) in r {
                data[*c].push((i, v.clone()));
            }
        }
        SparseRationalMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Rows stacked below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        SparseRationalMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Each row multiplied by the positive rational making it a primitive integer row.
    /// Rank and kernel are unchanged.
    pub fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        self.data.iter().map(|r| primitive_integer_row(r)).collect()
    }

    /// Serialize as `rows cols nnz` followed by one `row col num/den` line per nonzero
    /// (zero-based, row-major).
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for (i, r) in self.data.iter().enumerate() {
            for (c, v) in r {
                writeln!(s, "{} {} {}", i, c, format_rational(v)).unwrap();
            }
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<Self, LinAlgError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let bad = |line: usize, msg: &str| LinAlgError::Format { line: line + 1, message: msg.to_string() };
        let (hl, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(hl, "header must be `rows cols nnz`"))?;
        if h.len() != 3 {
            return Err(bad(hl, "header must be `rows cols nnz`"));
        }
        let mut m = Self::zeros(h[0], h[1]);
        let mut count = 0;
        for (ln, l) in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(bad(ln, "expected `row col value`"));
            }
            let r: usize = t[0].parse().map_err(|_| bad(ln, "bad row index"))?;
            let c: usize = t[1].parse().map_err(|_| bad(ln, "bad column index"))?;
            let v = parse_rational(t[2]).map_err(|e| bad(ln, &e.to_string()))?;
            m.add_entry(r, c, v)?;
            count += 1;
        }
        if count != h[2] {
            return Err(bad(hl, &format!("header declares {} entries, found {}", h[2], count)));
        }
        Ok(m)
    }
}

pub(crate) fn primitive_integer_row(r: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let mut l = BigInt::one();
    for (_, v) in r {
        l = l.lcm(v.denom());
    }
    let mut out: Vec<(usize, BigInt)> = r.iter().map(|(c, v)| (*c, v.numer() * (&l / v.denom()))).collect();
    make_primitive(&mut out);
    out
}

/// Divide an integer row by the gcd of its entries.
pub(crate) fn make_primitive(row: &mut [(usize, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    let g = g.abs();
    for (_, v) in row.iter_mut() {
        *v = &*v / &g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{int, ratio};

    #[test]
    fn triplet_round_trip() {
        let m = SparseRationalMatrix::from_dense(&[vec![int(1), int(0), ratio(-3, 4)], vec![int(0), int(0), int(0)], vec![ratio(5, 2), int(7), int(0)]]);
        let t = m.to_triplets();
        assert!(t.starts_with("3 3 4\n0 0 1\n0 2 -3/4\n"));
        assert_eq!(SparseRationalMatrix::from_triplets(&t).unwrap(), m);
    }

    #[test]
    fn triplet_errors() {
        assert!(matches!(SparseRationalMatrix::from_triplets("2 2 1\n5 0 1\n"), Err(LinAlgError::IndexOutOfRange { .. })));
        assert!(matches!(SparseRationalMatrix::from_triplets("2 2 2\n0 0 1\n"), Err(LinAlgError::Format { .. })));
        assert!(matches!(SparseRationalMatrix::from_triplets("2 2\n"), Err(LinAlgError::Format { .. })));
    }

    #[test]
    fn primitive_rows() {
        let r = vec![(0, ratio(2, 3)), (4, ratio(-4, 9))];
        assert_eq!(primitive_integer_row(&r), vec![(0, BigInt::from(3)), (4, BigInt::from(-2))]);
    }
}
