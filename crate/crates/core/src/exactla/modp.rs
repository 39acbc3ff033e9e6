//! Word-size arithmetic modulo 60-bit primes (Montgomery form) and row reduction over GF(p).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Montgomery arithmetic for an odd modulus below 2^63. All values handled by the reduction
/// routines stay in Montgomery form; zero is zero in both forms, which is all rank needs.
#[derive(Clone, Copy, Debug)]
pub struct MontgomeryField {
    p: u64,
    ninv: u64,
    r2: u64,
}

impl MontgomeryField {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1 && p < (1 << 63), "Montgomery modulus must be odd and below 2^63");
        // Newton iteration for p^-1 mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        MontgomeryField { p, ninv: inv.wrapping_neg(), r2 }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let r = a.mod_floor(&BigInt::from(self.p)).to_u64().unwrap();
        self.to_mont(r)
    }

    /// Inverse of a nonzero Montgomery-form value.
    pub fn inv(&self, a: u64) -> u64 {
        let x = self.from_mont(a);
        assert!(x != 0, "inverse of zero");
        self.to_mont(pow_mod(x, self.p - 2, self.p))
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `count` distinct random primes in `[2^59, 2^60)`, reproducible from `seed`.
pub fn random_primes(count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range((1u64 << 59)..(1u64 << 60)) | 1;
        if is_prime_u64(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Row echelon form over GF(p) built incrementally; pivot rows are normalized to a leading one
/// and stored from their leading column onward.
pub struct EchelonModP {
    pub field: MontgomeryField,
    pub cols: usize,
    /// (leading column, original row index, entries from the leading column on)
    pub pivots: Vec<(usize, usize, Vec<u64>)>,
    pivot_of_col: Vec<Option<usize>>,
}

impl EchelonModP {
    pub fn new(field: MontgomeryField, cols: usize) -> Self {
        EchelonModP { field, cols, pivots: Vec::new(), pivot_of_col: vec![None; cols] }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` (dense, Montgomery form) and installs it as a pivot if it is independent.
    pub fn insert(&mut self, mut row: Vec<u64>, origin: usize) -> bool {
        let f = self.field;
        let mut c = 0;
        while c < self.cols {
            let a = row[c];
            if a != 0 {
                match self.pivot_of_col[c] {
                    Some(k) => {
                        let piv = &self.pivots[k].2;
                        for (dst, &src) in row[c..].iter_mut().zip(piv) {
                            if src != 0 {
                                *dst = f.sub(*dst, f.mul(a, src));
                            }
                        }
                    }
                    None => {
                        let inv = f.inv(a);
                        let tail: Vec<u64> = row[c..].iter().map(|&v| if v == 0 { 0 } else { f.mul(v, inv) }).collect();
                        self.pivot_of_col[c] = Some(self.pivots.len());
                        self.pivots.push((c, origin, tail));
                        return true;
                    }
                }
            }
            c += 1;
        }
        false
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pivots.iter().map(|p| p.0).collect();
        v.sort_unstable();
        v
    }

    /// Reduced row echelon form: pivot rows sorted by column, each zero in all other pivot columns.
    /// Returns `(pivot column, original row, full-width row)` triples.
    pub fn reduced(&self) -> Vec<(usize, usize, Vec<u64>)> {
        let f = self.field;
        let mut rows: Vec<(usize, usize, Vec<u64>)> = self
            .pivots
            .iter()
            .map(|(c, o, tail)| {
                let mut full = vec![0u64; self.cols];
                full[*c..].copy_from_slice(tail);
                (*c, *o, full)
            })
            .collect();
        rows.sort_by_key(|r| r.0);
        for k in (0..rows.len()).rev() {
            let (ck, _, _) = rows[k];
            let (head, tail) = rows.split_at_mut(k);
            let pk = &tail[0].2;
            for r in head.iter_mut() {
                let a = r.2[ck];
                if a != 0 {
                    for j in ck..self.cols {
                        if pk[j] != 0 {
                            r.2[j] = f.sub(r.2[j], f.mul(a, pk[j]));
                        }
                    }
                }
            }
        }
        rows
    }
}

/// Reduce an integer row into dense Montgomery form.
pub fn reduce_row(field: &MontgomeryField, row: &[(usize, BigInt)], cols: usize) -> Vec<u64> {
    let mut dense = vec![0u64; cols];
    for (c, v) in row {
        if !v.is_zero() {
            dense[*c] = field.from_bigint(v);
        }
    }
    dense
}

/// Inverse of a square matrix over GF(p) (Montgomery form in and out), or `None` if singular.
pub fn invert_mod_p(field: &MontgomeryField, m: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let f = *field;
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.resize(2 * n, 0);
            r[n + i] = f.one();
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = f.inv(a[col][col]);
        for v in a[col].iter_mut() {
            if *v != 0 {
                *v = f.mul(*v, inv);
            }
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col {
                continue;
            }
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            for j in col..2 * n {
                if pivot_row[j] != 0 {
                    row[j] = f.sub(row[j], f.mul(factor, pivot_row[j]));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montgomery_matches_naive() {
        let p = random_primes(1, 7)[0];
        let f = MontgomeryField::new(p);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a = rng.gen_range(0..p);
            let b = rng.gen_range(0..p);
            let prod = f.from_mont(f.mul(f.to_mont(a), f.to_mont(b)));
            assert_eq!(prod, mul_mod(a, b, p));
            if a != 0 {
                let ia = f.inv(f.to_mont(a));
                assert_eq!(f.from_mont(f.mul(ia, f.to_mont(a))), 1);
            }
        }
        assert_eq!(f.from_bigint(&BigInt::from(-1)), f.to_mont(p - 1));
    }

    #[test]
    fn primes_are_prime_and_sized() {
        let ps = random_primes(4, 42);
        assert_eq!(ps, random_primes(4, 42));
        for p in ps {
            assert!(is_prime_u64(p));
            assert!((1 << 59..1 << 60).contains(&p));
        }
        assert!(!is_prime_u64(561));
        assert!(is_prime_u64(65537));
    }

    #[test]
    fn small_inverse() {
        let f = MontgomeryField::new(1_000_000_007);
        let m: Vec<Vec<u64>> = vec![vec![2, 1], vec![1, 1]].into_iter().map(|r: Vec<u64>| r.into_iter().map(|v| f.to_mont(v)).collect()).collect();
        let inv = invert_mod_p(&f, &m).unwrap();
        let plain: Vec<Vec<u64>> = inv.iter().map(|r| r.iter().map(|&v| f.from_mont(v)).collect()).collect();
        assert_eq!(plain, vec![vec![1, 1_000_000_006], vec![1_000_000_006, 2]]);
    }
}
