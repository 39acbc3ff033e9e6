//! Rational kernel reconstruction by p-adic (Dixon) lifting from a modular echelon form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::{invert_mod_p, EchelonModP, MontgomeryField};
use crate::ratexpr::Rational;

type IntRow = Vec<(usize, BigInt)>;

/// Smallest-height rational congruent to `u` modulo `m`, if one with numerator and denominator
/// below `sqrt(m/2)` exists.
pub fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

fn verify(rows: &[IntRow], v: &[BigInt]) -> bool {
    rows.iter().all(|r| r.iter().fold(BigInt::zero(), |acc, (c, a)| acc + a * &v[*c]).is_zero())
}

/// Lift the kernel described by a modular echelon form to exact rational vectors.
///
/// The pivot rows and columns of `ech` select a nonsingular square block; each free column
/// yields one kernel vector. Returns integer vectors verified against every row of `rows`,
/// or `None` if lifting did not stabilise within `max_steps` or verification failed
/// (which happens when the prime was unlucky).
pub fn lift_kernel(rows: &[IntRow], ech: &EchelonModP, max_steps: usize) -> Option<Vec<Vec<BigInt>>> {
    let f: MontgomeryField = ech.field;
    let p = BigInt::from(f.modulus());
    let cols = ech.cols;
    let mut piv: Vec<(usize, usize)> = ech.pivots.iter().map(|(c, o, _)| (*c, *o)).collect();
    piv.sort_unstable();
    let r = piv.len();
    let mut pos_of_col = vec![usize::MAX; cols];
    for (k, (c, _)) in piv.iter().enumerate() {
        pos_of_col[*c] = k;
    }
    let free: Vec<usize> = (0..cols).filter(|c| pos_of_col[*c] == usize::MAX).collect();
    if free.is_empty() {
        return Some(Vec::new());
    }
    let mut free_pos = vec![usize::MAX; cols];
    for (k, c) in free.iter().enumerate() {
        free_pos[*c] = k;
    }
    // square block A_RP (sparse, integer) and right-hand side -A_RF
    let mut a_rp: Vec<Vec<(usize, BigInt)>> = Vec::with_capacity(r);
    let mut b: Vec<Vec<BigInt>> = Vec::with_capacity(r);
    for (_, o) in &piv {
        let mut ap = Vec::new();
        let mut bf = vec![BigInt::zero(); free.len()];
        for (c, v) in &rows[*o] {
            if pos_of_col[*c] != usize::MAX {
                ap.push((pos_of_col[*c], v.clone()));
            } else {
                bf[free_pos[*c]] = -v;
            }
        }
        a_rp.push(ap);
        b.push(bf);
    }
    let mut dense = vec![vec![0u64; r]; r];
    for (i, row) in a_rp.iter().enumerate() {
        for (k, v) in row {
            dense[i][*k] = f.from_bigint(v);
        }
    }
    let cinv = invert_mod_p(&f, &dense)?;
    drop(dense);

    let nf = free.len();
    let mut acc = vec![vec![BigInt::zero(); nf]; r];
    let mut modulus = BigInt::one();
    let mut next_try = 1usize;
    for step in 1..=max_steps {
        // X = C * (B mod p) mod p
        let bm: Vec<Vec<u64>> = b.iter().map(|row| row.iter().map(|v| f.from_bigint(v)).collect()).collect();
        let mut x = vec![vec![0u64; nf]; r];
        for i in 0..r {
            let ci = &cinv[i];
            let xi = &mut x[i];
            for (k, &cik) in ci.iter().enumerate() {
                if cik == 0 {
                    continue;
                }
                for (xj, &bkj) in xi.iter_mut().zip(&bm[k]) {
                    if bkj != 0 {
                        *xj = f.add(*xj, f.mul(cik, bkj));
                    }
                }
            }
        }
        let xs: Vec<Vec<u64>> = x.iter().map(|row| row.iter().map(|&v| f.from_mont(v)).collect()).collect();
        // B <- (B - A_RP X) / p
        for (i, row) in a_rp.iter().enumerate() {
            for (k, a) in row {
                for j in 0..nf {
                    if xs[*k][j] != 0 {
                        b[i][j] -= a * xs[*k][j];
                    }
                }
            }
            for v in b[i].iter_mut() {
                debug_assert!((&*v % &p).is_zero());
                *v = &*v / &p;
            }
        }
        for i in 0..r {
            for j in 0..nf {
                if xs[i][j] != 0 {
                    acc[i][j] += &modulus * xs[i][j];
                }
            }
        }
        modulus *= &p;
        if step == next_try || step == max_steps {
            next_try = (next_try * 3).div_ceil(2).max(next_try + 1);
            if let Some(sol) = reconstruct_all(&acc, &modulus, nf) {
                let vecs: Vec<Vec<BigInt>> = (0..nf)
                    .map(|j| {
                        let mut v = vec![Rational::zero(); cols];
                        v[free[j]] = Rational::one();
                        for (k, (c, _)) in piv.iter().enumerate() {
                            v[*c] = sol[k][j].clone();
                        }
                        super::exact::primitive_integer_vector(&v)
                    })
                    .collect();
                if vecs.iter().all(|v| verify(rows, v)) {
                    return Some(vecs);
                }
            }
        }
    }
    None
}

/// Reconstruct each column with a running common denominator, keeping intermediate heights small.
fn reconstruct_all(acc: &[Vec<BigInt>], m: &BigInt, nf: usize) -> Option<Vec<Vec<Rational>>> {
    let r = acc.len();
    let mut out = vec![vec![Rational::zero(); nf]; r];
    for j in 0..nf {
        let mut den = BigInt::one();
        for i in 0..r {
            let w = (&acc[i][j] * &den).mod_floor(m);
            let q = rational_reconstruct(&w, m)?;
            out[i][j] = &q / Rational::from_integer(den.clone());
            den *= q.denom();
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruct_small_fraction() {
        let m = BigInt::from(1_000_000_007u64);
        // 3/7 mod m
        let inv7 = BigInt::from(7).modpow(&(&m - 2u32), &m);
        let u = (BigInt::from(3) * inv7).mod_floor(&m);
        assert_eq!(rational_reconstruct(&u, &m), Some(Rational::new(3.into(), 7.into())));
        let neg = (&m - BigInt::from(5)).mod_floor(&m);
        assert_eq!(rational_reconstruct(&neg, &m), Some(Rational::from_integer((-5).into())));
    }
}
