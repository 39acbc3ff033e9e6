//! Multivariate polynomial GCD over the rationals.
//!
//! A heuristic evaluate-and-interpolate GCD is tried first; its answer is accepted only when it
//! divides both inputs, which (with the evaluation point above twice the smaller coefficient norm
//! plus two) proves it is the GCD. Otherwise the recursive content / primitive-part
//! decomposition with a primitive pseudo-remainder sequence takes over. Results are monic under
//! the grlex order, so the GCD is unique.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::poly::Polynomial;
use super::Rational;

const HEU_GCD_ATTEMPTS: usize = 6;

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars().clone());
    }
    let (pa, pb) = (a.primitive(), b.primitive());
    if let Some(h) = heu_gcd(&pa, &pb) {
        return h.monic();
    }
    gcd_primitive(&pa, &pb).monic()
}

/// Full gcd over the integers (content included), or `None` if the heuristic gives up.
fn heu_gcd(f: &Polynomial, g: &Polynomial) -> Option<Polynomial> {
    let cf = int_content(f);
    let cg = int_content(g);
    let c = Rational::from_integer(cf.gcd(&cg));
    let f = f.scale(&Rational::from_integer(cf).recip());
    let g = g.scale(&Rational::from_integer(cg).recip());
    let vf = f.occurring_vars();
    let vg = g.occurring_vars();
    if vf.is_empty() || vg.is_empty() {
        return Some(Polynomial::constant(f.vars().clone(), c));
    }
    let v = *vf.iter().chain(&vg).min().unwrap();

    let nf = f.max_norm();
    let ng = g.max_norm();
    let mut xi: BigInt = BigInt::from(2) * nf.clone().min(ng.clone()) + 29;
    let lf = f.leading_coefficient().numer().abs();
    let lg = g.leading_coefficient().numer().abs();
    let alt: BigInt = BigInt::from(2) * (nf / lf).min(ng / lg) + 2;
    if alt > xi {
        xi = alt;
    }
    for _ in 0..HEU_GCD_ATTEMPTS {
        let ff = f.substitute_int(v, &xi);
        let gg = g.substitute_int(v, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            let image = if ff.is_constant() || gg.is_constant() {
                let a = ff.constant_term();
                let b = gg.constant_term();
                if ff.is_constant() && gg.is_constant() {
                    Some(Polynomial::constant(f.vars().clone(), Rational::from_integer(a.numer().gcd(b.numer()))))
                } else {
                    // gcd of an integer with a polynomial: gcd with its content
                    let (k, p) = if ff.is_constant() { (a, &gg) } else { (b, &ff) };
                    Some(Polynomial::constant(f.vars().clone(), Rational::from_integer(k.numer().gcd(&int_content(p)))))
                }
            } else {
                heu_gcd(&ff, &gg)
            };
            if let Some(image) = image {
                let h = interpolate(&image, &xi, v).primitive();
                if !h.is_zero() && f.div_exact(&h).is_some() && g.div_exact(&h).is_some() {
                    return Some(h.scale(&c));
                }
            }
        }
        // xi <- floor(73794 * xi * xi^(1/4) / 27011), the usual growth schedule
        xi = (BigInt::from(73794) * &xi * xi.sqrt().sqrt()) / BigInt::from(27011);
    }
    None
}

fn int_content(p: &Polynomial) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

/// Recover a polynomial in `v` from its image at `v = xi` by balanced base-`xi` digits.
fn interpolate(image: &Polynomial, xi: &BigInt, v: usize) -> Polynomial {
    let half = xi >> 1;
    let mut h = image.clone();
    let mut out = Polynomial::zero(image.vars().clone());
    let mut k = 0u32;
    let xr = Rational::from_integer(xi.clone()).recip();
    while !h.is_zero() {
        let digit = h.map_coefficients(|c| {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            Rational::from_integer(r)
        });
        out = &out + &digit.shift_var(v, k);
        h = (&h - &digit).scale(&xr);
        k += 1;
    }
    out
}

/// Integer-primitive gcd of two nonzero polynomials (result has positive leading coefficient).
fn gcd_primitive(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars().clone());
    }
    if a == b {
        return a.clone();
    }
    // Cheap divisibility checks catch the common "one divides the other" case.
    if a.total_degree() >= b.total_degree() {
        if a.div_exact(b).is_some() {
            return b.clone();
        }
    } else if b.div_exact(a).is_some() {
        return a.clone();
    }

    let va = a.occurring_vars();
    let vb = b.occurring_vars();
    // A variable occurring in only one operand forces the gcd into the content w.r.t. it.
    if let Some(&w) = va.iter().find(|w| !vb.contains(w)) {
        return gcd_primitive(&content_in(a, w), b);
    }
    if let Some(&w) = vb.iter().find(|w| !va.contains(w)) {
        return gcd_primitive(a, &content_in(b, w));
    }
    let v = *va
        .iter()
        .min_by_key(|&&v| a.degree_in(v) + b.degree_in(v))
        .unwrap();

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_primitive(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides").primitive();
    let pb = b.div_exact(&cb).expect("content divides").primitive();
    let g = prs_gcd(pa, pb, v);
    (&c * &g).primitive()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v` (integer-primitive).
pub(crate) fn content_in(p: &Polynomial, v: usize) -> Polynomial {
    let mut coeffs: Vec<Polynomial> = p
        .coefficients_in(v)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    // Start with the smallest coefficient; gcds shrink fastest that way.
    coeffs.sort_by_key(|c| (c.total_degree(), c.num_terms()));
    let mut g = coeffs[0].primitive();
    for c in &coeffs[1..] {
        if g.is_constant() {
            return Polynomial::one(p.vars().clone());
        }
        g = gcd_primitive(&g, &c.primitive());
    }
    if g.is_constant() {
        Polynomial::one(p.vars().clone())
    } else {
        g
    }
}

fn primitive_in(p: &Polynomial, v: usize) -> Polynomial {
    let c = content_in(p, v);
    if c.is_one() {
        p.primitive()
    } else {
        p.div_exact(&c).expect("content divides").primitive()
    }
}

/// Pseudo-remainder of `a` by `b` in variable `v`.
fn pseudo_rem(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let db = b.degree_in(v);
    let bc = b.coefficients_in(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v)[dr as usize].clone();
        let t = (&lr * b).shift_var(v, dr - db);
        r = &(&lb * &r) - &t;
    }
    r
}

/// Primitive PRS gcd of two polynomials primitive with respect to `v`.
fn prs_gcd(a: Polynomial, b: Polynomial, v: usize) -> Polynomial {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    loop {
        if b.degree_in(v) == 0 {
            // primitive in v and free of v means b is a unit
            return Polynomial::one(a.vars().clone());
        }
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return b.primitive();
        }
        a = b;
        b = primitive_in(&r, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::poly::vars;

    #[test]
    fn bivariate_common_factor() {
        let v = vars(&["x", "y"]);
        let x = Polynomial::var(v.clone(), 0);
        let y = Polynomial::var(v.clone(), 1);
        let one = Polynomial::one(v);
        let f1 = &x - &y;
        let f2 = &(&x * &y) + &one;
        let f3 = &x.pow(2) + &y;
        let a = &(&f1.pow(2) * &f2) * &x;
        let b = &(&f1 * &f2) * &f3;
        assert_eq!(gcd(&a, &b), (&f1 * &f2).monic());
        assert!(gcd(&f3, &f2).is_one());
    }

    #[test]
    fn trivariate() {
        let v = vars(&["x", "y", "z"]);
        let x = Polynomial::var(v.clone(), 0);
        let y = Polynomial::var(v.clone(), 1);
        let z = Polynomial::var(v.clone(), 2);
        let g = &(&x * &z) - &y.pow(2);
        let a = &g * &(&x + &z);
        let b = &g * &(&y - &z.pow(3));
        assert_eq!(gcd(&a, &b), g.monic());
    }
}
