//! Integer solutions of one linear equation, and restriction of an instance to them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ExpSumFunction, IpExpInstance};
use crate::rational::pow_int;

pub fn mat_vec(m: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Parametrises `{x ∈ Z^n : d·x = i}` as `x = N y + h` with `y ∈ Z^(n-1)`.
///
/// Column operations driven by the extended gcd build a unimodular `U` with
/// `dᵀU = (g, 0, ..., 0)`; then `h = U (i/g, 0, ..., 0)` and `N` is `U` without its
/// first column. Returns `None` when `g` does not divide `i`. `N` is `n × (n-1)`.
///
/// Panics if `d` is zero.
pub fn hyperplane_solutions(d: &[BigInt], i: &BigInt) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let n = d.len();
    assert!(d.iter().any(|x| !x.is_zero()), "direction must be non-zero");
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut v = d.to_vec();
    // Bring a non-zero entry to the front first.
    if v[0].is_zero() {
        let k = v.iter().position(|x| !x.is_zero()).expect("non-zero direction");
        v.swap(0, k);
        for row in u.iter_mut() {
            row.swap(0, k);
        }
    }
    for k in 1..n {
        if v[k].is_zero() {
            continue;
        }
        let e = v[0].extended_gcd(&v[k]);
        let (g, s, t) = (e.gcd, e.x, e.y);
        let a = &v[k] / &g;
        let b = &v[0] / &g;
        // [col0, colk] <- [s col0 + t colk, -a col0 + b colk]; determinant s b + t a = 1.
        for row in u.iter_mut() {
            let c0 = row[0].clone();
            let ck = row[k].clone();
            row[0] = &s * &c0 + &t * &ck;
            row[k] = -&a * &c0 + &b * &ck;
        }
        v[0] = g;
        v[k] = BigInt::zero();
    }
    if v[0].is_negative() {
        for row in u.iter_mut() {
            row[0] = -&row[0];
        }
        v[0] = -&v[0];
    }
    let g = &v[0];
    if !(i % g).is_zero() {
        return None;
    }
    let y0 = i / g;
    let h = u.iter().map(|row| &row[0] * &y0).collect();
    let nmat = u.iter().map(|row| row[1..].to_vec()).collect();
    Some((h, nmat))
}

/// The instance in the new variables `y` with `x = N y + h`:
/// `r'_i = r_i prod_j s_ij^h_j`, `s'_ik = prod_j s_ij^N_jk`, `M' = M N`, `c' = c - M h`.
pub fn substitute(inst: &IpExpInstance, nmat: &[Vec<BigInt>], h: &[BigInt]) -> IpExpInstance {
    let n_new = nmat.first().map_or(0, Vec::len);
    let f = &inst.f;
    let r: Vec<_> = (0..f.num_terms()).map(|i| f.term(i, h)).collect();
    let s: Vec<Vec<_>> = f
        .s
        .iter()
        .map(|row| {
            (0..n_new)
                .map(|k| {
                    row.iter()
                        .zip(nmat)
                        .fold(crate::rational::int(1), |acc, (b, nrow)| acc * pow_int(b, &nrow[k]))
                })
                .collect()
        })
        .collect();
    let m: Vec<Vec<BigInt>> = inst
        .m
        .iter()
        .map(|row| {
            (0..n_new)
                .map(|k| row.iter().zip(nmat).map(|(a, nrow)| a * &nrow[k]).sum())
                .collect()
        })
        .collect();
    let mh = mat_vec(&inst.m, h);
    let c = inst.c.iter().zip(mh).map(|(c, v)| c - v).collect();
    IpExpInstance { f: ExpSumFunction { n: n_new, r, s }, m, c }
}
