//! Exact rational combinations of logarithms of positive integers.
//!
//! A [`LogVector`] `{p -> e_p}` stands for `sum e_p ln p`. Keys are normally primes.
//! Very large cofactors left over by trial division are kept as opaque atoms, which
//! is harmless: signs are decided by an exact integer comparison that does not rely
//! on the keys being prime.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{ln, Interval};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LogVector(pub BTreeMap<BigInt, Rational>);

const TRIAL_LIMIT: u64 = 100_000;

/// Factorisation by trial division; any cofactor without small prime factors is
/// returned as a single atom.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n.is_positive());
    let mut n = n.clone();
    let mut out = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        push(bp, e, &mut out);
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

impl LogVector {
    pub fn zero() -> Self {
        LogVector(BTreeMap::new())
    }

    /// `ln x` for rational `x > 0`.
    pub fn of(x: &Rational) -> Self {
        let mut v = LogVector::zero();
        for (p, e) in factor(x.numer()) {
            v.add_term(&p, &Rational::from_integer(e.into()));
        }
        for (p, e) in factor(x.denom()) {
            v.add_term(&p, &Rational::from_integer(-BigInt::from(e)));
        }
        v
    }

    fn add_term(&mut self, p: &BigInt, e: &Rational) {
        if e.is_zero() {
            return;
        }
        let entry = self.0.entry(p.clone()).or_insert_with(Rational::zero);
        *entry += e;
        if entry.is_zero() {
            self.0.remove(p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &LogVector) -> LogVector {
        let mut out = self.clone();
        for (p, e) in &other.0 {
            out.add_term(p, e);
        }
        out
    }

    pub fn sub(&self, other: &LogVector) -> LogVector {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> LogVector {
        if k.is_zero() {
            return LogVector::zero();
        }
        LogVector(self.0.iter().map(|(p, e)| (p.clone(), e * k)).collect())
    }

    /// Enclosure of the real value.
    pub fn interval(&self, prec: u32) -> Interval {
        self.0.iter().fold(Interval::zero(), |acc, (p, e)| {
            &acc + &ln(&Rational::from_integer(p.clone()), prec).scale(e)
        })
    }

    /// Approximate value, for numeric guesses only.
    pub fn to_f64(&self) -> f64 {
        self.0
            .iter()
            .map(|(p, e)| crate::rational::to_f64(e) * p.to_f64().unwrap_or(f64::MAX).ln())
            .sum()
    }

    /// Exact sign of `sum e_p ln p`.
    pub fn sign(&self) -> Ordering {
        logvec_sign(self)
    }
}

/// Exact sign of a log-vector. Cheap interval enclosures settle almost every case;
/// near-ties fall back to clearing denominators and comparing the products of the
/// positive and negative prime powers. Huge exponents keep refining the enclosure
/// instead, which terminates because logarithms of distinct primes are linearly
/// independent over the rationals.
pub fn logvec_sign(v: &LogVector) -> Ordering {
    if v.is_zero() {
        return Ordering::Equal;
    }
    let mut prec = 64;
    while prec <= 1024 {
        if let Some(s) = v.interval(prec).sign() {
            return s.cmp(&0);
        }
        prec *= 2;
    }
    let lcm = v.0.values().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let ints: Vec<(&BigInt, BigInt)> =
        v.0.iter().map(|(p, e)| (p, (e * Rational::from_integer(lcm.clone())).to_integer())).collect();
    let bits: f64 = ints
        .iter()
        .map(|(p, e)| e.abs().to_f64().unwrap_or(f64::INFINITY) * p.bits() as f64)
        .sum();
    if bits < 4_000_000.0 {
        return exact_compare(&ints);
    }
    while prec <= 1 << 16 {
        if let Some(s) = v.interval(prec).sign() {
            return s.cmp(&0);
        }
        prec *= 2;
    }
    exact_compare(&ints)
}

fn exact_compare(ints: &[(&BigInt, BigInt)]) -> Ordering {
    let mut pos = BigInt::one();
    let mut neg = BigInt::one();
    for (p, e) in ints {
        let k = e.abs().to_usize().expect("exponent fits in memory");
        if e.is_positive() {
            pos *= num_traits::pow((*p).clone(), k);
        } else {
            neg *= num_traits::pow((*p).clone(), k);
        }
    }
    pos.cmp(&neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn factor_small_numbers() {
        let f = factor(&BigInt::from(360));
        assert_eq!(f, vec![(2.into(), 3), (3.into(), 2), (5.into(), 1)]);
    }

    #[test]
    fn log_of_reciprocal_negates() {
        let a = LogVector::of(&rat(12, 5));
        let b = LogVector::of(&rat(5, 12));
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn sign_compares_products() {
        // 3 ln 2 - 2 ln 3 = ln(8/9) < 0
        let v = LogVector::of(&rat(8, 9));
        assert_eq!(logvec_sign(&v), Ordering::Less);
        let w = LogVector::of(&rat(2, 1)).scale(&rat(1, 2)).sub(&LogVector::of(&rat(3, 1)).scale(&rat(1, 3)));
        // sqrt(2) vs cbrt(3): 2^3 = 8 < 9 = 3^2
        assert_eq!(logvec_sign(&w), Ordering::Less);
    }
}
