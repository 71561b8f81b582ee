//! Closed intervals with rational endpoints and outward rounding, plus enclosures of
//! `ln` and `exp` at a chosen number of significant bits.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

fn two_pow(e: i64) -> Rational {
    let p = Rational::from_integer(BigInt::one() << e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// floor(log2 |x|) for non-zero `x`.
fn ilog2(x: &Rational) -> i64 {
    let (n, d) = (x.numer().abs(), x.denom().clone());
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e <= |x| < 2^(e+1) after at most one correction.
    if Rational::new(n.clone(), d.clone()) < two_pow(e) {
        e -= 1;
    }
    e
}

/// Rounds towards -inf keeping `prec` significant bits.
pub fn round_down(x: &Rational, prec: u32) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let scale = two_pow(prec as i64 - ilog2(x));
    let scaled = x * &scale;
    if scaled.is_integer() {
        return x.clone();
    }
    Rational::from_integer(scaled.numer().div_floor(scaled.denom())) / scale
}

pub fn round_up(x: &Rational, prec: u32) -> Rational {
    -round_down(&-x, prec)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Sign when certain: `Some(1)`, `Some(-1)`, or `Some(0)` for the point 0.
    pub fn sign(&self) -> Option<i8> {
        if self.is_positive() {
            Some(1)
        } else if self.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn rounded(&self, prec: u32) -> Self {
        Interval { lo: round_down(&self.lo, prec), hi: round_up(&self.hi, prec) }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_negative() {
            Interval { lo: &self.hi * k, hi: &self.lo * k }
        } else {
            Interval { lo: &self.lo * k, hi: &self.hi * k }
        }
    }

    /// Reciprocal; `None` when the interval contains 0.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Interval) -> Option<Self> {
        Some(self * &other.recip()?)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four candidates").clone();
        let hi = c.iter().max().expect("four candidates").clone();
        Interval { lo, hi }
    }
}

/// Enclosure of `atanh(z)` for `0 <= z <= 1/3`, accurate to about `prec` bits.
fn atanh_small(z: &Rational, prec: u32) -> Interval {
    if z.is_zero() {
        return Interval::zero();
    }
    let work = prec + 16;
    let z2 = z * z;
    let mut power = z.clone();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    let bound = two_pow(-(prec as i64) - 4);
    let mut j: u64 = 0;
    loop {
        let denom = Rational::from_integer(BigInt::from(2 * j + 1));
        lo += round_down(&(&power / &denom), work);
        hi += round_up(&(&power / &denom), work);
        power = round_up(&(&power * &z2), work);
        j += 1;
        // Remaining terms sum to at most power / ((2j+1)(1 - z^2)), with z^2 <= 1/9.
        let tail = &power / Rational::from_integer(BigInt::from(2 * j + 1)) * Rational::new(9.into(), 8.into());
        if tail < bound {
            hi += tail;
            break;
        }
    }
    Interval::new(lo, hi).rounded(work)
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    // ln 2 = 2 atanh(1/3).
    atanh_small(&Rational::new(1.into(), 3.into()), prec).scale(&Rational::from_integer(2.into()))
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln(x: &Rational, prec: u32) -> Interval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    if x.is_one() {
        return Interval::zero();
    }
    let k = ilog2(x);
    let y = x / two_pow(k);
    // y in [1, 2): ln y = 2 atanh((y - 1)/(y + 1)) with the argument below 1/3.
    let one = Rational::one();
    let z = (&y - &one) / (&y + &one);
    let z_lo = round_down(&z, prec + 16);
    let z_hi = round_up(&z, prec + 16).min(Rational::new(1.into(), 3.into()));
    let lo = atanh_small(&z_lo, prec).lo;
    let hi = atanh_small(&z_hi, prec).hi;
    let two = Rational::from_integer(2.into());
    let frac = Interval::new(lo * &two, hi * &two);
    let k_ln2 = ln2(prec).scale(&Rational::from_integer(k.into()));
    (&k_ln2 + &frac).rounded(prec + 8)
}

/// Enclosure of `exp(t)` for rational `t`.
pub fn exp_point(t: &Rational, prec: u32) -> Interval {
    if t.is_zero() {
        return Interval::point(Rational::one());
    }
    let work = prec + 32;
    // Halve until |u| <= 1/2, then square back up.
    let mut s: u32 = 0;
    let mut u = t.clone();
    let half = Rational::new(1.into(), 2.into());
    while u.abs() > half {
        u /= Rational::from_integer(2.into());
        s += 1;
    }
    let bound = two_pow(-(work as i64));
    let mut sum = Interval::point(Rational::one());
    let mut term = Rational::one();
    let mut j: u64 = 1;
    loop {
        term = &term * &u / Rational::from_integer(BigInt::from(j));
        sum = &sum + &Interval::point(term.clone());
        sum = sum.rounded(work);
        j += 1;
        // |remainder| <= 2 |u|^j / j! <= 2 |term| |u|.
        let rem = term.abs() * u.abs() * Rational::from_integer(2.into());
        if rem < bound {
            sum = Interval::new(&sum.lo - &rem, &sum.hi + &rem);
            break;
        }
    }
    for _ in 0..s {
        sum = (&sum * &sum).rounded(work);
    }
    sum.rounded(prec + 8)
}

/// Enclosure of `exp` over an interval.
pub fn exp(x: &Interval, prec: u32) -> Interval {
    Interval::new(exp_point(&x.lo, prec).lo, exp_point(&x.hi, prec).hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};

    #[test]
    fn ln2_matches_float() {
        let i = ln2(80);
        assert!(to_f64(&i.lo) <= std::f64::consts::LN_2 + 1e-15);
        assert!(to_f64(&i.hi) >= std::f64::consts::LN_2 - 1e-15);
        assert!(i.width() < two_pow(-70));
    }

    #[test]
    fn ln_and_exp_are_inverse_enclosures() {
        for x in [rat(3, 1), rat(1, 7), rat(22, 7), rat(1000, 3)] {
            let l = ln(&x, 64);
            let e = exp(&l, 64);
            assert!(e.contains(&x), "{x} not in exp(ln x)");
            assert!((to_f64(&l.lo) - to_f64(&x).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rounding_is_outward() {
        let x = rat(1, 3);
        assert!(round_down(&x, 10) <= x && x <= round_up(&x, 10));
        assert!(round_down(&-x.clone(), 10) <= -x.clone());
    }
}
