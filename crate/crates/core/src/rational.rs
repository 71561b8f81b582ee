//! Exact rational helpers on top of [`num_rational::BigRational`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used everywhere a probability or weight appears.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Shorthand constructor for small literals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `num/den` or a bare integer `k` (read as `k/1`).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| err())?;
    let den: BigInt = den.trim().parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Renders as `num/den`, including `k/1` for integers.
pub fn fmt_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// `base^exp` for any integer exponent; negative exponents take the reciprocal.
///
/// Panics if `base` is zero and `exp` is negative.
pub fn pow_int(base: &Rational, exp: &BigInt) -> Rational {
    let e: u32 = exp
        .abs()
        .try_into()
        .expect("exponent does not fit in 32 bits");
    let p = num_traits::pow::Pow::pow(base, e);
    if exp.is_negative() {
        p.recip()
    } else {
        p
    }
}

pub fn pow_i64(base: &Rational, exp: i64) -> Rational {
    pow_int(base, &BigInt::from(exp))
}

pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

pub fn ceil(value: &Rational) -> BigInt {
    -((-value.numer()).div_floor(value.denom()))
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn is_probability(value: &Rational) -> bool {
    value.is_positive() && *value <= Rational::one()
}

/// Closest `f64`; used only for numeric guesses that are later verified exactly.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or_else(|| {
        // Fall back on a scaled ratio when numerator or denominator overflow.
        let shift = value.numer().bits().max(value.denom().bits()) as i64 - 900;
        let scaled = if shift > 0 {
            let n = value.numer() >> (shift as usize);
            let d = value.denom() >> (shift as usize);
            Rational::new(n, if d.is_zero() { BigInt::one() } else { d })
        } else {
            value.clone()
        };
        scaled.to_f64().unwrap_or(f64::NAN)
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn from_f64_approx(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("4").unwrap(), int(4));
        assert_eq!(fmt_rational(&int(4)), "4/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn negative_powers_take_reciprocals() {
        assert_eq!(pow_i64(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow_i64(&rat(2, 3), 0), int(1));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(ceil(&rat(-3, 2)), BigInt::from(-1));
        assert_eq!(ceil(&rat(4, 2)), BigInt::from(2));
    }

    #[test]
    fn continued_fraction_recovers_simple_values() {
        assert_eq!(from_f64_approx(0.3333333333, 1000).unwrap(), rat(1, 3));
        assert_eq!(from_f64_approx(-0.5, 10).unwrap(), rat(-1, 2));
    }
}
