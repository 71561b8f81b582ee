//! Polynomials with rational coefficients in the formal indeterminates `ln p`.
//!
//! Treating logarithms of distinct atoms as indeterminates lets identities be checked
//! symbolically: a polynomial that is formally zero is zero as a real number. The
//! converse is never assumed; non-zero polynomials have their sign certified by
//! interval evaluation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::interval::{ln, Interval};
use super::logvec::LogVector;
use crate::rational::Rational;

/// Sorted `(atom, exponent)` list.
type Monomial = Vec<(BigInt, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogPoly(BTreeMap<Monomial, Rational>);

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<BigInt, u32> = a.iter().cloned().collect();
    for (p, e) in b {
        *out.entry(p.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}

impl LogPoly {
    pub fn zero() -> Self {
        LogPoly(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = LogPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn from_logvec(v: &LogVector) -> Self {
        let mut p = LogPoly::zero();
        for (atom, e) in &v.0 {
            p.add_term(vec![(atom.clone(), 1)], e.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &LogPoly) -> LogPoly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &LogPoly) -> LogPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LogPoly {
        LogPoly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn mul(&self, o: &LogPoly) -> LogPoly {
        let mut out = LogPoly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                out.add_term(mul_monomials(m1, m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> LogPoly {
        if k.is_zero() {
            return LogPoly::zero();
        }
        LogPoly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    /// Enclosure of the real value.
    pub fn eval(&self, prec: u32) -> Interval {
        let mut logs: BTreeMap<&BigInt, Interval> = BTreeMap::new();
        let mut total = Interval::zero();
        for (m, c) in &self.0 {
            let mut term = Interval::point(c.clone());
            for (p, e) in m {
                let l = logs
                    .entry(p)
                    .or_insert_with(|| ln(&Rational::from_integer(p.clone()), prec))
                    .clone();
                for _ in 0..*e {
                    term = (&term * &l).rounded(prec + 16);
                }
            }
            total = &total + &term;
        }
        total
    }

    /// Certified sign, doubling precision up to `max_prec` bits.
    pub fn sign(&self, max_prec: u32) -> Option<i8> {
        if self.is_zero() {
            return Some(0);
        }
        let mut prec = 64;
        while prec <= max_prec {
            if let Some(s) = self.eval(prec).sign() {
                if s != 0 {
                    return Some(s);
                }
            }
            prec *= 2;
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        let e = self.eval(64);
        crate::rational::to_f64(&((&e.lo + &e.hi) / Rational::from_integer(2.into())))
    }
}

/// Determinant by cofactor expansion over column subsets (fine for the small
/// dimensions that appear here).
pub fn determinant(m: &[Vec<LogPoly>]) -> LogPoly {
    let n = m.len();
    if n == 0 {
        return LogPoly::constant(Rational::one());
    }
    // memo[mask] = determinant of rows (n - popcount(mask)).. with columns in mask.
    let mut memo: BTreeMap<u64, LogPoly> = BTreeMap::new();
    fn go(m: &[Vec<LogPoly>], row: usize, mask: u64, memo: &mut BTreeMap<u64, LogPoly>) -> LogPoly {
        let n = m.len();
        if row == n {
            return LogPoly::constant(Rational::one());
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut total = LogPoly::zero();
        let mut sign_pos = true;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            if !m[row][col].is_zero() {
                let minor = go(m, row + 1, mask & !(1 << col), memo);
                let term = m[row][col].mul(&minor);
                total = if sign_pos { total.add(&term) } else { total.sub(&term) };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(mask, total.clone());
        total
    }
    assert!(n < 64, "matrix too large for the subset expansion");
    go(m, 0, (1u64 << n) - 1, &mut memo)
}
