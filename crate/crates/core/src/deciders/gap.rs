//! Gap emptiness for polynomially ambiguous automata.
//!
//! Runs that make many non-deterministic choices carry little probability: a run with
//! `m` choices has probability at most `α^m`, and a word has at most
//! `2^|Q| ((m+1)|Q|²)^(|Q|³)` accepting runs with exactly `m` choices. Cutting every
//! run after `N` choices therefore loses at most `sum_{m>N} α^m P(m)`, and once that
//! tail is at most `ε` the truncated automaton `A'` (which is finitely ambiguous)
//! separates the two sides of the promise.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::{emptiness_finite, exceeds_half, require, Answer, Certificate, DecideError, DecideOptions, Verdict};
use crate::ambiguity::AmbiguityClass;
use crate::pa::{trim, Pa, PaBuilder};
use crate::rational::{pow_i64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapParams {
    pub epsilon: Rational,
    /// Largest probability different from 1, initial weights included. `None` when
    /// the automaton makes no choices.
    pub alpha: Option<Rational>,
    /// Ratio bound for the geometric tail, `(1 + α) / 2`.
    pub beta: Option<Rational>,
    /// From `m0` on, consecutive terms shrink by at least `β`.
    pub m0: u64,
    pub n: u64,
    pub num_states: usize,
    /// Certified upper bound on `sum_{m>N} α^m P(m)`; `None` for an overridden `N`.
    pub tail_bound: Option<Rational>,
    /// `false` when `N` was supplied by the caller instead of computed.
    pub certified: bool,
}

/// `2^q ((m+1) q²)^(q³)`.
pub fn poly_bound(q: usize, m: u64) -> BigInt {
    let q_big = BigInt::from(q);
    let base = (BigInt::from(m) + 1u32) * &q_big * &q_big;
    let d = (q as u32).pow(3);
    (BigInt::one() << q) * Pow::pow(&base, d)
}

struct Tail {
    q: usize,
    alpha: Rational,
    beta: Rational,
    m0: u64,
}

impl Tail {
    fn term(&self, m: u64) -> Rational {
        pow_i64(&self.alpha, m as i64) * Rational::from_integer(poly_bound(self.q, m))
    }

    /// Closed-form over-approximation of `sum_{m>n} term(m)`.
    fn bound(&self, n: u64) -> Rational {
        let big_m = self.m0.max(n + 1);
        let head: Rational = (n + 1..big_m).map(|m| self.term(m)).sum();
        head + self.term(big_m) / (Rational::one() - &self.beta)
    }
}

fn has_choice(a: &Pa) -> bool {
    a.initial_support().len() >= 2
        || (0..a.num_states()).any(|p| (0..a.num_letters()).any(|l| a.successors(p, l).len() >= 2))
}

/// Least `m` with `((m+2)/(m+1))^d α <= β`.
fn ratio_start(d: u32, alpha: &Rational, beta: &Rational) -> u64 {
    let ok = |m: u64| {
        let r = Rational::new(BigInt::from(m) + 2u32, BigInt::from(m) + 1u32);
        pow_i64(&r, i64::from(d)) * alpha <= *beta
    };
    if ok(0) {
        return 0;
    }
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Cutoff `N` on the number of choices, with its certified tail bound.
pub fn compute_n(a: &Pa, epsilon: &Rational) -> Result<GapParams, DecideError> {
    if *epsilon <= Rational::zero() || *epsilon >= Rational::one() {
        return Err(DecideError::EpsilonRange);
    }
    let t = trim(a);
    let q = t.num_states();
    if !has_choice(&t) {
        return Ok(GapParams {
            epsilon: epsilon.clone(),
            alpha: t.max_non_one_probability(),
            beta: None,
            m0: 0,
            n: 0,
            num_states: q,
            tail_bound: Some(Rational::zero()),
            certified: true,
        });
    }
    let alpha = t.max_non_one_probability().expect("a choice splits probability mass");
    let beta = (Rational::one() + &alpha) / Rational::from_integer(2.into());
    let d = (q as u32).pow(3);
    let m0 = ratio_start(d, &alpha, &beta);
    let tail = Tail { q, alpha: alpha.clone(), beta: beta.clone(), m0 };

    let n = if m0 > 0 && tail.bound(m0 - 1) <= *epsilon {
        // Walk down while the bound stays within epsilon.
        let mut n = m0 - 1;
        let mut b = tail.bound(n);
        while n > 0 {
            let prev = &b + tail.term(n);
            if prev > *epsilon {
                break;
            }
            b = prev;
            n -= 1;
        }
        n
    } else {
        // bound(n) = term(n+1)/(1-β) is decreasing for n >= m0.
        let fits = |n: u64| tail.bound(n) <= *epsilon;
        let mut lo = m0.saturating_sub(1);
        let mut step = 1u64;
        let mut hi = m0 + step;
        while !fits(hi) {
            lo = hi;
            step *= 2;
            hi = m0 + step;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(GapParams {
        epsilon: epsilon.clone(),
        tail_bound: Some(tail.bound(n)),
        alpha: Some(alpha),
        beta: Some(beta),
        m0,
        n,
        num_states: q,
        certified: true,
    })
}

/// Layered copy of `a` in which every run may make at most `n` non-deterministic
/// choices. State `q@j` is `q` after `j` choices. A transition is a choice when its
/// source has several successors on its letter; the initial distribution is a
/// choice when its support has at least two states.
pub fn build_a_prime(a: &Pa, n: u64) -> Pa {
    let t = trim(a);
    let name = |q: usize, j: u64| format!("{}@{j}", t.states()[q]);
    let mut b = PaBuilder::new(t.alphabet());
    for j in 0..=n {
        for q in 0..t.num_states() {
            b.add_state(&name(q, j));
            if t.is_final(q) {
                b.add_final(&name(q, j));
            }
        }
    }
    let support = t.initial_support();
    let start_layer = u64::from(support.len() >= 2);
    if start_layer <= n {
        for &q in &support {
            b.add_initial(&name(q, start_layer), t.initial(q).clone());
        }
    }
    for j in 0..=n {
        for p in 0..t.num_states() {
            for (l, letter) in t.alphabet().iter().enumerate() {
                let succ = t.successors(p, l);
                let next = j + u64::from(succ.len() >= 2);
                if next > n {
                    continue;
                }
                for (q, prob) in succ {
                    b.add_transition(&name(p, j), letter, &name(*q, next), prob.clone());
                }
            }
        }
    }
    trim(&b.build().expect("layers of a valid automaton form a valid automaton"))
}

/// Promise problem: answers YES when `[[A]](w) <= 1/2` for every word and NO (with a
/// witness above 1/2) when some word exceeds `1/2 + ε`.
///
/// `override_n` replaces the computed cutoff; the answer is then no longer backed by
/// the tail bound, which the returned parameters record.
pub fn gap_emptiness(
    a: &Pa,
    epsilon: &Rational,
    override_n: Option<u64>,
    opts: &DecideOptions,
) -> Result<Verdict, DecideError> {
    require(a, "A", "polynomially ambiguous", AmbiguityClass::is_polynomial_or_better)?;
    if *epsilon <= Rational::zero() || *epsilon >= Rational::one() {
        return Err(DecideError::EpsilonRange);
    }
    let params = match override_n {
        None => compute_n(a, epsilon)?,
        Some(n) => {
            let t = trim(a);
            GapParams {
                epsilon: epsilon.clone(),
                alpha: t.max_non_one_probability(),
                beta: None,
                m0: 0,
                n,
                num_states: t.num_states(),
                tail_bound: None,
                certified: false,
            }
        }
    };
    let prime = build_a_prime(a, params.n);
    let inner = emptiness_finite(&prime, opts)?;
    Ok(match inner.answer {
        Answer::Yes => Verdict {
            answer: Answer::Yes,
            witness: None,
            certificate: Some(Certificate::Gap { params, inner: Box::new(inner.certificate.expect("YES carries a certificate")) }),
            reason: None,
        },
        Answer::No => {
            let w = inner.witness.expect("NO carries a witness");
            assert!(exceeds_half(a, &w), "a word above 1/2 for the truncation is above 1/2 for the original");
            Verdict {
                answer: Answer::No,
                witness: Some(w),
                certificate: Some(Certificate::Gap { params, inner: Box::new(inner.certificate.expect("NO carries a certificate")) }),
                reason: None,
            }
        }
        Answer::Unknown => Verdict { reason: inner.reason.map(|r| format!("truncated automaton with N = {}: {r}", params.n)), ..inner },
    })
}
