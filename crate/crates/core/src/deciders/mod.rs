//! Emptiness, containment and gap-emptiness deciders.
//!
//! Containment `[[A]] <= [[B]]` is reduced to the finite set `Δ` of exponential-sum
//! tuples produced by [`crate::structure::translate`]: a word violating containment
//! exists iff some tuple has `x ∈ N^n` with `S(p, q)(x) > S(r, s)(x)`. When `B` is
//! unambiguous each tuple is settled by a direct argument; when `A` is unambiguous
//! each tuple becomes an instance of the exponential integer-feasibility problem.

mod gap;

pub use gap::{build_a_prime, compute_n, gap_emptiness, poly_bound, GapParams};

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::ambiguity::{classify, max_finite_ambiguity, AmbiguityClass, AmbiguityError};
use crate::catalog;
use crate::ipexp::{self, Budget, ExpSumFunction, IpExpInstance, Solution, UnsatCert};
use crate::pa::{Pa, Word};
use crate::rational::{rat, Rational};
use crate::structure::{translate, DeltaEntry, DeltaTuple, StructureError, TranslateOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
            Answer::Unknown => "UNKNOWN",
        })
    }
}

/// Why a verdict was reached.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// A tuple of `Δ` violated at exponent vector `x`; the witness is the word of the
    /// corresponding product run.
    Violation { k: usize, l: usize, tuple: DeltaTuple, x: Vec<u64> },
    /// Every tuple of `Δ` was checked and none can be violated.
    NoViolation { tuples: usize },
    /// Every tuple's integer-feasibility instance was refuted.
    Refuted { tuples: usize, refutations: Vec<(IpExpInstance, UnsatCert)> },
    /// Gap emptiness: parameters used and the certificate for the truncated automaton.
    Gap { params: GapParams, inner: Box<Certificate> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<Word>,
    pub certificate: Option<Certificate>,
    /// Explanation for `Unknown` answers.
    pub reason: Option<String>,
}

impl Verdict {
    fn yes(certificate: Certificate) -> Self {
        Verdict { answer: Answer::Yes, witness: None, certificate: Some(certificate), reason: None }
    }

    fn no(witness: Word, certificate: Certificate) -> Self {
        Verdict { answer: Answer::No, witness: Some(witness), certificate: Some(certificate), reason: None }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        Verdict { answer: Answer::Unknown, witness: None, certificate: None, reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("{which} must be {required}, but it is {found}")]
    Precondition { which: &'static str, required: &'static str, found: AmbiguityClass },
    #[error("the two automata have different alphabets")]
    AlphabetMismatch,
    #[error("epsilon must lie strictly between 0 and 1")]
    EpsilonRange,
}

/// Limits shared by the deciders.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecideOptions {
    pub translate: TranslateOptions,
    pub ipexp: Budget,
}

fn require(pa: &Pa, which: &'static str, required: &'static str, ok: impl Fn(&AmbiguityClass) -> bool) -> Result<(), DecideError> {
    let found = classify(pa);
    if ok(&found) {
        Ok(())
    } else {
        Err(DecideError::Precondition { which, required, found })
    }
}

/// The ambiguity bound, or the reason it could not be computed.
fn ambiguity_bound(pa: &Pa) -> Result<usize, String> {
    match max_finite_ambiguity(pa) {
        Ok(k) => Ok(k.max(1) as usize),
        Err(AmbiguityError::Budget(n)) => Err(format!("counting automaton exceeded {n} states")),
        Err(e) => Err(e.to_string()),
    }
}

/// Runs the translation; on a budget overrun returns the partial entries and the reason.
fn translate_all(
    a: &Pa,
    b: &Pa,
    k: usize,
    l: usize,
    opts: &TranslateOptions,
) -> Result<(Vec<DeltaEntry>, Option<String>), DecideError> {
    let opts = TranslateOptions { skip_empty_left: true, ..*opts };
    match translate(a, b, k, l, &opts) {
        Ok(entries) => Ok((entries, None)),
        Err(StructureError::AlphabetMismatch) => Err(DecideError::AlphabetMismatch),
        Err(StructureError::Partial { what, limit, partial }) => {
            Ok((partial, Some(format!("translation budget exceeded ({what} > {limit})"))))
        }
        Err(e) => Ok((Vec::new(), Some(format!("translation budget exceeded: {e}")))),
    }
}

/// Exponent vector at which the tuple's left side exceeds its right side, when one
/// exists. Only valid for tuples with at most one right-hand term.
pub fn violation_point(t: &DeltaTuple) -> Option<Vec<u64>> {
    let n = t.n();
    let zero = vec![0u64; n];
    if t.r.is_empty() {
        return Some(zero);
    }
    debug_assert_eq!(t.r.len(), 1, "right side must come from an unambiguous automaton");
    let growing = (0..n).find(|&j| t.q.iter().any(|row| row[j] > t.s[0][j]));
    match growing {
        None => (t.left(&zero) > t.right(&zero)).then_some(zero),
        Some(j) => {
            let mut m = 1u64;
            loop {
                let mut x = zero.clone();
                x[j] = m;
                if t.left(&x) > t.right(&x) {
                    return Some(x);
                }
                m = m.checked_mul(2)?;
            }
        }
    }
}

fn witness_for(a: &Pa, b: &Pa, entry: &DeltaEntry, x: &[u64]) -> Option<Word> {
    let w = entry.run_for(x).word();
    let va = a.evaluate(&w).ok()?;
    let vb = b.evaluate(&w).ok()?;
    (va > vb).then_some(w)
}

/// Decides `[[A]](w) <= [[B]](w)` for all `w`, for `A` finitely ambiguous and `B`
/// unambiguous.
pub fn containment_fin_vs_unamb(a: &Pa, b: &Pa, opts: &DecideOptions) -> Result<Verdict, DecideError> {
    require(a, "A", "finitely ambiguous", AmbiguityClass::is_finite)?;
    require(b, "B", "unambiguous", |c| *c == AmbiguityClass::Unambiguous)?;
    if a.alphabet() != b.alphabet() {
        return Err(DecideError::AlphabetMismatch);
    }
    let k = match ambiguity_bound(a) {
        Ok(k) => k,
        Err(reason) => return Ok(Verdict::unknown(reason)),
    };
    let (entries, overrun) = translate_all(a, b, k, 1, &opts.translate)?;
    for entry in &entries {
        if let Some(x) = violation_point(&entry.tuple) {
            if let Some(w) = witness_for(a, b, entry, &x) {
                let cert = Certificate::Violation { k: entry.k, l: entry.l, tuple: entry.tuple.clone(), x };
                return Ok(Verdict::no(w, cert));
            }
        }
    }
    Ok(match overrun {
        Some(reason) => Verdict::unknown(reason),
        None => Verdict::yes(Certificate::NoViolation { tuples: entries.len() }),
    })
}

/// Decides `[[A]](w) <= 1/2` for all `w`, for finitely ambiguous `A`.
pub fn emptiness_finite(a: &Pa, opts: &DecideOptions) -> Result<Verdict, DecideError> {
    let half = catalog::constant(a.alphabet(), rat(1, 2));
    containment_fin_vs_unamb(a, &half, opts)
}

/// The integer-feasibility instance of one tuple with a single left term, after
/// dropping exponent columns that do not affect `f` and merging identical ones.
/// Returns the instance and, per new variable, the original column it stands for.
pub fn tuple_instance(t: &DeltaTuple) -> (IpExpInstance, Vec<usize>) {
    let n = t.n();
    let p = &t.p[0];
    let q = &t.q[0];
    let r: Vec<Rational> = t.r.iter().map(|ri| ri / p).collect();
    let column = |j: usize| -> Vec<Rational> { t.s.iter().map(|row| &row[j] / &q[j]).collect() };
    let mut keep: Vec<usize> = Vec::new();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for j in 0..n {
        let c = column(j);
        if c.iter().all(One::is_one) || cols.contains(&c) {
            continue;
        }
        keep.push(j);
        cols.push(c);
    }
    let s: Vec<Vec<Rational>> = (0..r.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let f = ExpSumFunction::new(keep.len(), r, s).expect("ratios of probabilities are positive");
    (IpExpInstance::nonnegative(f), keep)
}

/// Decides `[[A]](w) <= [[B]](w)` for all `w`, for `A` unambiguous and `B` finitely
/// ambiguous.
pub fn containment_unamb_vs_fin(a: &Pa, b: &Pa, opts: &DecideOptions) -> Result<Verdict, DecideError> {
    require(a, "A", "unambiguous", |c| *c == AmbiguityClass::Unambiguous)?;
    require(b, "B", "finitely ambiguous", AmbiguityClass::is_finite)?;
    if a.alphabet() != b.alphabet() {
        return Err(DecideError::AlphabetMismatch);
    }
    let l = match ambiguity_bound(b) {
        Ok(l) => l,
        Err(reason) => return Ok(Verdict::unknown(reason)),
    };
    let (entries, overrun) = translate_all(a, b, 1, l, &opts.translate)?;
    let mut refutations: Vec<(IpExpInstance, UnsatCert)> = Vec::new();
    let mut solved: HashMap<IpExpInstance, Option<usize>> = HashMap::new();
    let mut unknown: Option<String> = overrun;
    for entry in &entries {
        let t = &entry.tuple;
        if t.r.is_empty() {
            let x = vec![0; t.n()];
            if let Some(w) = witness_for(a, b, entry, &x) {
                return Ok(Verdict::no(w, Certificate::Violation { k: entry.k, l: entry.l, tuple: t.clone(), x }));
            }
            continue;
        }
        let (inst, keep) = tuple_instance(t);
        if solved.contains_key(&inst) {
            continue;
        }
        match ipexp::solve(&inst, &opts.ipexp) {
            Solution::Sat(y) => {
                let mut x = vec![0u64; t.n()];
                let mut fits = true;
                for (v, &j) in y.iter().zip(&keep) {
                    match v.to_u64() {
                        Some(v) => x[j] = v,
                        None => fits = false,
                    }
                }
                if fits {
                    if let Some(w) = witness_for(a, b, entry, &x) {
                        let cert = Certificate::Violation { k: entry.k, l: entry.l, tuple: t.clone(), x };
                        return Ok(Verdict::no(w, cert));
                    }
                }
                unknown.get_or_insert_with(|| "a solution could not be turned into a witness".into());
                solved.insert(inst, None);
            }
            Solution::Unsat(cert) => {
                solved.insert(inst.clone(), Some(refutations.len()));
                refutations.push((inst, cert));
            }
            Solution::Unknown(reason) => {
                unknown.get_or_insert(reason);
                solved.insert(inst, None);
            }
        }
    }
    Ok(match unknown {
        Some(reason) => Verdict::unknown(reason),
        None => Verdict::yes(Certificate::Refuted { tuples: entries.len(), refutations }),
    })
}

/// Re-checks a verdict for `[[A]] <= [[B]]`: NO witnesses are evaluated exactly and
/// infeasibility certificates are re-verified. `Unknown` verdicts pass trivially.
pub fn verify_containment(a: &Pa, b: &Pa, v: &Verdict) -> bool {
    match v.answer {
        Answer::No => v.witness.as_ref().is_some_and(|w| match (a.evaluate(w), b.evaluate(w)) {
            (Ok(x), Ok(y)) => x > y,
            _ => false,
        }),
        Answer::Yes => match &v.certificate {
            Some(Certificate::Refuted { refutations, .. }) => {
                refutations.iter().all(|(inst, cert)| ipexp::verify_unsat(inst, cert, 2048))
            }
            Some(Certificate::NoViolation { .. }) => true,
            _ => false,
        },
        Answer::Unknown => true,
    }
}

pub(crate) fn exceeds_half(a: &Pa, w: &Word) -> bool {
    a.evaluate(w).is_ok_and(|v| v > rat(1, 2))
}
