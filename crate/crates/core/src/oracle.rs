//! Brute-force ground truth for tests.
//!
//! Everything here works by explicit enumeration: runs are followed one by one
//! instead of being merged into distributions, and integer boxes are swept point by
//! point. Nothing is fast, which is the point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ipexp::IpExpInstance;
use crate::pa::{Pa, Run, Word};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("letter index {0} is outside the alphabet")]
    Letter(usize),
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
}

/// Result of a bounded sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport<W> {
    /// Word length or box radius that was swept.
    pub bound: u64,
    /// Number of words or points examined.
    pub checked: u64,
    /// Every witness with its value, in canonical order.
    pub witnesses: Vec<(W, Rational)>,
    /// The largest difference (containment) or smallest value of `f` (IP+EXP) seen.
    pub extremal: Option<(W, Rational)>,
}

impl<W> SweepReport<W> {
    pub fn found(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

/// An accepting run together with its probability and the number of
/// non-deterministic choices it makes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedRun {
    pub run: Run,
    pub probability: Rational,
    pub choices: u64,
}

fn check_word(pa: &Pa, w: &[usize]) -> Result<(), OracleError> {
    match w.iter().find(|&&l| l >= pa.num_letters()) {
        Some(&l) => Err(OracleError::Letter(l)),
        None => Ok(()),
    }
}

/// Every accepting run on `w`, by depth-first search. A step is a choice when its
/// source has at least two successors on the letter; starting is a choice when the
/// initial distribution has at least two states.
pub fn accepting_runs(pa: &Pa, w: &[usize]) -> Result<Vec<EnumeratedRun>, OracleError> {
    check_word(pa, w)?;
    let support = pa.initial_support();
    let start_choice = u64::from(support.len() >= 2);
    let mut out = Vec::new();
    for q in support {
        let mut run = Run::new(q);
        dfs(pa, w, &mut run, pa.initial(q).clone(), start_choice, &mut out);
    }
    Ok(out)
}

fn dfs(pa: &Pa, w: &[usize], run: &mut Run, prob: Rational, choices: u64, out: &mut Vec<EnumeratedRun>) {
    let i = run.len();
    let q = run.last_state();
    if i == w.len() {
        if pa.is_final(q) {
            out.push(EnumeratedRun { run: run.clone(), probability: prob, choices });
        }
        return;
    }
    let succ = pa.successors(q, w[i]);
    let c = choices + u64::from(succ.len() >= 2);
    for (t, p) in succ {
        run.steps.push((w[i], *t));
        dfs(pa, w, run, &prob * p, c, out);
        run.steps.pop();
    }
}

pub fn count_accepting_runs(pa: &Pa, w: &[usize]) -> Result<u64, OracleError> {
    Ok(accepting_runs(pa, w)?.len() as u64)
}

/// Sum of run probabilities; agrees with `Pa::evaluate`.
pub fn run_sum(pa: &Pa, w: &[usize]) -> Result<Rational, OracleError> {
    Ok(accepting_runs(pa, w)?.iter().map(|r| &r.probability).sum())
}

/// Number of accepting runs by number of choices made.
pub fn choice_profile(pa: &Pa, w: &[usize]) -> Result<BTreeMap<u64, u64>, OracleError> {
    let mut profile = BTreeMap::new();
    for r in accepting_runs(pa, w)? {
        *profile.entry(r.choices).or_insert(0) += 1;
    }
    Ok(profile)
}

/// All words of length at most `max_len` over `k` letters, shortest first and
/// lexicographic within a length.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for l in 0..k {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

type Alive = Vec<(usize, Rational)>;

/// Partial runs alive after a prefix: `(state, probability)` per run, unmerged.
fn extend_runs(pa: &Pa, runs: &[(usize, Rational)], l: usize) -> Vec<(usize, Rational)> {
    let mut out = Vec::new();
    for (q, p) in runs {
        for (t, pt) in pa.successors(*q, l) {
            out.push((*t, p * pt));
        }
    }
    out
}

fn accepted(pa: &Pa, runs: &[(usize, Rational)]) -> Rational {
    runs.iter().filter(|(q, _)| pa.is_final(*q)).map(|(_, p)| p).sum()
}

/// Visits every word of length at most `max_len` in canonical order with the values
/// of `a` and `b`, following unmerged runs along a shared prefix tree.
pub fn sweep_pair(a: &Pa, b: &Pa, max_len: usize, visit: &mut dyn FnMut(&[usize], &Rational, &Rational)) -> Result<u64, OracleError> {
    if a.alphabet() != b.alphabet() {
        return Err(OracleError::AlphabetMismatch);
    }
    let start = |pa: &Pa| -> Vec<(usize, Rational)> {
        pa.initial_support().into_iter().map(|q| (q, pa.initial(q).clone())).collect()
    };
    let k = a.num_letters();
    // Breadth-first by length so that the visiting order is canonical.
    let mut layer: Vec<(Word, Alive, Alive)> = vec![(Vec::new(), start(a), start(b))];
    let mut checked = 0u64;
    for len in 0..=max_len {
        for (w, ra, rb) in &layer {
            visit(w, &accepted(a, ra), &accepted(b, rb));
            checked += 1;
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * k);
        for (w, ra, rb) in &layer {
            for l in 0..k {
                let mut v = w.clone();
                v.push(l);
                next.push((v, extend_runs(a, ra, l), extend_runs(b, rb, l)));
            }
        }
        layer = next;
    }
    Ok(checked)
}

/// Checks `[[A]](w) <= [[B]](w)` for every `|w| <= max_len`. Witnesses are the words
/// with `[[A]](w) > [[B]](w)`, valued by the difference.
pub fn brute_force_containment(a: &Pa, b: &Pa, max_len: usize) -> Result<SweepReport<Word>, OracleError> {
    let mut witnesses = Vec::new();
    let mut extremal: Option<(Word, Rational)> = None;
    let checked = sweep_pair(a, b, max_len, &mut |w, va, vb| {
        let d = va - vb;
        if extremal.as_ref().is_none_or(|(_, e)| d > *e) {
            extremal = Some((w.to_vec(), d.clone()));
        }
        if d > Rational::zero() {
            witnesses.push((w.to_vec(), d));
        }
    })?;
    Ok(SweepReport { bound: max_len as u64, checked, witnesses, extremal })
}

/// Sweeps the box `[-radius, radius]^n`. Witnesses are the solutions, ordered by
/// max-norm and then lexicographically, so the first one is a smallest solution.
/// The extremal entry is the smallest `f` among points satisfying `Mx < c`.
pub fn brute_force_ipexp(inst: &IpExpInstance, radius: u64) -> SweepReport<Vec<BigInt>> {
    let n = inst.n();
    let r = radius as i64;
    let mut x = vec![-r; n];
    let mut witnesses = Vec::new();
    let mut extremal: Option<(Vec<BigInt>, Rational)> = None;
    let mut checked = 0u64;
    loop {
        let point: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        checked += 1;
        if inst.satisfies_rows(&point) {
            let v = inst.f.eval(&point);
            if extremal.as_ref().is_none_or(|(_, e)| v < *e) {
                extremal = Some((point.clone(), v.clone()));
            }
            if v < Rational::one() {
                witnesses.push((point, v));
            }
        }
        // Odometer increment.
        let mut j = n;
        loop {
            if j == 0 {
                witnesses.sort_by(|(p, _), (q, _)| norm(p).cmp(&norm(q)).then_with(|| p.cmp(q)));
                return SweepReport { bound: radius, checked, witnesses, extremal };
            }
            j -= 1;
            if x[j] < r {
                x[j] += 1;
                break;
            }
            x[j] = -r;
        }
    }
}

fn norm(p: &[BigInt]) -> BigInt {
    p.iter().map(|v| if *v < BigInt::zero() { -v } else { v.clone() }).max().unwrap_or_default()
}
