//! Probabilistic automata over exact rationals.
//!
//! A [`Pa`] stores a sparse transition function `delta[q][a] -> [(q', p)]`, a dense
//! initial distribution and a set of final states. Letters and states are addressed
//! by index internally; their textual names are kept for rendering and for the
//! deterministic naming of composite automata. The alphabet is kept sorted, so two
//! automata over the same letter set agree on letter indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::nfa::Nfa;
use crate::rational::{fmt_rational, Rational};

/// A word as a sequence of letter indices into the (sorted) alphabet.
pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaError {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("letter `{0}` declared twice")]
    DuplicateLetter(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("transition {src} --{letter}--> {dst} given twice")]
    DuplicateTransition { src: String, letter: String, dst: String },
    #[error("{what} has probability {value}, outside (0,1]")]
    ProbabilityOutOfRange { what: String, value: String },
    #[error("outgoing probabilities of `{state}` on `{letter}` sum to {sum} > 1")]
    RowSumExceedsOne { state: String, letter: String, sum: String },
    #[error("initial probabilities sum to {0} > 1")]
    InitialSumExceedsOne(String),
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
    #[error("mixture weights must be non-negative and sum to at most 1 (got {0})")]
    BadWeights(String),
}

/// A probabilistic automaton. Construct through [`PaBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pa {
    alphabet: Vec<String>,
    states: Vec<String>,
    delta: Vec<Vec<Vec<(usize, Rational)>>>,
    initial: Vec<Rational>,
    finals: Vec<bool>,
}

/// A run as a start state followed by `(letter, target)` steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    pub start: usize,
    pub steps: Vec<(usize, usize)>,
}

impl Run {
    pub fn new(start: usize) -> Self {
        Run { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// State at position `i`, where position 0 is the start state.
    pub fn state_at(&self, i: usize) -> usize {
        if i == 0 {
            self.start
        } else {
            self.steps[i - 1].1
        }
    }

    pub fn last_state(&self) -> usize {
        self.state_at(self.len())
    }

    /// The `len() + 1` visited states in order.
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|&(_, q)| q))
    }

    pub fn state_set(&self) -> BTreeSet<usize> {
        self.states().collect()
    }

    pub fn word(&self) -> Word {
        self.steps.iter().map(|&(a, _)| a).collect()
    }

    /// True when the run returns to its start state.
    pub fn is_cycle(&self) -> bool {
        !self.is_empty() && self.last_state() == self.start
    }
}

impl Pa {
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn letter_index(&self, token: &str) -> Option<usize> {
        self.alphabet.binary_search_by(|l| l.as_str().cmp(token)).ok()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn successors(&self, q: usize, a: usize) -> &[(usize, Rational)] {
        &self.delta[q][a]
    }

    pub fn transition_prob(&self, p: usize, a: usize, q: usize) -> Option<&Rational> {
        self.delta[p][a]
            .binary_search_by_key(&q, |(t, _)| *t)
            .ok()
            .map(|i| &self.delta[p][a][i].1)
    }

    pub fn initial(&self, q: usize) -> &Rational {
        &self.initial[q]
    }

    pub fn initial_vector(&self) -> &[Rational] {
        &self.initial
    }

    pub fn initial_support(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| !self.initial[q].is_zero()).collect()
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.finals[q]).collect()
    }

    /// Every transition as `(src, letter, dst, prob)`, in index order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> + '_ {
        self.delta.iter().enumerate().flat_map(|(p, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(a, row)| row.iter().map(move |(q, pr)| (p, a, *q, pr)))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions().count()
    }

    /// Maps letter tokens to indices.
    pub fn parse_word<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Word, PaError> {
        tokens
            .iter()
            .map(|t| {
                self.letter_index(t.as_ref())
                    .ok_or_else(|| PaError::UnknownLetter(t.as_ref().to_string()))
            })
            .collect()
    }

    pub fn render_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let single = self.alphabet.iter().all(|l| l.chars().count() == 1);
        let tokens: Vec<&str> = word.iter().map(|&a| self.alphabet[a].as_str()).collect();
        if single {
            tokens.concat()
        } else {
            tokens.join(" ")
        }
    }

    fn check_word(&self, word: &[usize]) -> Result<(), PaError> {
        match word.iter().find(|&&a| a >= self.num_letters()) {
            Some(a) => Err(PaError::UnknownLetter(format!("#{a}"))),
            None => Ok(()),
        }
    }

    /// One step of forward propagation of a (sub-)distribution over states.
    pub fn step(&self, dist: &[Rational], a: usize) -> Vec<Rational> {
        let mut next = vec![Rational::zero(); self.num_states()];
        for (p, mass) in dist.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for (q, pr) in &self.delta[p][a] {
                next[*q] += mass * pr;
            }
        }
        next
    }

    /// Mass of a distribution on final states.
    pub fn accepted_mass(&self, dist: &[Rational]) -> Rational {
        dist.iter()
            .enumerate()
            .filter(|(q, _)| self.finals[*q])
            .fold(Rational::zero(), |acc, (_, m)| acc + m)
    }

    /// `[[A]](w)`: the total probability of accepting runs on `word`.
    pub fn evaluate(&self, word: &[usize]) -> Result<Rational, PaError> {
        self.check_word(word)?;
        let mut dist = self.initial.clone();
        for &a in word {
            dist = self.step(&dist, a);
        }
        Ok(self.accepted_mass(&dist))
    }

    /// Probability of a run, including the initial weight; `None` if it is not a run of `self`.
    pub fn run_probability(&self, run: &Run) -> Option<Rational> {
        let mut prob = self.initial.get(run.start)?.clone();
        if prob.is_zero() {
            return None;
        }
        let mut cur = run.start;
        for &(a, q) in &run.steps {
            if a >= self.num_letters() {
                return None;
            }
            prob *= self.transition_prob(cur, a, q)?;
            cur = q;
        }
        Some(prob)
    }

    /// Underlying nondeterministic automaton (support of every weight).
    pub fn to_nfa(&self) -> Nfa {
        let delta = self
            .delta
            .iter()
            .map(|rows| rows.iter().map(|row| row.iter().map(|(q, _)| *q).collect()).collect())
            .collect();
        Nfa::new(
            self.alphabet.clone(),
            self.states.clone(),
            delta,
            self.initial.iter().map(|p| !p.is_zero()).collect(),
            self.finals.clone(),
        )
    }

    /// Maximal probability different from 1 among transitions and initial weights.
    pub fn max_non_one_probability(&self) -> Option<Rational> {
        self.transitions()
            .map(|(_, _, _, p)| p)
            .chain(self.initial.iter().filter(|p| !p.is_zero()))
            .filter(|p| !p.is_one())
            .max()
            .cloned()
    }

    /// States reachable from the initial support, and states that can reach a final state.
    fn useful_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut queue: VecDeque<usize> = self.initial_support().into();
        for &q in &queue {
            fwd[q] = true;
        }
        while let Some(p) = queue.pop_front() {
            for row in &self.delta[p] {
                for (q, _) in row {
                    if !fwd[*q] {
                        fwd[*q] = true;
                        queue.push_back(*q);
                    }
                }
            }
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (p, _, q, _) in self.transitions() {
            preds[q].push(p);
        }
        let mut bwd = self.finals.clone();
        let mut queue: VecDeque<usize> = self.finals().into();
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !bwd[p] {
                    bwd[p] = true;
                    queue.push_back(p);
                }
            }
        }
        (0..n).map(|q| fwd[q] && bwd[q]).collect()
    }

    /// Restriction to the given states (kept in their original order).
    pub fn restrict(&self, keep: &[bool]) -> Pa {
        let map: Vec<Option<usize>> = {
            let mut next = 0;
            keep.iter()
                .map(|&k| {
                    k.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let mut out = Pa {
            alphabet: self.alphabet.clone(),
            states: Vec::new(),
            delta: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
        };
        for q in 0..self.num_states() {
            if map[q].is_none() {
                continue;
            }
            out.states.push(self.states[q].clone());
            out.initial.push(self.initial[q].clone());
            out.finals.push(self.finals[q]);
            out.delta.push(
                self.delta[q]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .filter_map(|(t, p)| map[*t].map(|t2| (t2, p.clone())))
                            .collect()
                    })
                    .collect(),
            );
        }
        out
    }
}

/// Accumulates named states, letters and weights, then validates into a [`Pa`].
#[derive(Debug, Clone, Default)]
pub struct PaBuilder {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Vec<(String, Rational)>,
    finals: Vec<String>,
    transitions: Vec<(String, String, String, Rational)>,
}

impl PaBuilder {
    pub fn new<S: AsRef<str>>(alphabet: &[S]) -> Self {
        PaBuilder {
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn state(mut self, name: &str) -> Self {
        self.add_state(name);
        self
    }

    pub fn add_state(&mut self, name: &str) {
        self.states.push(name.to_string());
    }

    pub fn initial(mut self, name: &str, p: Rational) -> Self {
        self.add_initial(name, p);
        self
    }

    pub fn add_initial(&mut self, name: &str, p: Rational) {
        self.initial.push((name.to_string(), p));
    }

    pub fn final_state(mut self, name: &str) -> Self {
        self.add_final(name);
        self
    }

    pub fn add_final(&mut self, name: &str) {
        self.finals.push(name.to_string());
    }

    pub fn transition(mut self, src: &str, letter: &str, dst: &str, p: Rational) -> Self {
        self.add_transition(src, letter, dst, p);
        self
    }

    pub fn add_transition(&mut self, src: &str, letter: &str, dst: &str, p: Rational) {
        self.transitions
            .push((src.to_string(), letter.to_string(), dst.to_string(), p));
    }

    /// Validates every invariant. States must be declared with [`PaBuilder::state`]
    /// before they are referenced.
    pub fn build(self) -> Result<Pa, PaError> {
        let mut alphabet = self.alphabet;
        if alphabet.is_empty() {
            return Err(PaError::EmptyAlphabet);
        }
        alphabet.sort();
        if let Some(w) = alphabet.windows(2).find(|w| w[0] == w[1]) {
            return Err(PaError::DuplicateLetter(w[0].clone()));
        }
        let mut index = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(PaError::DuplicateState(s.clone()));
            }
        }
        let n = self.states.len();
        let state = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| PaError::UnknownState(name.to_string()))
        };
        let letter = |tok: &str| {
            alphabet
                .binary_search_by(|l| l.as_str().cmp(tok))
                .map_err(|_| PaError::UnknownLetter(tok.to_string()))
        };
        let check_prob = |what: String, p: &Rational| {
            if p.is_positive() && *p <= Rational::one() {
                Ok(())
            } else {
                Err(PaError::ProbabilityOutOfRange { what, value: fmt_rational(p) })
            }
        };

        let mut initial = vec![Rational::zero(); n];
        for (name, p) in &self.initial {
            check_prob(format!("initial weight of `{name}`"), p)?;
            let q = state(name)?;
            initial[q] += p;
        }
        let total: Rational = initial.iter().sum();
        if total > Rational::one() {
            return Err(PaError::InitialSumExceedsOne(fmt_rational(&total)));
        }

        let mut finals = vec![false; n];
        for name in &self.finals {
            finals[state(name)?] = true;
        }

        let mut delta: Vec<Vec<Vec<(usize, Rational)>>> =
            vec![vec![Vec::new(); alphabet.len()]; n];
        for (src, tok, dst, p) in &self.transitions {
            check_prob(format!("transition {src} --{tok}--> {dst}"), p)?;
            let (s, a, d) = (state(src)?, letter(tok)?, state(dst)?);
            let row = &mut delta[s][a];
            match row.binary_search_by_key(&d, |(t, _)| *t) {
                Ok(_) => {
                    return Err(PaError::DuplicateTransition {
                        src: src.clone(),
                        letter: tok.clone(),
                        dst: dst.clone(),
                    })
                }
                Err(pos) => row.insert(pos, (d, p.clone())),
            }
        }
        for (q, rows) in delta.iter().enumerate() {
            for (a, row) in rows.iter().enumerate() {
                let s: Rational = row.iter().map(|(_, p)| p).sum();
                if s > Rational::one() {
                    return Err(PaError::RowSumExceedsOne {
                        state: self.states[q].clone(),
                        letter: alphabet[a].clone(),
                        sum: fmt_rational(&s),
                    });
                }
            }
        }
        Ok(Pa { alphabet, states: self.states, delta, initial, finals })
    }
}

/// Returns `base` with enough `'` appended to avoid every name in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Disjoint union with initial weights scaled by `d_i`; computes `sum d_i [[A_i]]`.
///
/// State `q` of the `i`-th part is renamed `i.q`.
pub fn weighted_sum(parts: &[(Rational, &Pa)]) -> Result<Pa, PaError> {
    let first = parts.first().ok_or(PaError::BadWeights("no parts".into()))?.1;
    let total: Rational = parts.iter().map(|(d, _)| d).sum();
    if parts.iter().any(|(d, _)| d.is_negative()) || total > Rational::one() {
        return Err(PaError::BadWeights(fmt_rational(&total)));
    }
    if parts.iter().any(|(_, a)| a.alphabet != first.alphabet) {
        return Err(PaError::AlphabetMismatch);
    }
    let mut out = Pa {
        alphabet: first.alphabet.clone(),
        states: Vec::new(),
        delta: Vec::new(),
        initial: Vec::new(),
        finals: Vec::new(),
    };
    for (i, (d, a)) in parts.iter().enumerate() {
        let offset = out.states.len();
        for q in 0..a.num_states() {
            out.states.push(format!("{i}.{}", a.states[q]));
            out.initial.push(d * &a.initial[q]);
            out.finals.push(a.finals[q]);
            out.delta.push(
                a.delta[q]
                    .iter()
                    .map(|row| row.iter().map(|(t, p)| (t + offset, p.clone())).collect())
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// Automaton for `1 - [[A]]`: missing mass is routed to a fresh absorbing sink and
/// finality is swapped. The result has exactly one more state than `a`.
pub fn complement(a: &Pa) -> Pa {
    let sink = a.num_states();
    let mut out = a.clone();
    out.states.push(fresh_name("bot", &a.states));
    out.delta.push((0..a.num_letters()).map(|_| vec![(sink, Rational::one())]).collect());
    for q in 0..a.num_states() {
        for row in out.delta[q].iter_mut() {
            let s: Rational = row.iter().map(|(_, p)| p).sum();
            let missing = Rational::one() - s;
            if missing.is_positive() {
                row.push((sink, missing));
            }
        }
    }
    let init_total: Rational = a.initial.iter().sum();
    out.initial.push(Rational::one() - init_total);
    out.finals = a.finals.iter().map(|f| !f).collect();
    out.finals.push(true);
    out
}

/// Keeps states that are reachable from the initial support and co-reachable to a
/// final state. Values of `[[A]]` are unchanged.
pub fn trim(a: &Pa) -> Pa {
    a.restrict(&a.useful_states())
}
