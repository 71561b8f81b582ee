//! The product automaton that follows `k` distinct accepting runs of `A` and `l`
//! distinct accepting runs of `B` on words with exactly `k` and `l` accepting runs.
//!
//! A product state combines the run-counting automata of `A` and `B` (saturated just
//! above `k` and `l`), the current state of every copy, and for each side a partition
//! of the copies into groups whose runs have coincided so far. Copies in one group
//! split as soon as they take different transitions and never merge again. A state
//! is accepting when both counters read exactly `k` and `l`, every copy is in a final
//! state and every group is a singleton.

use std::collections::{HashMap, VecDeque};

use crate::ambiguity::CountingDfa;
use crate::pa::{trim, Pa, Run};
use crate::rational::Rational;

use super::cycles::Host;
use super::StructureError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub count_a: usize,
    pub count_b: usize,
    pub copies_a: Vec<usize>,
    pub copies_b: Vec<usize>,
    /// Group label of each copy, normalised so labels appear in first-use order.
    pub groups_a: Vec<u8>,
    pub groups_b: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTransition {
    pub letter: usize,
    pub target: usize,
    /// Probability taken by each copy: the `k` copies of `A` first, then the `l` copies of `B`.
    pub probs: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct ProductAutomaton {
    pub k: usize,
    pub l: usize,
    pub num_letters: usize,
    pub states: Vec<ProductState>,
    /// Initial states with the initial weight of each copy.
    pub initial: Vec<(usize, Vec<Rational>)>,
    /// Outgoing transitions sorted by `(letter, target)`.
    pub trans: Vec<Vec<ProductTransition>>,
    pub accepting: Vec<bool>,
}

impl Host for ProductAutomaton {
    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn edges(&self, q: usize) -> Vec<(usize, usize)> {
        self.trans[q].iter().map(|t| (t.letter, t.target)).collect()
    }
}

impl ProductAutomaton {
    pub fn transition(&self, p: usize, letter: usize, q: usize) -> Option<&ProductTransition> {
        self.trans[p]
            .binary_search_by_key(&(letter, q), |t| (t.letter, t.target))
            .ok()
            .map(|i| &self.trans[p][i])
    }

    pub fn initial_probs(&self, q: usize) -> Option<&[Rational]> {
        self.initial.iter().find(|(s, _)| *s == q).map(|(_, p)| p.as_slice())
    }

    /// Per-copy probability of a run: initial weight times the transitions taken.
    pub fn copy_probabilities(&self, run: &Run) -> Option<Vec<Rational>> {
        let mut probs = self.initial_probs(run.start)?.to_vec();
        let mut cur = run.start;
        for &(a, q) in &run.steps {
            let t = self.transition(cur, a, q)?;
            for (acc, p) in probs.iter_mut().zip(&t.probs) {
                *acc *= p;
            }
            cur = q;
        }
        Some(probs)
    }

    /// Per-copy product of transition probabilities along a path, without initial weights.
    pub fn path_probabilities(&self, run: &Run) -> Option<Vec<Rational>> {
        let mut probs = vec![Rational::from_integer(1.into()); self.k + self.l];
        let mut cur = run.start;
        for &(a, q) in &run.steps {
            let t = self.transition(cur, a, q)?;
            for (acc, p) in probs.iter_mut().zip(&t.probs) {
                *acc *= p;
            }
            cur = q;
        }
        Some(probs)
    }

    pub fn is_initial(&self, q: usize) -> bool {
        self.initial.iter().any(|(s, _)| *s == q)
    }

    pub fn accepts_run(&self, run: &Run) -> bool {
        self.is_initial(run.start)
            && self.accepting[run.last_state()]
            && self.path_probabilities(run).is_some()
    }
}

fn normalise(labels: &[u8]) -> Vec<u8> {
    let mut map: Vec<(u8, u8)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(old, _)| *old == l) {
            Some((_, new)) => *new,
            None => {
                let new = map.len() as u8;
                map.push((l, new));
                new
            }
        })
        .collect()
}

/// Group labels for copies that start (or move) together: copies sharing a label and
/// a target stay together.
fn split_groups(groups: &[u8], targets: &[usize]) -> Vec<u8> {
    let mut keys: Vec<(u8, usize)> = Vec::new();
    let labels: Vec<u8> = groups
        .iter()
        .zip(targets)
        .map(|(&g, &t)| match keys.iter().position(|&k| k == (g, t)) {
            Some(i) => i as u8,
            None => {
                keys.push((g, t));
                (keys.len() - 1) as u8
            }
        })
        .collect();
    normalise(&labels)
}

fn all_distinct(groups: &[u8]) -> bool {
    groups.iter().enumerate().all(|(i, g)| !groups[..i].contains(g))
}

/// Every way of choosing one option per slot.
fn cartesian<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    options.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

/// Builds the reachable, co-reachable part of the product for `k` copies of `a` and
/// `l` copies of `b`. Both automata are trimmed first.
pub fn build_product(
    a: &Pa,
    b: &Pa,
    k: usize,
    l: usize,
    max_states: usize,
) -> Result<ProductAutomaton, StructureError> {
    if a.alphabet() != b.alphabet() {
        return Err(StructureError::AlphabetMismatch);
    }
    if k > 64 || l > 64 {
        return Err(StructureError::Budget { what: "copies", limit: 64 });
    }
    let (a, b) = (trim(a), trim(b));
    let dfa_a = CountingDfa::build(&a.to_nfa(), k as u64 + 1, max_states)
        .map_err(|_| StructureError::Budget { what: "product states", limit: max_states })?;
    let dfa_b = CountingDfa::build(&b.to_nfa(), l as u64 + 1, max_states)
        .map_err(|_| StructureError::Budget { what: "product states", limit: max_states })?;
    let letters = a.num_letters();

    let mut states: Vec<ProductState> = Vec::new();
    let mut index: HashMap<ProductState, usize> = HashMap::new();
    let mut trans: Vec<Vec<ProductTransition>> = Vec::new();
    let mut initial = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |st: ProductState,
                      states: &mut Vec<ProductState>,
                      trans: &mut Vec<Vec<ProductTransition>>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, StructureError> {
        if let Some(&i) = index.get(&st) {
            return Ok(i);
        }
        if states.len() >= max_states {
            return Err(StructureError::Budget { what: "product states", limit: max_states });
        }
        let i = states.len();
        index.insert(st.clone(), i);
        states.push(st);
        trans.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };

    let init_a: Vec<usize> = a.initial_support();
    let init_b: Vec<usize> = b.initial_support();
    let starts_a = cartesian(&vec![init_a; k]);
    let starts_b = cartesian(&vec![init_b; l]);
    for ca in &starts_a {
        for cb in &starts_b {
            let st = ProductState {
                count_a: dfa_a.start,
                count_b: dfa_b.start,
                copies_a: ca.clone(),
                copies_b: cb.clone(),
                groups_a: split_groups(&vec![0; k], ca),
                groups_b: split_groups(&vec![0; l], cb),
            };
            let probs: Vec<Rational> = ca
                .iter()
                .map(|&q| a.initial(q).clone())
                .chain(cb.iter().map(|&q| b.initial(q).clone()))
                .collect();
            let id = intern(st, &mut states, &mut trans, &mut queue)?;
            initial.push((id, probs));
        }
    }

    while let Some(i) = queue.pop_front() {
        let st = states[i].clone();
        let mut out = Vec::new();
        for letter in 0..letters {
            let opts_a: Vec<Vec<(usize, Rational)>> =
                st.copies_a.iter().map(|&q| a.successors(q, letter).to_vec()).collect();
            let opts_b: Vec<Vec<(usize, Rational)>> =
                st.copies_b.iter().map(|&q| b.successors(q, letter).to_vec()).collect();
            if opts_a.iter().chain(&opts_b).any(|o| o.is_empty()) {
                continue;
            }
            for choice_a in cartesian(&opts_a) {
                for choice_b in cartesian(&opts_b) {
                    let ta: Vec<usize> = choice_a.iter().map(|(q, _)| *q).collect();
                    let tb: Vec<usize> = choice_b.iter().map(|(q, _)| *q).collect();
                    let next = ProductState {
                        count_a: dfa_a.delta[st.count_a][letter],
                        count_b: dfa_b.delta[st.count_b][letter],
                        groups_a: split_groups(&st.groups_a, &ta),
                        groups_b: split_groups(&st.groups_b, &tb),
                        copies_a: ta,
                        copies_b: tb,
                    };
                    let probs = choice_a
                        .iter()
                        .chain(&choice_b)
                        .map(|(_, p)| p.clone())
                        .collect();
                    let target = intern(next, &mut states, &mut trans, &mut queue)?;
                    out.push(ProductTransition { letter, target, probs });
                }
            }
        }
        out.sort_by_key(|t| (t.letter, t.target));
        trans[i] = out;
    }

    let accepting: Vec<bool> = states
        .iter()
        .map(|st| {
            dfa_a.accepting_runs[st.count_a] == k as u64
                && dfa_b.accepting_runs[st.count_b] == l as u64
                && st.copies_a.iter().all(|&q| a.is_final(q))
                && st.copies_b.iter().all(|&q| b.is_final(q))
                && all_distinct(&st.groups_a)
                && all_distinct(&st.groups_b)
        })
        .collect();

    let full = ProductAutomaton { k, l, num_letters: letters, states, initial, trans, accepting };
    Ok(prune(full))
}

/// Drops states that cannot reach an accepting state.
fn prune(p: ProductAutomaton) -> ProductAutomaton {
    let n = p.states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, ts) in p.trans.iter().enumerate() {
        for t in ts {
            preds[t.target].push(s);
        }
    }
    let mut keep = p.accepting.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| keep[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &s in &preds[q] {
            if !keep[s] {
                keep[s] = true;
                queue.push_back(s);
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut next = 0;
    for q in 0..n {
        if keep[q] {
            map[q] = next;
            next += 1;
        }
    }
    let ProductAutomaton { k, l, num_letters, states, initial, trans, accepting } = p;
    let mut out = ProductAutomaton {
        k,
        l,
        num_letters,
        states: Vec::new(),
        initial: initial
            .into_iter()
            .filter(|(s, _)| keep[*s])
            .map(|(s, pr)| (map[s], pr))
            .collect(),
        trans: Vec::new(),
        accepting: Vec::new(),
    };
    for ((q, st), ts) in states.into_iter().enumerate().zip(trans) {
        if !keep[q] {
            continue;
        }
        out.states.push(st);
        out.accepting.push(accepting[q]);
        out.trans.push(
            ts.into_iter()
                .filter(|t| keep[t.target])
                .map(|mut t| {
                    t.target = map[t.target];
                    t
                })
                .collect(),
        );
    }
    out
}
