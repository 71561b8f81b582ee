//! Degree of ambiguity of the underlying automaton.
//!
//! Classification works on the trimmed support. Exponential ambiguity is detected
//! on the self-product: a pair `(s, s)` and a pair `(p, q)` with `p != q` in the same
//! strongly connected component give two distinct `s`-loops on one word. Polynomial
//! degree is the longest chain of "IDA" patterns, where a pattern is `p != q` with
//! runs `p -> p`, `p -> q` and `q -> q` on a common non-empty word, found by
//! reachability in the triple product. Without any pattern the automaton is finitely
//! ambiguous and its exact bound comes from a subset-style construction that tracks
//! how many runs end in each state.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::{on_cycle, reachable, reverse, scc_ids};
use crate::nfa::Nfa;
use crate::pa::Pa;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbiguityClass {
    Unambiguous,
    Finite { k: u64 },
    Polynomial { degree: usize },
    Exponential,
}

impl AmbiguityClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, AmbiguityClass::Unambiguous | AmbiguityClass::Finite { .. })
    }

    pub fn is_polynomial_or_better(&self) -> bool {
        !matches!(self, AmbiguityClass::Exponential)
    }
}

impl fmt::Display for AmbiguityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbiguityClass::Unambiguous => write!(f, "unambiguous"),
            AmbiguityClass::Finite { k } => write!(f, "finite k={k}"),
            AmbiguityClass::Polynomial { degree } => write!(f, "polynomial degree={degree}"),
            AmbiguityClass::Exponential => write!(f, "exponential"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmbiguityError {
    #[error("automaton is not finitely ambiguous ({0})")]
    NotFinite(AmbiguityClass),
    #[error("counting construction exceeded {0} states")]
    Budget(usize),
}

/// Default cap on the number of count vectors explored.
pub const COUNTING_STATE_LIMIT: usize = 1_000_000;

pub fn classify(pa: &Pa) -> AmbiguityClass {
    classify_nfa(&pa.to_nfa())
}

pub fn classify_nfa(nfa: &Nfa) -> AmbiguityClass {
    let t = nfa.trim();
    let n = t.num_states();
    if n == 0 {
        return AmbiguityClass::Unambiguous;
    }
    let pairs = PairGraph::new(&t);
    if pairs.has_eda() {
        return AmbiguityClass::Exponential;
    }
    let ida = ida_pairs(&t, &pairs);
    if !ida.is_empty() {
        return AmbiguityClass::Polynomial { degree: longest_chain(&t, &ida) };
    }
    if pairs.is_unambiguous(&t) {
        return AmbiguityClass::Unambiguous;
    }
    match count_bound(&t, COUNTING_STATE_LIMIT) {
        Ok(k) if k <= 1 => AmbiguityClass::Unambiguous,
        Ok(k) => AmbiguityClass::Finite { k },
        // Finite ambiguity is established; the bound itself is too costly to pin down.
        Err(_) => AmbiguityClass::Finite { k: u64::MAX },
    }
}

/// Self-product restricted to the letter-synchronised pair graph.
struct PairGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    scc: Vec<usize>,
}

impl PairGraph {
    fn new(t: &Nfa) -> Self {
        let n = t.num_states();
        let mut adj = vec![Vec::new(); n * n];
        for p in 0..n {
            for q in 0..n {
                let out = &mut adj[p * n + q];
                for a in 0..t.num_letters() {
                    for &p2 in t.successors(p, a) {
                        for &q2 in t.successors(q, a) {
                            out.push(p2 * n + q2);
                        }
                    }
                }
                out.sort_unstable();
                out.dedup();
            }
        }
        let scc = scc_ids(&adj);
        PairGraph { n, adj, scc }
    }

    fn has_eda(&self) -> bool {
        let n = self.n;
        let mut diag_comp = vec![false; n * n];
        for s in 0..n {
            diag_comp[self.scc[s * n + s]] = true;
        }
        (0..n * n).any(|v| v / n != v % n && diag_comp[self.scc[v]])
    }

    fn is_unambiguous(&self, t: &Nfa) -> bool {
        let n = self.n;
        let init = t.initial_states();
        let sources: Vec<usize> =
            init.iter().flat_map(|&i| init.iter().map(move |&j| i * n + j)).collect();
        let fwd = reachable(&self.adj, &sources, 0);
        let finals: Vec<usize> = (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .filter(|&(p, q)| t.is_final(p) && t.is_final(q))
            .map(|(p, q)| p * n + q)
            .collect();
        let bwd = reachable(&reverse(&self.adj), &finals, 0);
        !(0..n * n).any(|v| v / n != v % n && fwd[v] && bwd[v])
    }
}

/// All IDA patterns `(p, q)`.
fn ida_pairs(t: &Nfa, pairs: &PairGraph) -> Vec<(usize, usize)> {
    let n = t.num_states();
    let cyclic = on_cycle(&pairs.adj, &pairs.scc);
    let mut out = Vec::new();
    for p in 0..n {
        let from_diag = reachable(&pairs.adj, &[p * n + p], 1);
        for q in (0..n).filter(|&q| q != p) {
            let v = p * n + q;
            if !from_diag[v] || !cyclic[v] {
                continue;
            }
            if !reachable(&pairs.adj, &[v], 1)[q * n + q] {
                continue;
            }
            if triple_reaches(t, (p, p, q), (p, q, q)) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Is there a non-empty word leading the triple `from` to the triple `to`?
fn triple_reaches(t: &Nfa, from: (usize, usize, usize), to: (usize, usize, usize)) -> bool {
    let n = t.num_states();
    let enc = |(x, y, z): (usize, usize, usize)| (x * n + y) * n + z;
    let mut seen = vec![false; n * n * n];
    let mut queue = VecDeque::new();
    queue.push_back(from);
    while let Some((x, y, z)) = queue.pop_front() {
        for a in 0..t.num_letters() {
            for &x2 in t.successors(x, a) {
                for &y2 in t.successors(y, a) {
                    for &z2 in t.successors(z, a) {
                        let next = (x2, y2, z2);
                        if next == to {
                            return true;
                        }
                        let code = enc(next);
                        if !seen[code] {
                            seen[code] = true;
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    false
}

/// Longest chain `(p1,q1) ... (pd,qd)` with `q_i` reaching `p_{i+1}`.
fn longest_chain(t: &Nfa, ida: &[(usize, usize)]) -> usize {
    let reach: Vec<Vec<bool>> = (0..t.num_states()).map(|q| t.reachable_from(&[q])).collect();
    let mut memo: Vec<Option<usize>> = vec![None; ida.len()];
    let mut on_stack = vec![false; ida.len()];
    fn visit(
        i: usize,
        ida: &[(usize, usize)],
        reach: &[Vec<bool>],
        memo: &mut Vec<Option<usize>>,
        on_stack: &mut Vec<bool>,
    ) -> usize {
        if let Some(d) = memo[i] {
            return d;
        }
        on_stack[i] = true;
        let mut best = 1;
        for j in 0..ida.len() {
            // Without exponential ambiguity the relation is acyclic; the guard keeps
            // the search finite regardless.
            if j != i && !on_stack[j] && reach[ida[i].1][ida[j].0] {
                best = best.max(1 + visit(j, ida, reach, memo, on_stack));
            }
        }
        on_stack[i] = false;
        memo[i] = Some(best);
        best
    }
    (0..ida.len())
        .map(|i| visit(i, ida, &reach, &mut memo, &mut on_stack))
        .max()
        .unwrap_or(0)
}

/// Deterministic automaton whose states are vectors counting the runs that end in
/// each state, saturated at `cap`.
#[derive(Debug, Clone)]
pub struct CountingDfa {
    pub vectors: Vec<Vec<u64>>,
    /// `delta[s][a]` is the successor of count vector `s` on letter `a`.
    pub delta: Vec<Vec<usize>>,
    pub start: usize,
    /// Number of accepting runs represented by each vector (saturated at `cap`).
    pub accepting_runs: Vec<u64>,
}

impl CountingDfa {
    /// Builds the construction over `t`, which should be trimmed.
    pub fn build(t: &Nfa, cap: u64, limit: usize) -> Result<CountingDfa, AmbiguityError> {
        let n = t.num_states();
        let count = |v: &[u64]| {
            (0..n)
                .filter(|&q| t.is_final(q))
                .fold(0u64, |acc, q| acc.saturating_add(v[q]).min(cap))
        };
        let start: Vec<u64> = (0..n).map(|q| u64::from(t.is_initial(q)).min(cap)).collect();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut dfa = CountingDfa {
            vectors: vec![start.clone()],
            delta: Vec::new(),
            start: 0,
            accepting_runs: vec![count(&start)],
        };
        index.insert(start, 0);
        let mut i = 0;
        while i < dfa.vectors.len() {
            let mut row = Vec::with_capacity(t.num_letters());
            for a in 0..t.num_letters() {
                let mut next = vec![0u64; n];
                for p in 0..n {
                    let c = dfa.vectors[i][p];
                    if c == 0 {
                        continue;
                    }
                    for &q in t.successors(p, a) {
                        next[q] = next[q].saturating_add(c).min(cap);
                    }
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if dfa.vectors.len() >= limit {
                            return Err(AmbiguityError::Budget(limit));
                        }
                        let id = dfa.vectors.len();
                        dfa.accepting_runs.push(count(&next));
                        dfa.vectors.push(next.clone());
                        index.insert(next, id);
                        id
                    }
                };
                row.push(id);
            }
            dfa.delta.push(row);
            i += 1;
        }
        Ok(dfa)
    }

    pub fn num_states(&self) -> usize {
        self.vectors.len()
    }

    pub fn run(&self, word: &[usize]) -> usize {
        word.iter().fold(self.start, |s, &a| self.delta[s][a])
    }
}

fn count_bound(t: &Nfa, limit: usize) -> Result<u64, AmbiguityError> {
    // Every count is bounded by the ambiguity on a trimmed automaton, so saturation
    // only matters if the caller passed a non-finitely-ambiguous automaton.
    let dfa = CountingDfa::build(t, u64::MAX, limit)?;
    Ok(dfa.accepting_runs.iter().copied().max().unwrap_or(0).max(1))
}

/// Maximal number of accepting runs over all words.
pub fn max_finite_ambiguity(pa: &Pa) -> Result<u64, AmbiguityError> {
    let class = classify(pa);
    if !class.is_finite() {
        return Err(AmbiguityError::NotFinite(class));
    }
    count_bound(&pa.to_nfa().trim(), COUNTING_STATE_LIMIT)
}

/// Deterministic automaton for the words with exactly `i` accepting runs in `pa`.
pub fn fixed_ambiguity_language(pa: &Pa, i: u64) -> Result<Nfa, AmbiguityError> {
    let k = max_finite_ambiguity(pa)?;
    let t = pa.to_nfa().trim();
    let dfa = CountingDfa::build(&t, k + 1, COUNTING_STATE_LIMIT)?;
    Ok(counting_to_nfa(&dfa, pa.alphabet().to_vec(), |c| c == i))
}

pub(crate) fn counting_to_nfa(
    dfa: &CountingDfa,
    alphabet: Vec<String>,
    accept: impl Fn(u64) -> bool,
) -> Nfa {
    let states = dfa
        .vectors
        .iter()
        .map(|v| {
            let parts: Vec<String> = v.iter().map(u64::to_string).collect();
            format!("c[{}]", parts.join(","))
        })
        .collect();
    let delta = dfa.delta.iter().map(|row| row.iter().map(|&s| vec![s]).collect()).collect();
    let initial = (0..dfa.num_states()).map(|s| s == dfa.start).collect();
    let finals = dfa.accepting_runs.iter().map(|&c| accept(c)).collect();
    Nfa::new(alphabet, states, delta, initial, finals)
}
