//! Unweighted automata: the support of a PA, and the counting DFAs built from it.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    states: Vec<String>,
    delta: Vec<Vec<Vec<usize>>>,
    initial: Vec<bool>,
    finals: Vec<bool>,
}

impl Nfa {
    /// `delta[q][a]` lists the successors of `q` on letter `a`; lists are sorted here.
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        mut delta: Vec<Vec<Vec<usize>>>,
        initial: Vec<bool>,
        finals: Vec<bool>,
    ) -> Self {
        for rows in delta.iter_mut() {
            for row in rows.iter_mut() {
                row.sort_unstable();
                row.dedup();
            }
        }
        Nfa { alphabet, states, delta, initial, finals }
    }

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

    pub fn successors(&self, q: usize, a: usize) -> &[usize] {
        &self.delta[q][a]
    }

    pub fn is_initial(&self, q: usize) -> bool {
        self.initial[q]
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn initial_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.initial[q]).collect()
    }

    /// True when there is at most one initial state and every row has at most one target.
    pub fn is_deterministic(&self) -> bool {
        self.initial_states().len() <= 1
            && self.delta.iter().all(|rows| rows.iter().all(|r| r.len() <= 1))
    }

    /// Successor relation ignoring letters.
    pub fn graph(&self) -> Vec<Vec<usize>> {
        self.delta
            .iter()
            .map(|rows| {
                let mut out: Vec<usize> = rows.iter().flatten().copied().collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect()
    }

    /// States reachable (in zero or more steps) from `sources`.
    pub fn reachable_from(&self, sources: &[usize]) -> Vec<bool> {
        let graph = self.graph();
        let mut seen = vec![false; self.num_states()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            for &q in &graph[p] {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.num_states()];
        for (p, succ) in self.graph().into_iter().enumerate() {
            for q in succ {
                preds[q].push(p);
            }
        }
        let mut seen = self.finals.clone();
        let mut queue: VecDeque<usize> = (0..self.num_states()).filter(|&q| seen[q]).collect();
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Restriction to useful states (reachable and co-reachable).
    pub fn trim(&self) -> Nfa {
        let fwd = self.reachable_from(&self.initial_states());
        let bwd = self.coreachable();
        let keep: Vec<bool> = (0..self.num_states()).map(|q| fwd[q] && bwd[q]).collect();
        let mut map = vec![usize::MAX; self.num_states()];
        let mut states = Vec::new();
        for q in 0..self.num_states() {
            if keep[q] {
                map[q] = states.len();
                states.push(self.states[q].clone());
            }
        }
        let mut delta = Vec::new();
        let mut initial = Vec::new();
        let mut finals = Vec::new();
        for q in (0..self.num_states()).filter(|&q| keep[q]) {
            delta.push(
                self.delta[q]
                    .iter()
                    .map(|row| row.iter().filter(|&&t| keep[t]).map(|&t| map[t]).collect())
                    .collect(),
            );
            initial.push(self.initial[q]);
            finals.push(self.finals[q]);
        }
        Nfa::new(self.alphabet.clone(), states, delta, initial, finals)
    }

    /// Subset simulation.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur = self.initial.clone();
        for &a in word {
            let mut next = vec![false; self.num_states()];
            for (p, on) in cur.iter().enumerate() {
                if *on {
                    for &q in &self.delta[p][a] {
                        next[q] = true;
                    }
                }
            }
            cur = next;
        }
        cur.iter().zip(&self.finals).any(|(c, f)| *c && *f)
    }
}
