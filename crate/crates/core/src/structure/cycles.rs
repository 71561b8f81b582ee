//! Simple cycles ("periods") and the peeling decomposition of runs.

use std::collections::BTreeMap;

use crate::pa::{Pa, Run};

/// A letter-labelled graph whose simple cycles can be enumerated.
pub trait Host {
    fn num_states(&self) -> usize;
    /// Outgoing edges `(letter, target)` of `q`, sorted.
    fn edges(&self, q: usize) -> Vec<(usize, usize)>;
}

impl Host for Pa {
    fn num_states(&self) -> usize {
        Pa::num_states(self)
    }

    fn edges(&self, q: usize) -> Vec<(usize, usize)> {
        (0..self.num_letters())
            .flat_map(|a| self.successors(q, a).iter().map(move |(t, _)| (a, *t)))
            .collect()
    }
}

/// Simple cycles of `host` whose states all lie in `within`, in lexicographic order of
/// `(start, steps)`. Every rotation is listed separately, since a cycle is injected at
/// its start state. Returns `None` once more than `limit` cycles are found.
pub fn periods<H: Host + ?Sized>(host: &H, within: &[usize], limit: usize) -> Option<Vec<Run>> {
    let mut allowed = vec![false; host.num_states()];
    for &q in within {
        allowed[q] = true;
    }
    let mut starts: Vec<usize> = within.to_vec();
    starts.sort_unstable();
    starts.dedup();
    let edges: Vec<Vec<(usize, usize)>> = (0..host.num_states())
        .map(|q| {
            if allowed[q] {
                let mut e: Vec<_> = host.edges(q).into_iter().filter(|(_, t)| allowed[*t]).collect();
                e.sort_unstable();
                e
            } else {
                Vec::new()
            }
        })
        .collect();

    let mut out = Vec::new();
    let mut visited = vec![false; host.num_states()];
    for &s in &starts {
        let mut path = Run::new(s);
        if !extend(s, s, &edges, &mut visited, &mut path, &mut out, limit) {
            return None;
        }
    }
    Some(out)
}

fn extend(
    start: usize,
    cur: usize,
    edges: &[Vec<(usize, usize)>],
    visited: &mut [bool],
    path: &mut Run,
    out: &mut Vec<Run>,
    limit: usize,
) -> bool {
    for &(a, t) in &edges[cur] {
        if t == start {
            path.steps.push((a, t));
            out.push(path.clone());
            path.steps.pop();
            if out.len() > limit {
                return false;
            }
        } else if !visited[t] {
            visited[t] = true;
            path.steps.push((a, t));
            let ok = extend(start, t, edges, visited, path, out, limit);
            path.steps.pop();
            visited[t] = false;
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Result of peeling simple cycles off a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub spine: Run,
    /// Multiplicity of each peeled simple cycle.
    pub counts: BTreeMap<Run, u64>,
    /// Peels in removal order: the step index where the cycle sat, and the cycle.
    pub peels: Vec<(usize, Run)>,
}

impl Decomposition {
    /// Re-injects the peeled cycles (last removed first), recovering the original run.
    pub fn reconstruct(&self) -> Run {
        let mut run = self.spine.clone();
        for (pos, cycle) in self.peels.iter().rev() {
            run.steps.splice(*pos..*pos, cycle.steps.iter().copied());
        }
        run
    }
}

/// Finds the first simple-cycle factor `(i, j)` of the state sequence whose removal
/// keeps every state of the run. `occ[q]` counts occurrences of `q` in `states`.
pub(crate) fn removable_factor(states: &[usize], occ: &[u32]) -> Option<(usize, usize)> {
    let mut interior: Vec<usize> = Vec::new();
    for i in 0..states.len() {
        interior.clear();
        for j in i + 1..states.len() {
            if states[j] == states[i] {
                if interior.iter().all(|&q| occ[q] >= 2) {
                    return Some((i, j));
                }
                break;
            }
            if interior.contains(&states[j]) {
                break;
            }
            interior.push(states[j]);
        }
    }
    None
}

fn peel_while(run: &Run, mut keep_going: impl FnMut(&Run) -> bool) -> Decomposition {
    let width = run.states().max().map_or(0, |m| m + 1);
    let mut occ = vec![0u32; width];
    for q in run.states() {
        occ[q] += 1;
    }
    let mut cur = run.clone();
    let mut peels = Vec::new();
    let mut counts = BTreeMap::new();
    while keep_going(&cur) {
        let states: Vec<usize> = cur.states().collect();
        let Some((i, j)) = removable_factor(&states, &occ) else {
            break;
        };
        let cycle = Run { start: states[i], steps: cur.steps[i..j].to_vec() };
        for &(_, q) in &cycle.steps[..cycle.len() - 1] {
            occ[q] -= 1;
        }
        occ[states[i]] -= 1;
        cur.steps.drain(i..j);
        *counts.entry(cycle.clone()).or_insert(0) += 1;
        peels.push((i, cycle));
    }
    Decomposition { spine: cur, counts, peels }
}

/// Peels removable simple cycles while the run is at least `|Q(run)|^2` long. The
/// resulting spine is shorter than the square of its state count and visits the same
/// states as the input.
pub fn simple_cycle_decomposition(run: &Run) -> Decomposition {
    let d = peel_while(run, |r| {
        let q = r.state_set().len();
        r.len() >= q * q
    });
    debug_assert!(d.spine.len() < d.spine.state_set().len().pow(2));
    d
}

/// Peels until no removable simple cycle is left. Such "irreducible" spines form the
/// canonical spine set used by the translation.
pub fn irreducible_decomposition(run: &Run) -> Decomposition {
    peel_while(run, |_| true)
}

/// Inserts `count` copies of each cycle at the first occurrence of its start state.
///
/// Panics if some start state does not occur in `spine`.
pub fn inject(spine: &Run, cycles: &[(Run, u64)]) -> Run {
    let mut run = spine.clone();
    for (cycle, count) in cycles {
        if *count == 0 {
            continue;
        }
        let pos = run
            .states()
            .position(|q| q == cycle.start)
            .expect("cycle start must occur in the spine");
        let block: Vec<(usize, usize)> = (0..*count).flat_map(|_| cycle.steps.iter().copied()).collect();
        run.steps.splice(pos..pos, block);
    }
    run
}
