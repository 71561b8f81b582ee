//! Translation of a pair of automata into the finite set `Δ` of exponential-sum tuples.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;

use crate::pa::{Pa, Run};
use crate::rational::{pow_i64, Rational};

use super::cycles::{periods, removable_factor};
use super::product::{build_product, ProductAutomaton};
use super::StructureError;

/// `(p, q_1..q_k, r, s_1..s_l)` over `n` periods. The left side evaluates to
/// `S(p, q)(x) = sum_i p_i prod_j q_ij^x_j`, the right side likewise with `r` and `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaTuple {
    pub p: Vec<Rational>,
    pub q: Vec<Vec<Rational>>,
    pub r: Vec<Rational>,
    pub s: Vec<Vec<Rational>>,
}

impl DeltaTuple {
    pub fn n(&self) -> usize {
        self.q.first().or(self.s.first()).map_or(0, Vec::len)
    }

    pub fn left(&self, x: &[u64]) -> Rational {
        exp_sum(&self.p, &self.q, x)
    }

    pub fn right(&self, x: &[u64]) -> Rational {
        exp_sum(&self.r, &self.s, x)
    }
}

pub fn exp_sum(coeffs: &[Rational], bases: &[Vec<Rational>], x: &[u64]) -> Rational {
    coeffs
        .iter()
        .zip(bases)
        .map(|(c, row)| {
            row.iter()
                .zip(x)
                .fold(c.clone(), |acc, (b, &e)| acc * pow_i64(b, e as i64))
        })
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// A tuple together with the product run and periods it came from.
#[derive(Debug, Clone)]
pub struct DeltaEntry {
    pub k: usize,
    pub l: usize,
    pub tuple: DeltaTuple,
    pub spine: Run,
    pub periods: Vec<Run>,
}

impl DeltaEntry {
    /// Product run obtained by injecting period `j` exactly `x[j]` times.
    pub fn run_for(&self, x: &[u64]) -> Run {
        let cycles: Vec<(Run, u64)> =
            self.periods.iter().cloned().zip(x.iter().copied()).collect();
        super::cycles::inject(&self.spine, &cycles)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    pub max_spines: usize,
    pub max_product_states: usize,
    pub max_periods: usize,
    /// Skip cells with no copy of the left automaton; their left side is identically 0.
    pub skip_empty_left: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            max_spines: 100_000,
            max_product_states: 1_000_000,
            max_periods: 20_000,
            skip_empty_left: false,
        }
    }
}

/// Enumerates `Δ` for every cell `(k', l')` with `k' <= k_max`, `l' <= l_max`.
///
/// Spines are the irreducible accepting runs of each product: no simple-cycle factor
/// can be removed without losing a state. Every accepting run peels down to one of
/// them, and each is shorter than the square of its state count, so the set is finite.
/// On a budget overrun the error carries every entry produced so far.
pub fn translate(
    a: &Pa,
    b: &Pa,
    k_max: usize,
    l_max: usize,
    opts: &TranslateOptions,
) -> Result<Vec<DeltaEntry>, StructureError> {
    let mut entries = Vec::new();
    let mut seen: HashSet<(usize, usize, DeltaTuple)> = HashSet::new();
    let k_from = usize::from(opts.skip_empty_left);
    for k in k_from..=k_max {
        for l in 0..=l_max {
            let product = match build_product(a, b, k, l, opts.max_product_states) {
                Ok(p) => p,
                Err(e) => return Err(e.with_partial(entries)),
            };
            let mut spines = Vec::new();
            if let Err(e) = accepting_spines(&product, opts.max_spines, &mut spines) {
                let mut partial = entries;
                partial.extend(tuples_for(&product, &spines, opts, &mut seen).unwrap_or_default());
                return Err(e.with_partial(partial));
            }
            match tuples_for(&product, &spines, opts, &mut seen) {
                Ok(t) => entries.extend(t),
                Err(e) => return Err(e.with_partial(entries)),
            }
        }
    }
    Ok(entries)
}

/// Periods inside one state set, with the per-copy probability of each.
type Periods = (Vec<Run>, Vec<Vec<Rational>>);

fn tuples_for(
    product: &ProductAutomaton,
    spines: &[Run],
    opts: &TranslateOptions,
    seen: &mut HashSet<(usize, usize, DeltaTuple)>,
) -> Result<Vec<DeltaEntry>, StructureError> {
    let mut cache: BTreeMap<Vec<usize>, Periods> = BTreeMap::new();
    let mut out = Vec::new();
    for spine in spines {
        let set: Vec<usize> = spine.state_set().into_iter().collect();
        if !cache.contains_key(&set) {
            let cycles = periods(product, &set, opts.max_periods).ok_or(
                StructureError::Budget { what: "periods", limit: opts.max_periods },
            )?;
            let probs = cycles
                .iter()
                .map(|c| product.path_probabilities(c).expect("period is a product path"))
                .collect();
            cache.insert(set.clone(), (cycles, probs));
        }
        let (cycles, cycle_probs) = &cache[&set];
        let start = product.copy_probabilities(spine).expect("spine is a product run");
        let k = product.k;
        let column = |copy: usize| -> Vec<Rational> {
            cycle_probs.iter().map(|probs| probs[copy].clone()).collect()
        };
        let tuple = DeltaTuple {
            p: start[..k].to_vec(),
            q: (0..k).map(column).collect(),
            r: start[k..].to_vec(),
            s: (k..k + product.l).map(column).collect(),
        };
        if seen.insert((product.k, product.l, tuple.clone())) {
            out.push(DeltaEntry {
                k: product.k,
                l: product.l,
                tuple,
                spine: spine.clone(),
                periods: cycles.clone(),
            });
        }
    }
    Ok(out)
}

/// Depth-first enumeration of irreducible runs from initial states that end in an
/// accepting state. Irreducibility is closed under prefixes, so reducible prefixes
/// are cut immediately.
fn accepting_spines(
    product: &ProductAutomaton,
    limit: usize,
    out: &mut Vec<Run>,
) -> Result<(), StructureError> {
    let mut occ = vec![0u32; product.states.len()];
    let mut initial: Vec<usize> = product.initial.iter().map(|(s, _)| *s).collect();
    initial.sort_unstable();
    initial.dedup();
    for s in initial {
        let mut states = vec![s];
        occ[s] += 1;
        let mut run = Run::new(s);
        dfs(product, &mut run, &mut states, &mut occ, limit, out)?;
        occ[s] -= 1;
    }
    Ok(())
}

fn dfs(
    product: &ProductAutomaton,
    run: &mut Run,
    states: &mut Vec<usize>,
    occ: &mut [u32],
    limit: usize,
    out: &mut Vec<Run>,
) -> Result<(), StructureError> {
    let cur = *states.last().expect("runs have a start state");
    if product.accepting[cur] {
        if out.len() >= limit {
            return Err(StructureError::Budget { what: "spines", limit });
        }
        out.push(run.clone());
    }
    for t in &product.trans[cur] {
        states.push(t.target);
        occ[t.target] += 1;
        if removable_factor(states, occ).is_none() {
            run.steps.push((t.letter, t.target));
            let r = dfs(product, run, states, occ, limit, out);
            run.steps.pop();
            if r.is_err() {
                occ[t.target] -= 1;
                states.pop();
                return r;
            }
        }
        occ[t.target] -= 1;
        states.pop();
    }
    Ok(())
}
