mod common;

use std::collections::BTreeSet;

use common::{all_words, random_pa, seeded};
use pa_lab::ambiguity::classify;
use pa_lab::catalog::{constant, halving, halving_complement};
use pa_lab::oracle::count_accepting_runs;
use pa_lab::rational::{pow_i64, rat, Rational};
use pa_lab::structure::{
    build_product, inject, irreducible_decomposition, periods, scc_partition, simple_cycle_decomposition, translate,
    ProductAutomaton, TranslateOptions,
};
use pa_lab::{trim, Pa, Run};
use proptest::prelude::*;
use rand::RngExt;

fn path_prob(pa: &Pa, run: &Run) -> Rational {
    let mut p = rat(1, 1);
    let mut cur = run.start;
    for &(a, q) in &run.steps {
        p *= pa.transition_prob(cur, a, q).expect("run follows transitions");
        cur = q;
    }
    p
}

/// Random walk of the given length along transitions of `pa`, or `None` on a dead end.
fn random_run(pa: &Pa, rng: &mut impl RngExt, len: usize) -> Option<Run> {
    let mut run = Run::new(rng.random_range(0..pa.num_states()));
    for _ in 0..len {
        let q = run.last_state();
        let edges: Vec<(usize, usize)> = (0..pa.num_letters())
            .flat_map(|a| pa.successors(q, a).iter().map(move |(t, _)| (a, *t)))
            .collect();
        if edges.is_empty() {
            return None;
        }
        run.steps.push(edges[rng.random_range(0..edges.len())]);
    }
    Some(run)
}

/// Simple cycles by brute force: every sequence of (letter, state) steps up to the
/// size of `within`, kept when it closes at its start without repeating a state.
fn cycles_by_enumeration(pa: &Pa, within: &[usize]) -> BTreeSet<Run> {
    let steps: Vec<(usize, usize)> =
        (0..pa.num_letters()).flat_map(|a| within.iter().map(move |&q| (a, q))).collect();
    let mut out = BTreeSet::new();
    let mut frontier: Vec<Run> = within.iter().map(|&q| Run::new(q)).collect();
    for _ in 0..within.len() {
        let mut next = Vec::new();
        for run in &frontier {
            for &(a, q) in &steps {
                if pa.transition_prob(run.last_state(), a, q).is_none() {
                    continue;
                }
                let mut r = run.clone();
                r.steps.push((a, q));
                if q == r.start {
                    out.insert(r);
                } else if !run.state_set().contains(&q) {
                    next.push(r);
                }
            }
        }
        frontier = next;
    }
    out
}

fn product_accepts(prod: &ProductAutomaton, w: &[usize]) -> bool {
    let mut cur: BTreeSet<usize> = prod.initial.iter().map(|(s, _)| *s).collect();
    for &a in w {
        cur = cur.iter().flat_map(|&q| prod.trans[q].iter().filter(|t| t.letter == a).map(|t| t.target)).collect();
    }
    cur.iter().any(|&q| prod.accepting[q])
}

fn unit_box(n: usize, radius: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p: Vec<u64>| (0..=radius).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

#[test]
fn scc_examples() {
    assert_eq!(scc_partition(&halving()), vec![vec![0], vec![1]]);
    let abar = halving_complement();
    let blocks = scc_partition(&abar);
    assert_eq!(blocks.iter().map(Vec::len).sum::<usize>(), abar.num_states());
    assert_eq!(scc_partition(&constant(&["a"], rat(1, 2))).len(), 1);
}

#[test]
fn periods_of_halving() {
    let a = halving();
    let all: Vec<usize> = (0..a.num_states()).collect();
    let p = periods(&a, &all, 100).unwrap();
    let expected: Vec<Run> = vec![
        Run { start: 0, steps: vec![(0, 0)] },
        Run { start: 1, steps: vec![(0, 1)] },
        Run { start: 1, steps: vec![(1, 1)] },
    ];
    assert_eq!(p, expected);
    assert!(periods(&a, &all, 1).is_none());
    assert!(periods(&a, &[], 10).unwrap().is_empty());
}

#[test]
fn decomposition_of_a_fixed_run() {
    // q0 -a-> q0 -a-> q0 -b-> q1 -b-> q1
    let run = Run { start: 0, steps: vec![(0, 0), (0, 0), (1, 1), (1, 1)] };
    let d = irreducible_decomposition(&run);
    assert_eq!(d.spine, Run { start: 0, steps: vec![(1, 1)] });
    assert_eq!(d.counts.get(&Run { start: 0, steps: vec![(0, 0)] }), Some(&2));
    assert_eq!(d.counts.get(&Run { start: 1, steps: vec![(1, 1)] }), Some(&1));
    assert_eq!(d.reconstruct(), run);
    let a = halving();
    let rebuilt = inject(&d.spine, &d.counts.iter().map(|(c, n)| (c.clone(), *n)).collect::<Vec<_>>());
    assert_eq!(path_prob(&a, &rebuilt), path_prob(&a, &run));
}

#[test]
fn product_of_halving_with_its_complement() {
    let (a, b) = (halving(), halving_complement());
    for (k, l) in [(0, 0), (1, 0), (1, 1), (0, 2), (1, 2)] {
        let prod = build_product(&a, &b, k, l, 10_000).unwrap();
        for w in all_words(2, 6) {
            let expect = count_accepting_runs(&a, &w).unwrap() == k as u64 && count_accepting_runs(&b, &w).unwrap() == l as u64;
            assert_eq!(product_accepts(&prod, &w), expect, "k={k} l={l} w={w:?}");
        }
    }
}

#[test]
fn translation_of_halving_pair() {
    let (a, b) = (halving(), halving_complement());
    let delta = translate(&a, &b, 1, 2, &TranslateOptions::default()).unwrap();
    assert!(!delta.is_empty());
    // b a^n: A gives 1, the complement gives 0 after reading b first.
    assert!(delta.iter().any(|e| e.k == 1 && e.l == 0 && e.tuple.left(&vec![0; e.tuple.n()]) == rat(1, 1)));
    for e in &delta {
        for x in unit_box(e.periods.len(), 2) {
            let w = e.run_for(&x).word();
            assert_eq!(e.tuple.left(&x), a.evaluate(&w).unwrap());
            assert_eq!(e.tuple.right(&x), b.evaluate(&w).unwrap());
        }
    }
}

#[test]
fn translate_respects_budgets() {
    let (a, b) = (halving(), halving_complement());
    let opts = TranslateOptions { max_spines: 1, ..TranslateOptions::default() };
    assert!(translate(&a, &b, 1, 2, &opts).is_err());
    let mismatch = constant(&["x"], rat(1, 2));
    assert!(translate(&a, &mismatch, 1, 1, &TranslateOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn periods_match_enumeration(seed in any::<u64>(), states in 1usize..=4) {
        let mut rng = seeded(seed);
        let a = random_pa(&mut rng, states, &["a", "b"], 0.5);
        let within: Vec<usize> = (0..states).filter(|_| rng.random_bool(0.8)).collect();
        let fast: BTreeSet<Run> = periods(&a, &within, 10_000).unwrap().into_iter().collect();
        prop_assert_eq!(fast, cycles_by_enumeration(&a, &within));
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>(), states in 1usize..=5, len in 0usize..40) {
        let mut rng = seeded(seed);
        let a = random_pa(&mut rng, states, &["a", "b"], 0.5);
        let Some(run) = random_run(&a, &mut rng, len) else { return Ok(()) };
        for d in [simple_cycle_decomposition(&run), irreducible_decomposition(&run)] {
            prop_assert_eq!(d.reconstruct(), run.clone());
            prop_assert_eq!(d.spine.state_set(), run.state_set());
            prop_assert_eq!(d.spine.start, run.start);
            prop_assert_eq!(d.spine.last_state(), run.last_state());
            let q = d.spine.state_set().len();
            prop_assert!(d.spine.len() < q * q || d.spine.is_empty());
            let peeled: u64 = d.counts.values().sum();
            prop_assert_eq!(peeled as usize, d.peels.len());
            let mut p = path_prob(&a, &d.spine);
            for (c, n) in &d.counts {
                prop_assert!(c.is_cycle() && c.state_set().len() == c.len());
                p *= pow_i64(&path_prob(&a, c), *n as i64);
            }
            prop_assert_eq!(p, path_prob(&a, &run));
        }
    }

    #[test]
    fn products_count_runs(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = trim(&random_pa(&mut rng, 3, &["a", "b"], 0.3));
        let b = trim(&random_pa(&mut rng, 2, &["a", "b"], 0.3));
        prop_assume!(classify(&a).is_finite() && classify(&b).is_finite());
        for (k, l) in [(0, 0), (1, 1), (2, 1), (1, 2)] {
            let prod = build_product(&a, &b, k, l, 10_000).unwrap();
            for w in all_words(2, 5) {
                let expect = count_accepting_runs(&a, &w).unwrap() == k as u64
                    && count_accepting_runs(&b, &w).unwrap() == l as u64;
                prop_assert_eq!(product_accepts(&prod, &w), expect);
            }
        }
    }

    #[test]
    fn tuples_evaluate_to_the_injected_word(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = trim(&random_pa(&mut rng, 3, &["a", "b"], 0.3));
        let b = trim(&random_pa(&mut rng, 2, &["a", "b"], 0.0));
        prop_assume!(classify(&a).is_finite());
        let delta = translate(&a, &b, 2, 1, &TranslateOptions::default()).unwrap();
        for e in &delta {
            for x in unit_box(e.periods.len().min(3), 2) {
                let mut x = x;
                x.resize(e.periods.len(), 0);
                let run = e.run_for(&x);
                let prod = build_product(&a, &b, e.k, e.l, 10_000).unwrap();
                prop_assert!(prod.accepts_run(&run));
                let w = run.word();
                prop_assert_eq!(e.tuple.left(&x), a.evaluate(&w).unwrap());
                prop_assert_eq!(e.tuple.right(&x), b.evaluate(&w).unwrap());
            }
        }
    }
}
