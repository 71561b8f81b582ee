mod common;

use common::{big, random_pa, seeded, worked_instance};
use pa_lab::catalog::{halving, halving_complement};
use pa_lab::deciders::poly_bound;
use pa_lab::oracle::{
    accepting_runs, brute_force_containment, brute_force_ipexp, choice_profile, count_accepting_runs, run_sum,
    sweep_pair, words_up_to, OracleError,
};
use pa_lab::rational::{pow_i64, rat};
use proptest::prelude::*;

#[test]
fn words_come_in_canonical_order() {
    let w = words_up_to(2, 2);
    assert_eq!(w, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    assert_eq!(words_up_to(3, 4).len(), 1 + 3 + 9 + 27 + 81);
    assert_eq!(words_up_to(0, 3), vec![Vec::<usize>::new()]);
}

#[test]
fn runs_of_the_halving_automaton() {
    let a = halving();
    let runs = accepting_runs(&a, &[0, 0, 1]).unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0].probability, rat(1, 4));
    assert_eq!(runs[0].choices, 0);
    assert_eq!(runs[0].run.word(), vec![0, 0, 1]);
    assert!(accepting_runs(&a, &[0, 0]).unwrap().is_empty());
    assert_eq!(accepting_runs(&a, &[2]), Err(OracleError::Letter(2)));
}

#[test]
fn runs_of_the_complement_grow_linearly() {
    let abar = halving_complement();
    for n in 0..8usize {
        let w = vec![0; n];
        assert_eq!(run_sum(&abar, &w).unwrap(), rat(1, 1));
        let runs = count_accepting_runs(&abar, &w).unwrap();
        assert_eq!(runs, n as u64 + 1, "a^{n}");
    }
}

#[test]
fn containment_sweep_of_halving_pair() {
    // [[A]] exceeds its complement only on words starting with b.
    let report = brute_force_containment(&halving(), &halving_complement(), 6).unwrap();
    assert_eq!(report.checked, 127);
    assert_eq!(report.witnesses.len(), 63);
    assert!(report.witnesses.iter().all(|(w, d)| w[0] == 1 && *d == rat(1, 1)));
    assert_eq!(report.witnesses[0].0, vec![1]);
    assert_eq!(report.extremal.unwrap().1, rat(1, 1));
    let back = brute_force_containment(&halving_complement(), &halving(), 6).unwrap();
    assert_eq!(back.witnesses[0], (vec![], rat(1, 1)));
    let other = pa_lab::catalog::constant(&["x"], rat(1, 2));
    assert!(brute_force_containment(&halving(), &other, 3).is_err());
}

#[test]
fn sweep_visits_values_in_order() {
    let (a, b) = (halving(), halving_complement());
    let mut seen = Vec::new();
    let n = sweep_pair(&a, &b, 3, &mut |w, va, vb| seen.push((w.to_vec(), va.clone(), vb.clone()))).unwrap();
    assert_eq!(n, 15);
    assert_eq!(seen.iter().map(|s| s.0.clone()).collect::<Vec<_>>(), words_up_to(2, 3));
    for (w, va, vb) in seen {
        assert_eq!(va, a.evaluate(&w).unwrap());
        assert_eq!(vb, b.evaluate(&w).unwrap());
    }
}

#[test]
fn worked_instances_by_brute_force() {
    let sat = brute_force_ipexp(&worked_instance(rat(1, 3)), 10);
    assert_eq!(sat.checked, 21 * 21);
    assert!(sat.found());
    assert_eq!(sat.witnesses[0], (big(&[1, 1]), rat(17, 18)));
    for (x, v) in &sat.witnesses {
        assert!(worked_instance(rat(1, 3)).is_solution(x));
        assert!(*v < rat(1, 1));
    }
    let half = brute_force_ipexp(&worked_instance(rat(1, 2)), 50);
    assert!(!half.found());
    // The minimum over the box is f(0, 0) = 1, attained first in sweep order among ties.
    assert_eq!(half.extremal.unwrap().1, rat(1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn choices_bound_run_probabilities(seed in any::<u64>(), states in 1usize..=4) {
        let mut rng = seeded(seed);
        let a = random_pa(&mut rng, states, &["a", "b"], 0.5);
        let alpha = a.max_non_one_probability();
        for w in words_up_to(2, 5) {
            let runs = accepting_runs(&a, &w).unwrap();
            let profile = choice_profile(&a, &w).unwrap();
            prop_assert_eq!(profile.values().sum::<u64>(), runs.len() as u64);
            for (m, count) in &profile {
                prop_assert!(poly_bound(a.num_states(), *m) >= (*count).into());
            }
            for r in &runs {
                match &alpha {
                    Some(alpha) => prop_assert!(r.probability <= pow_i64(alpha, r.choices as i64)),
                    None => prop_assert_eq!(r.choices, 0),
                }
            }
        }
    }
}
