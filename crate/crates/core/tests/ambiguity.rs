mod common;

use common::{all_words, ambiguity_corpus, random_pa, seeded};
use pa_lab::ambiguity::{classify, fixed_ambiguity_language, max_finite_ambiguity, AmbiguityClass};
use pa_lab::catalog::{halving, halving_complement};
use pa_lab::forge::{build_gadget_c, build_gadget_d};
use pa_lab::oracle::count_accepting_runs;
use pa_lab::rational::rat;
use pa_lab::{trim, weighted_sum, PaBuilder};
use proptest::prelude::*;

fn max_runs(pa: &pa_lab::Pa, len: usize) -> u64 {
    all_words(pa.num_letters(), len).iter().map(|w| count_accepting_runs(pa, w).unwrap()).max().unwrap_or(0)
}

#[test]
fn reference_classes() {
    assert_eq!(classify(&halving()), AmbiguityClass::Unambiguous);
    assert_eq!(classify(&halving_complement()), AmbiguityClass::Polynomial { degree: 1 });
    let m = common::transfer();
    let (x, y, z) = (rat(1, 2), rat(1, 1), rat(1, 4));
    assert_eq!(classify(&build_gadget_c(&m, &x, &y, &z).unwrap()), AmbiguityClass::Polynomial { degree: 1 });
    assert_eq!(classify(&build_gadget_d(&m, &x, &y, &z).unwrap()), AmbiguityClass::Polynomial { degree: 1 });
    let single = PaBuilder::new(&["a"])
        .state("p")
        .initial("p", rat(1, 1))
        .final_state("p")
        .transition("p", "a", "p", rat(1, 1))
        .build()
        .unwrap();
    assert_eq!(classify(&single), AmbiguityClass::Unambiguous);
}

#[test]
fn underlying_nfa_forgets_probabilities() {
    let nfa = halving().to_nfa();
    assert_eq!(nfa.num_states(), 2);
    assert_eq!(nfa.successors(0, 0), &[0]);
    assert_eq!(nfa.successors(0, 1), &[1]);
    assert_eq!(nfa.successors(1, 0), &[1]);
    assert!(nfa.is_initial(0) && !nfa.is_initial(1));
    let m = common::inc_then_dec();
    let c1 = build_gadget_c(&m, &rat(1, 2), &rat(1, 1), &rat(1, 4)).unwrap().to_nfa();
    let c2 = build_gadget_c(&m, &rat(1, 4), &rat(1, 3), &rat(1, 2)).unwrap().to_nfa();
    assert_eq!(c1, c2);
}

#[test]
fn an_exponential_pattern() {
    // Two distinct a-loops on p: p -a-> p and p -a-> q -a-> p, read on "aa".
    let corpus = ambiguity_corpus();
    let (_, two_loops) = corpus.iter().find(|(n, _)| n == "two_loops").unwrap();
    assert_eq!(classify(two_loops), AmbiguityClass::Exponential);
    assert!(max_runs(two_loops, 8) >= 21);
}

#[test]
fn max_ambiguity_examples() {
    assert_eq!(max_finite_ambiguity(&halving()).unwrap(), 1);
    let twice = weighted_sum(&[(rat(1, 2), &halving()), (rat(1, 2), &halving())]).unwrap();
    assert_eq!(classify(&twice), AmbiguityClass::Finite { k: 2 });
    assert_eq!(max_finite_ambiguity(&twice).unwrap(), max_runs(&twice, 6));
    let empty = PaBuilder::new(&["a"]).state("p").initial("p", rat(1, 1)).transition("p", "a", "p", rat(1, 1)).build().unwrap();
    assert_eq!(max_finite_ambiguity(&empty).unwrap(), 1);
}

#[test]
fn fixed_ambiguity_languages_of_halving() {
    let a = halving();
    let one = fixed_ambiguity_language(&a, 1).unwrap();
    let zero = fixed_ambiguity_language(&a, 0).unwrap();
    let two = fixed_ambiguity_language(&a, 2).unwrap();
    for w in all_words(2, 6) {
        let has_b = w.contains(&1);
        assert_eq!(one.accepts(&w), has_b);
        assert_eq!(zero.accepts(&w), !has_b);
        assert!(!two.accepts(&w));
    }
}

#[test]
fn corpus_classes_match_run_growth() {
    let corpus = ambiguity_corpus();
    let mut seen = std::collections::BTreeSet::new();
    for (name, pa) in &corpus {
        let class = classify(pa);
        seen.insert(format!("{class}").split_whitespace().next().unwrap().to_string());
        let short = max_runs(pa, 4);
        let long = max_runs(pa, 8);
        match class {
            AmbiguityClass::Unambiguous => assert!(long <= 1, "{name}"),
            AmbiguityClass::Finite { k } => {
                assert!(long <= k, "{name}: {long} runs > {k}");
                assert_eq!(max_finite_ambiguity(pa).unwrap(), k);
            }
            _ => assert!(long > short, "{name} is {class} but runs stay at {long}"),
        }
    }
    assert!(seen.len() >= 3, "corpus should mix classes");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fixed_ambiguity_languages_partition_words(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = trim(&random_pa(&mut rng, 3, &["a", "b"], 0.3));
        prop_assume!(classify(&a).is_finite());
        let k = max_finite_ambiguity(&a).unwrap();
        let langs: Vec<_> = (0..=k).map(|i| fixed_ambiguity_language(&a, i).unwrap()).collect();
        for w in all_words(2, 6) {
            let runs = count_accepting_runs(&a, &w).unwrap();
            prop_assert!(runs <= k);
            for (i, l) in langs.iter().enumerate() {
                prop_assert_eq!(l.accepts(&w), i as u64 == runs);
            }
        }
    }
}
