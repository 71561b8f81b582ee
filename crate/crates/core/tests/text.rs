mod common;

use common::{halting_corpus, looping, random_pa, seeded, worked_instance};
use pa_lab::catalog::{halving, halving_complement};
use pa_lab::ipexp::{ExpSumFunction, IpExpInstance};
use pa_lab::rational::rat;
use pa_lab::text::{parse_ipexp, parse_machine, parse_pa, parse_word, render_ipexp, render_machine, render_pa, TextError};
use pa_lab::PaError;
use proptest::prelude::*;
use rand::RngExt;

const HALVING: &str = "\
# a^n b u -> 1/2^n
alphabet a b
state q1
state q2
initial q1 1   # bare integers are fine
final q2
trans q1 a q1 1/2
trans q1 b q2 1/1
trans q2 a q2 1/1
trans q2 b q2 1/1
";

fn syntax_at(r: Result<impl std::fmt::Debug, TextError>) -> (usize, usize) {
    match r {
        Err(TextError::Syntax { line, col, .. }) => (line, col),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn parses_the_halving_automaton() {
    let a = parse_pa(HALVING).unwrap();
    assert_eq!(a, halving());
    assert_eq!(a.evaluate(&parse_word(&a, "aab").unwrap()).unwrap(), rat(1, 4));
}

#[test]
fn syntax_errors_point_at_the_token() {
    assert_eq!(syntax_at(parse_pa("")), (1, 1));
    assert_eq!(syntax_at(parse_pa("state p\nalphabet a")), (1, 1));
    assert_eq!(syntax_at(parse_pa("alphabet a\nstate p\ntrans p b p 1/2")), (3, 9));
    assert_eq!(syntax_at(parse_pa("alphabet a\nstate p\ntrans p a r 1/2")), (3, 11));
    assert_eq!(syntax_at(parse_pa("alphabet a\nstate p\ninitial p x")), (3, 11));
    assert_eq!(syntax_at(parse_pa("alphabet a\nstate p\nfinal")), (3, 6));
    assert_eq!(syntax_at(parse_pa("alphabet a\nstate p\nfinal p p")), (3, 9));
    assert_eq!(syntax_at(parse_pa("alphabet a\n  bogus p")), (2, 3));
}

#[test]
fn semantic_errors_name_the_line() {
    let over = "alphabet a\nstate p\nstate q\ntrans p a p 2/3\ntrans p a q 2/3\n";
    match parse_pa(over) {
        Err(TextError::InvalidAt { line, source: PaError::RowSumExceedsOne { .. } }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    let init = "alphabet a\nstate p\nstate q\ninitial p 2/3\ninitial q 2/3\n";
    assert!(matches!(parse_pa(init), Err(TextError::InvalidAt { line: 5, .. })));
    let big = "alphabet a\nstate p\ninitial p 3/2";
    assert!(matches!(parse_pa(big), Err(TextError::InvalidAt { line: 3, source: PaError::ProbabilityOutOfRange { .. } })));
}

#[test]
fn word_syntax() {
    let a = halving();
    assert_eq!(parse_word(&a, "").unwrap(), Vec::<usize>::new());
    assert_eq!(parse_word(&a, "ε").unwrap(), Vec::<usize>::new());
    assert_eq!(parse_word(&a, "a a b").unwrap(), vec![0, 0, 1]);
    assert_eq!(parse_word(&a, "a,b").unwrap(), vec![0, 1]);
    assert_eq!(parse_word(&a, "abba").unwrap(), vec![0, 1, 1, 0]);
    assert!(matches!(parse_word(&a, "abc"), Err(TextError::Letter(_))));
    let m = parse_pa("alphabet t1 t2\nstate p\n").unwrap();
    assert_eq!(parse_word(&m, "t2 t1").unwrap(), vec![1, 0]);
}

#[test]
fn rendered_automata_parse_back() {
    for a in [halving(), halving_complement()] {
        assert_eq!(parse_pa(&render_pa(&a)).unwrap(), a);
    }
}

#[test]
fn machines_round_trip() {
    let text = "state s0\nstate h\ninit s0\nhalt h\ninc1 s0 h\n";
    let m = parse_machine(text).unwrap();
    assert_eq!(m.transitions().len(), 1);
    assert_eq!(render_machine(&m), render_machine(&parse_machine(&render_machine(&m)).unwrap()));
    for m in halting_corpus().into_iter().map(|(_, m)| m).chain([looping()]) {
        let back = parse_machine(&render_machine(&m)).unwrap();
        assert_eq!(back.states(), m.states());
        assert_eq!(back.transitions(), m.transitions());
        assert_eq!((back.init(), back.halt()), (m.init(), m.halt()));
    }
    assert!(matches!(parse_machine("state s0\ninit s0\nhalt s0\n"), Err(TextError::Machine(_))));
    assert_eq!(syntax_at(parse_machine("state s0\nstate h\ninit s0\nhalt h\ninc3 s0 h\n")), (5, 1));
}

#[test]
fn ipexp_files_round_trip() {
    for p in [rat(1, 2), rat(1, 3), rat(2, 3)] {
        let inst = worked_instance(p);
        assert_eq!(parse_ipexp(&render_ipexp(&inst)).unwrap(), inst);
    }
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/ipexp/worked_p1_3.ipexp")).unwrap();
    assert_eq!(parse_ipexp(&text).unwrap(), worked_instance(rat(1, 3)));
    assert_eq!(syntax_at(parse_ipexp("ipexp 1 1 0\nterm 1/2\n")), (2, 9));
    assert_eq!(syntax_at(parse_ipexp("ipexp 1 1 0\nterm 1/2 2 3\n")), (2, 12));
    // The header promises two terms but only one follows.
    assert_eq!(syntax_at(parse_ipexp("ipexp 1 2 0\nterm 1/2 2\n")).0, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_automata_round_trip(seed in any::<u64>(), states in 1usize..=6) {
        let mut rng = seeded(seed);
        let a = random_pa(&mut rng, states, &["a", "b", "c"], 0.5);
        prop_assert_eq!(parse_pa(&render_pa(&a)).unwrap(), a);
    }

    #[test]
    fn random_instances_round_trip(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=3usize);
        let terms = rng.random_range(1..=3usize);
        let mut q = || rat(rng.random_range(1..=9i64), rng.random_range(1..=9i64));
        let r = (0..terms).map(|_| q()).collect();
        let s = (0..terms).map(|_| (0..n).map(|_| q()).collect()).collect();
        let f = ExpSumFunction::new(n, r, s).unwrap();
        let rows = rng.random_range(0..=3usize);
        let m = (0..rows).map(|_| (0..n).map(|_| rng.random_range(-3..=3i64).into()).collect()).collect();
        let c = (0..rows).map(|_| rng.random_range(-5..=5i64).into()).collect();
        let inst = IpExpInstance::new(f, m, c).unwrap();
        prop_assert_eq!(parse_ipexp(&render_ipexp(&inst)).unwrap(), inst);
    }
}
