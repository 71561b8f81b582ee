//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use pa_lab::forge::{Counter, TwoCounterMachine};

#[allow(unused_imports)]
pub use pa_lab::oracle::words_up_to as all_words;

/// `inc1; dec1 -> halt`: encodes as `t1 a t2`.
pub fn inc_then_dec() -> TwoCounterMachine {
    TwoCounterMachine::from_names(
        &["s0", "s1", "h"],
        "s0",
        "h",
        &[("inc", Counter::One, &["s0", "s1"]), ("dec", Counter::One, &["s1", "h", "h"])],
    )
    .unwrap()
}

/// Zero test on the second counter first, then one increment: `t1 t2 b`.
pub fn zero_test_first() -> TwoCounterMachine {
    TwoCounterMachine::from_names(
        &["s0", "s1", "h"],
        "s0",
        "h",
        &[("dec", Counter::Two, &["s0", "s1", "s0"]), ("inc", Counter::Two, &["s1", "h"])],
    )
    .unwrap()
}

/// Counts the first counter up to 3 and back down to zero.
pub fn up_and_down() -> TwoCounterMachine {
    TwoCounterMachine::from_names(
        &["s0", "s1", "s2", "s3", "h"],
        "s0",
        "h",
        &[
            ("inc", Counter::One, &["s0", "s1"]),
            ("inc", Counter::One, &["s1", "s2"]),
            ("inc", Counter::One, &["s2", "s3"]),
            ("dec", Counter::One, &["s3", "h", "s3"]),
        ],
    )
    .unwrap()
}

/// Moves 2 from the first counter to the second, then empties the second.
pub fn transfer() -> TwoCounterMachine {
    TwoCounterMachine::from_names(
        &["s0", "s1", "s2", "s3", "s4", "h"],
        "s0",
        "h",
        &[
            ("inc", Counter::One, &["s0", "s1"]),
            ("inc", Counter::One, &["s1", "s2"]),
            ("dec", Counter::One, &["s2", "s4", "s3"]),
            ("inc", Counter::Two, &["s3", "s2"]),
            ("dec", Counter::Two, &["s4", "h", "s4"]),
        ],
    )
    .unwrap()
}

pub fn halting_corpus() -> Vec<(&'static str, TwoCounterMachine)> {
    vec![
        ("inc_then_dec", inc_then_dec()),
        ("zero_test_first", zero_test_first()),
        ("up_and_down", up_and_down()),
        ("transfer", transfer()),
    ]
}

/// One state incrementing forever.
pub fn looping() -> TwoCounterMachine {
    TwoCounterMachine::from_names(&["s0", "h"], "s0", "h", &[("inc", Counter::One, &["s0", "s0"])]).unwrap()
}

/// Alternates an increment and a successful decrement forever.
pub fn seesaw() -> TwoCounterMachine {
    TwoCounterMachine::from_names(
        &["s0", "s1", "h"],
        "s0",
        "h",
        &[("inc", Counter::One, &["s0", "s1"]), ("dec", Counter::One, &["s1", "h", "s0"])],
    )
    .unwrap()
}

use pa_lab::rational::{rat, Rational};
use pa_lab::{Pa, PaBuilder};
use rand::RngExt;

const FRACTIONS: [(i64, i64); 6] = [(1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];

fn fraction<R: RngExt>(rng: &mut R, at_most: &Rational) -> Rational {
    loop {
        let (n, d) = FRACTIONS[rng.random_range(0..FRACTIONS.len())];
        let p = rat(n, d);
        if p <= *at_most {
            return p;
        }
    }
}

/// Random automaton over `letters`. Each (state, letter) row gets a successor with
/// probability 3/4 and a second, distinct one with probability `branch`; with
/// `branch = 0` and one initial state the result is deterministic.
pub fn random_pa<R: RngExt>(rng: &mut R, states: usize, letters: &[&str], branch: f64) -> Pa {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let mut b = PaBuilder::new(letters);
    for n in &names {
        b.add_state(n);
    }
    let one = rat(1, 1);
    let first = fraction(rng, &one);
    b.add_initial(&names[0], first.clone());
    if states > 1 && rng.random_bool(branch) && first < one {
        let second = fraction(rng, &(&one - &first));
        b.add_initial(&names[rng.random_range(1..states)], second);
    }
    let mut any_final = false;
    for n in &names {
        if rng.random_bool(0.5) {
            b.add_final(n);
            any_final = true;
        }
    }
    if !any_final {
        b.add_final(&names[states - 1]);
    }
    for src in 0..states {
        for l in letters {
            if !rng.random_bool(0.75) {
                continue;
            }
            let t1 = rng.random_range(0..states);
            let p1 = fraction(rng, &one);
            b.add_transition(&names[src], l, &names[t1], p1.clone());
            if states > 1 && p1 < one && rng.random_bool(branch) {
                let t2 = (t1 + rng.random_range(1..states)) % states;
                let p2 = fraction(rng, &(&one - &p1));
                b.add_transition(&names[src], l, &names[t2], p2);
            }
        }
    }
    b.build().expect("generated automaton is valid")
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Twenty small automata of mixed ambiguity over two or three letters: the two
/// halving automata, a few hand-built patterns, and seeded random ones admitted until
/// each class has its quota (3 more unambiguous, 4 finite, 4 polynomial, 5 exponential).
pub fn ambiguity_corpus() -> Vec<(String, Pa)> {
    use pa_lab::ambiguity::{classify, AmbiguityClass};
    use pa_lab::catalog::{halving, halving_complement};
    let mut out = vec![("halving".to_string(), halving()), ("halving_complement".to_string(), halving_complement())];
    let two_loops = PaBuilder::new(&["a"])
        .state("p")
        .initial("p", rat(1, 1))
        .final_state("p")
        .transition("p", "a", "p", rat(1, 2))
        .state("q")
        .transition("p", "a", "q", rat(1, 2))
        .transition("q", "a", "p", rat(1, 1))
        .build()
        .unwrap();
    out.push(("two_loops".into(), two_loops));
    let union = pa_lab::weighted_sum(&[(rat(1, 2), &halving()), (rat(1, 2), &halving())]).unwrap();
    out.push(("halving_twice".into(), union));
    let mut quota = [3usize, 4, 4, 5];
    let mut rng = seeded(2024);
    let mut i = 0;
    while quota.iter().any(|&q| q > 0) {
        let letters: &[&str] = if i % 3 == 0 { &["a", "b", "c"] } else { &["a", "b"] };
        let states = 2 + i % 3;
        let branch = [0.1, 0.25, 0.4][i % 3];
        let pa = pa_lab::trim(&random_pa(&mut rng, states, letters, branch));
        i += 1;
        let slot = match classify(&pa) {
            AmbiguityClass::Unambiguous => 0,
            AmbiguityClass::Finite { .. } => 1,
            AmbiguityClass::Polynomial { .. } => 2,
            AmbiguityClass::Exponential => 3,
        };
        if quota[slot] > 0 {
            quota[slot] -= 1;
            out.push((format!("random{i}"), pa));
        }
    }
    out
}

/// `p -a-> p` and `p -a-> q` with probability 1/2 each, `q -a-> q`: linearly ambiguous.
pub fn leaky() -> Pa {
    PaBuilder::new(&["a"])
        .state("p")
        .state("q")
        .initial("p", rat(1, 1))
        .final_state("q")
        .transition("p", "a", "p", rat(1, 2))
        .transition("p", "a", "q", rat(1, 2))
        .transition("q", "a", "q", rat(1, 1))
        .build()
        .unwrap()
}

/// `p (1/2)^x 3^y + (1-p) 2^x (1/3)^y < 1` over `x, y >= 0`.
pub fn worked_instance(p: Rational) -> pa_lab::ipexp::IpExpInstance {
    use pa_lab::ipexp::{ExpSumFunction, IpExpInstance};
    let one = rat(1, 1);
    let f = ExpSumFunction::new(2, vec![p.clone(), one - p], vec![vec![rat(1, 2), rat(3, 1)], vec![rat(2, 1), rat(1, 3)]])
        .unwrap();
    IpExpInstance::nonnegative(f)
}

pub fn big(v: &[i64]) -> Vec<num_bigint::BigInt> {
    v.iter().map(|x| num_bigint::BigInt::from(*x)).collect()
}
