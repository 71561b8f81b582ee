mod common;

use common::*;
use pa_lab::ambiguity::{classify, AmbiguityClass};
use pa_lab::forge::{
    build_a0, build_gadget, build_gadget_c, build_gadget_d, compile, encode_execution, gadget_closed_form, margin,
    Counter, ForgeError, GadgetKind, Step, Transition, TwoCounterMachine, COMPONENTS,
};
use pa_lab::oracle::{run_sum, sweep_pair};
use pa_lab::rational::{pow_i64, rat, Rational};
use pa_lab::{complement, trim, Pa};

fn degree_at_most_one(c: AmbiguityClass) -> bool {
    match c {
        AmbiguityClass::Unambiguous | AmbiguityClass::Finite { .. } => true,
        AmbiguityClass::Polynomial { degree } => degree <= 1,
        AmbiguityClass::Exponential => false,
    }
}

fn word(m: &TwoCounterMachine, tokens: &str) -> Vec<usize> {
    let alphabet = m.alphabet();
    tokens.split_whitespace().map(|t| alphabet.iter().position(|a| a == t).unwrap()).collect()
}

/// Splits a word of shape `T a*b* (T a*b*)*` into transitions and the blocks
/// following them.
fn shaped_steps(m: &TwoCounterMachine, w: &[usize]) -> Option<Vec<Step>> {
    let alphabet = m.alphabet();
    let mut steps: Vec<Step> = Vec::new();
    let mut seen_b = false;
    for &l in w {
        match alphabet[l].as_str() {
            "a" => {
                let s = steps.last_mut()?;
                if seen_b {
                    return None;
                }
                s.counters.0 += 1;
            }
            "b" => {
                steps.last_mut()?.counters.1 += 1;
                seen_b = true;
            }
            t => {
                let i: usize = t[1..].parse().unwrap();
                steps.push(Step { transition: i - 1, counters: (0, 0) });
                seen_b = false;
            }
        }
    }
    if steps.is_empty() {
        None
    } else {
        Some(steps)
    }
}

/// Shape, start, state chaining, halting and zero stability, checked directly.
fn is_proper(m: &TwoCounterMachine, w: &[usize]) -> bool {
    let Some(steps) = shaped_steps(m, w) else { return false };
    let mut state = m.init();
    let mut before = (0u64, 0u64);
    for s in &steps {
        let t = m.transitions()[s.transition];
        if t.from() != state {
            return false;
        }
        let value = |c: (u64, u64)| if t.counter() == Counter::One { c.0 } else { c.1 };
        let zero = value(before) == 0;
        if let Transition::Dec { .. } = t {
            if zero && value(s.counters) != 0 {
                return false;
            }
        }
        state = t.target(zero);
        before = s.counters;
    }
    state == m.halt()
}

#[test]
fn machine_validation() {
    let dup = TwoCounterMachine::from_names(
        &["s0", "h"],
        "s0",
        "h",
        &[("inc", Counter::One, &["s0", "h"]), ("inc", Counter::Two, &["s0", "h"])],
    );
    assert_eq!(dup.unwrap_err(), ForgeError::NotDeterministic("s0".into()));
    let from_halt = TwoCounterMachine::from_names(&["s0", "h"], "s0", "h", &[("inc", Counter::One, &["h", "s0"])]);
    assert_eq!(from_halt.unwrap_err(), ForgeError::HaltHasOutgoing("h".into()));
    let same = TwoCounterMachine::from_names(&["s0"], "s0", "s0", &[]);
    assert_eq!(same.unwrap_err(), ForgeError::InitIsHalt);
    let unknown = TwoCounterMachine::from_names(&["s0", "h"], "s0", "h", &[("inc", Counter::One, &["s0", "x"])]);
    assert_eq!(unknown.unwrap_err(), ForgeError::UnknownState("x".into()));
}

#[test]
fn encodings_follow_the_simulation() {
    let m = inc_then_dec();
    assert_eq!(encode_execution(&m, 100).unwrap(), word(&m, "t1 a t2"));
    let m = zero_test_first();
    assert_eq!(encode_execution(&m, 100).unwrap(), word(&m, "t1 t2 b"));
    let m = transfer();
    let exec = m.simulate(100).unwrap();
    assert_eq!(exec.steps.last().unwrap().counters, (0, 0));
    assert_eq!(
        exec.tokens().join(" "),
        "t1 a t2 a a t3 a t4 a b t3 b t4 b b t3 b b t5 b t5 t5"
    );
}

#[test]
fn non_halting_machines_exhaust_the_budget() {
    assert_eq!(encode_execution(&looping(), 50).unwrap_err(), ForgeError::NoHalt(50));
    assert_eq!(seesaw().simulate(31).unwrap_err(), ForgeError::NoHalt(31));
    let stuck = TwoCounterMachine::from_names(&["s0", "s1", "h"], "s0", "h", &[("inc", Counter::One, &["s0", "s1"])]).unwrap();
    assert_eq!(stuck.simulate(10).unwrap_err(), ForgeError::Stuck("s1".into()));
}

#[test]
fn shape_checker_is_zero_exactly_on_proper_words() {
    for (name, m) in halting_corpus() {
        let a0 = build_a0(&m);
        assert_eq!(classify(&a0), AmbiguityClass::Unambiguous, "{name}");
        let w = encode_execution(&m, 100).unwrap();
        assert_eq!(a0.evaluate(&w).unwrap(), rat(0, 1), "{name}");
        for w in all_words(m.alphabet().len(), 5) {
            let expected = if is_proper(&m, &w) { rat(0, 1) } else { rat(1, 1) };
            assert_eq!(a0.evaluate(&w).unwrap(), expected, "{name} on {}", a0.render_word(&w));
        }
    }
    let m = inc_then_dec();
    let a0 = build_a0(&m);
    assert_eq!(a0.evaluate(&word(&m, "a")).unwrap(), rat(1, 1));
    // t2 leaves s1, not s0.
    assert_eq!(a0.evaluate(&word(&m, "t2 a t1")).unwrap(), rat(1, 1));
    // Wrong counter values are not the checker's business.
    assert_eq!(a0.evaluate(&word(&m, "t1 a a a t2 a a")).unwrap(), rat(0, 1));
}

#[test]
fn zero_tests_must_leave_the_counter_empty() {
    let m = zero_test_first();
    let a0 = build_a0(&m);
    assert_eq!(a0.evaluate(&word(&m, "t1 t2 b")).unwrap(), rat(0, 1));
    assert_eq!(a0.evaluate(&word(&m, "t1 b t2 b")).unwrap(), rat(1, 1));
}

#[test]
fn gadget_shapes_and_parameter_checks() {
    let m = transfer();
    let (x, y, z) = (rat(1, 2), rat(1, 1), rat(1, 4));
    let c = build_gadget_c(&m, &x, &y, &z).unwrap();
    let d = build_gadget_d(&m, &x, &y, &z).unwrap();
    assert_eq!(c.num_states(), 4);
    assert_eq!(d.num_states(), 5);
    for kind in COMPONENTS {
        for (y, z) in [(rat(1, 1), rat(1, 4)), (rat(1, 4), rat(1, 1)), (rat(1, 2), rat(1, 2))] {
            let g = build_gadget(&m, kind, &x, &y, &z).unwrap();
            assert_eq!(classify(&g), AmbiguityClass::Polynomial { degree: 1 }, "{kind:?}");
            let co = trim(&complement(&g));
            assert!(degree_at_most_one(classify(&co)), "complement of {kind:?}: {}", classify(&co));
        }
    }
    assert!(matches!(build_gadget_c(&m, &rat(3, 4), &y, &z), Err(ForgeError::Parameter(_))));
    assert!(matches!(build_gadget_c(&m, &x, &rat(0, 1), &z), Err(ForgeError::Parameter(_))));
    assert!(matches!(build_gadget_d(&m, &x, &y, &rat(5, 4)), Err(ForgeError::Parameter(_))));
}

#[test]
fn gadget_c_on_a_hand_built_word() {
    // Two T1+ letters: positions 1 and 3 (the t4 in between acts on counter 2).
    let m = transfer();
    let c = build_gadget_c(&m, &rat(1, 2), &rat(1, 1), &rat(1, 4)).unwrap();
    let w = word(&m, "t1 a t4 a b t2 a a a");
    // i = 1: n_1 = 0, n_2 = 1. i = 3: n_3 = 1, n_4 = 3.
    let expected = rat(1, 2) * rat(1, 4) + rat(1, 2) * rat(1, 4) * pow_i64(&rat(1, 4), 3);
    assert_eq!(c.evaluate(&w).unwrap(), expected);
    assert_eq!(c.evaluate(&word(&m, "t4 a b t3 a")).unwrap(), rat(0, 1));
}

#[test]
fn gadget_values_match_the_closed_form() {
    let params = [
        (rat(1, 2), rat(1, 1), rat(1, 4)),
        (rat(1, 2), rat(1, 4), rat(1, 1)),
        (rat(1, 2), rat(1, 2), rat(1, 2)),
    ];
    for m in [inc_then_dec(), transfer()] {
        let gadgets: Vec<(GadgetKind, &(Rational, Rational, Rational), Pa)> = COMPONENTS
            .iter()
            .flat_map(|&k| params.iter().map(move |p| (k, p)))
            .map(|(k, p)| (k, p, build_gadget(&m, k, &p.0, &p.1, &p.2).unwrap()))
            .collect();
        let mut shaped = 0;
        for w in all_words(m.alphabet().len(), 5) {
            let Some(steps) = shaped_steps(&m, &w) else { continue };
            shaped += 1;
            for (kind, (x, y, z), g) in &gadgets {
                let closed = gadget_closed_form(&m, *kind, x, y, z, &steps);
                assert_eq!(run_sum(g, &w).unwrap(), closed, "{kind:?} on {}", g.render_word(&w));
            }
        }
        assert!(shaped > 100);
    }
}

#[test]
fn am_gm_equality_exactly_on_the_diagonal() {
    let half = rat(1, 2);
    let quarter = rat(1, 4);
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            let lhs = pow_i64(&half, a + 1 + b);
            let rhs = &half * (pow_i64(&quarter, b) + pow_i64(&quarter, a + 1));
            assert!(lhs <= rhs);
            assert_eq!(lhs == rhs, a + 1 == b, "a={a} b={b}");
        }
    }
}

#[test]
fn halting_words_balance_and_everything_else_is_separated() {
    for (name, m) in halting_corpus() {
        let out = compile(&m);
        let w = encode_execution(&m, 30).unwrap();
        let (va, vb) = (out.a.evaluate(&w).unwrap(), out.b.evaluate(&w).unwrap());
        assert_eq!(va, vb, "{name}");
        assert!(out.a_prime.evaluate(&w).unwrap() < out.b_prime.evaluate(&w).unwrap());

        // Every single-letter insertion or deletion breaks the balance by the margin.
        let k = m.alphabet().len();
        let mut variants = Vec::new();
        for i in 0..=w.len() {
            for l in 0..k {
                let mut v = w.clone();
                v.insert(i, l);
                variants.push(v);
            }
            if i < w.len() {
                let mut v = w.clone();
                v.remove(i);
                variants.push(v);
            }
        }
        for v in variants {
            let (va, vb) = (out.a.evaluate(&v).unwrap(), out.b.evaluate(&v).unwrap());
            assert!(va >= vb + margin(v.len()), "{name} on {}", out.a.render_word(&v));
            assert!(out.a_prime.evaluate(&v).unwrap() >= out.b_prime.evaluate(&v).unwrap());
        }
    }
}

#[test]
fn compiled_automata_are_at_most_linearly_ambiguous() {
    for (name, m) in halting_corpus() {
        let out = compile(&m);
        for (which, pa) in [("A", &out.a), ("B", &out.b), ("A'", &out.a_prime), ("B'", &out.b_prime)] {
            assert!(degree_at_most_one(classify(pa)), "{name} {which}: {}", classify(pa));
        }
    }
}

#[test]
fn component_values_are_quantized() {
    let m = transfer();
    let out = compile(&m);
    for w in all_words(m.alphabet().len(), 3) {
        let unit = pow_i64(&rat(1, 4), w.len() as i64 + 1);
        for p in out.parts_a[1..].iter().chain(&out.parts_b) {
            let v = p.evaluate(&w).unwrap() / &unit;
            assert!(v.is_integer(), "{}", p.render_word(&w));
        }
    }
}

#[test]
fn non_halting_machine_never_balances() {
    for (m, len) in [(looping(), 8), (seesaw(), 6)] {
        let out = compile(&m);
        sweep_pair(&out.a, &out.b, len, &mut |w, va, vb| {
            assert!(*va >= vb + margin(w.len()), "{}", out.a.render_word(w));
        })
        .unwrap();
    }
}
