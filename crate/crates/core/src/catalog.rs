//! Small reference automata used by tests, the CLI and the deciders.

use crate::pa::{Pa, PaBuilder};
use crate::rational::{rat, Rational};

/// Unambiguous automaton over `{a, b}` mapping `a^n b u` to `1/2^n` and `a^n` to 0.
pub fn halving() -> Pa {
    PaBuilder::new(&["a", "b"])
        .state("q1")
        .state("q2")
        .initial("q1", rat(1, 1))
        .final_state("q2")
        .transition("q1", "a", "q1", rat(1, 2))
        .transition("q1", "b", "q2", rat(1, 1))
        .transition("q2", "a", "q2", rat(1, 1))
        .transition("q2", "b", "q2", rat(1, 1))
        .build()
        .expect("reference automaton is valid")
}

/// Linearly ambiguous complement of [`halving`]: `a^n b u` maps to `1 - 1/2^n`, `a^n` to 1.
pub fn halving_complement() -> Pa {
    PaBuilder::new(&["a", "b"])
        .state("q1")
        .state("q2")
        .state("bot")
        .initial("q1", rat(1, 1))
        .final_state("q1")
        .final_state("bot")
        .transition("q1", "a", "q1", rat(1, 2))
        .transition("q1", "a", "bot", rat(1, 2))
        .transition("q1", "b", "q2", rat(1, 1))
        .transition("q2", "a", "q2", rat(1, 1))
        .transition("q2", "b", "q2", rat(1, 1))
        .transition("bot", "a", "bot", rat(1, 1))
        .transition("bot", "b", "bot", rat(1, 1))
        .build()
        .expect("reference automaton is valid")
}

/// One final state looping on every letter with initial weight `c`; computes the constant `c`.
pub fn constant<S: AsRef<str>>(alphabet: &[S], c: Rational) -> Pa {
    let mut b = PaBuilder::new(alphabet).state("c");
    if c > Rational::from_integer(0.into()) {
        b.add_initial("c", c);
    }
    b.add_final("c");
    for l in alphabet {
        b.add_transition("c", l.as_ref(), "c", rat(1, 1));
    }
    b.build().expect("constant automaton is valid")
}

/// Single state with every letter looping with probability `p` and initial weight `p`:
/// computes `p^(|w|+1)`.
pub fn length_decay<S: AsRef<str>>(alphabet: &[S], p: Rational) -> Pa {
    let mut b = PaBuilder::new(alphabet).state("len").initial("len", p.clone()).final_state("len");
    for l in alphabet {
        b.add_transition("len", l.as_ref(), "len", p.clone());
    }
    b.build().expect("length automaton is valid")
}
