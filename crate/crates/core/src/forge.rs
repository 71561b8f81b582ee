//! Two-counter machines compiled into pairs of linearly ambiguous automata.
//!
//! An execution `(0,0) -t1-> (u1,v1) -t2-> ... -tk-> (uk,vk)` is written as the word
//! `t1 a^u1 b^v1 t2 a^u2 b^v2 ... tk a^uk b^vk`: every transition letter is followed
//! by the configuration it produces, the last one included.
//!
//! [`compile`] builds `A` and `B` with `[[A]](w) = [[B]](w)` on the word of the halting
//! execution and `[[A]](w) >= [[B]](w) + (1/13)(1/4)^(|w|+1)` on every other word.
//! `A` is `7/13 A0 + 1/13 (A1 + ... + A6)` where `A0` is a deterministic check of the
//! word's shape and each `Ai` (resp. `Bi`) compares two counter blocks around one kind
//! of transition:
//!
//! | i | gadget | letters      | counter | property                      |
//! |---|--------|--------------|---------|-------------------------------|
//! | 1 | C      | T1+          | 1       | incremented                   |
//! | 2 | C      | T2+          | 2       | incremented                   |
//! | 3 | E      | T2+ ∪ T2-    | 1       | unchanged                     |
//! | 4 | E      | T1+ ∪ T1-    | 2       | unchanged                     |
//! | 5 | D      | T1-          | 1       | decremented when non-zero     |
//! | 6 | D      | T2-          | 2       | decremented when non-zero     |
//!
//! `Ai` is `1/2 G(x,y,z) + 1/2 G(x,z,y)` and `Bi` is `G(x,x,x)` with `x = 1/2, y = 1,
//! z = 1/4`. Decrements at zero are checked by `A0`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::catalog;
use crate::pa::{weighted_sum, Pa, PaBuilder, Word};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    One,
    Two,
}

impl Counter {
    /// The letter whose block encodes this counter.
    pub fn letter(self) -> &'static str {
        match self {
            Counter::One => "a",
            Counter::Two => "b",
        }
    }

    fn other(self) -> Counter {
        match self {
            Counter::One => Counter::Two,
            Counter::Two => Counter::One,
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counter::One => "1",
            Counter::Two => "2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    /// `(from, to)`: increments `counter`.
    Inc { counter: Counter, from: usize, to: usize },
    /// `(from, zero, nonzero)`: goes to `zero` when `counter` is 0, otherwise
    /// decrements it and goes to `nonzero`.
    Dec { counter: Counter, from: usize, zero: usize, nonzero: usize },
}

impl Transition {
    pub fn from(&self) -> usize {
        match *self {
            Transition::Inc { from, .. } | Transition::Dec { from, .. } => from,
        }
    }

    pub fn counter(&self) -> Counter {
        match *self {
            Transition::Inc { counter, .. } | Transition::Dec { counter, .. } => counter,
        }
    }

    pub fn is_inc(&self) -> bool {
        matches!(self, Transition::Inc { .. })
    }

    /// Target state given whether the tested counter is zero.
    pub fn target(&self, counter_is_zero: bool) -> usize {
        match *self {
            Transition::Inc { to, .. } => to,
            Transition::Dec { zero, nonzero, .. } => {
                if counter_is_zero {
                    zero
                } else {
                    nonzero
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("state `{0}` has more than one outgoing transition")]
    NotDeterministic(String),
    #[error("the halting state `{0}` has an outgoing transition")]
    HaltHasOutgoing(String),
    #[error("the initial and halting states coincide")]
    InitIsHalt,
    #[error("the machine does not halt within {0} steps")]
    NoHalt(usize),
    #[error("the machine gets stuck in state `{0}`, which has no transition")]
    Stuck(String),
    #[error("gadget parameters out of range: {0}")]
    Parameter(String),
}

/// A deterministic two-counter machine. Transition `i` (0-based) is written as the
/// letter `t{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCounterMachine {
    states: Vec<String>,
    init: usize,
    halt: usize,
    transitions: Vec<Transition>,
}

impl TwoCounterMachine {
    pub fn new(states: Vec<String>, init: usize, halt: usize, transitions: Vec<Transition>) -> Result<Self, ForgeError> {
        let n = states.len();
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(ForgeError::DuplicateState(s.clone()));
            }
        }
        let check = |q: usize| if q < n { Ok(()) } else { Err(ForgeError::UnknownState(format!("#{q}"))) };
        check(init)?;
        check(halt)?;
        if init == halt {
            return Err(ForgeError::InitIsHalt);
        }
        let mut out = vec![0usize; n];
        for t in &transitions {
            match *t {
                Transition::Inc { from, to, .. } => {
                    check(from)?;
                    check(to)?;
                }
                Transition::Dec { from, zero, nonzero, .. } => {
                    check(from)?;
                    check(zero)?;
                    check(nonzero)?;
                }
            }
            out[t.from()] += 1;
        }
        if out[halt] > 0 {
            return Err(ForgeError::HaltHasOutgoing(states[halt].clone()));
        }
        if let Some(q) = (0..n).find(|&q| out[q] > 1) {
            return Err(ForgeError::NotDeterministic(states[q].clone()));
        }
        Ok(TwoCounterMachine { states, init, halt, transitions })
    }

    /// Builds a machine from state names; transitions refer to states by name.
    pub fn from_names(
        states: &[&str],
        init: &str,
        halt: &str,
        transitions: &[(&str, Counter, &[&str])],
    ) -> Result<Self, ForgeError> {
        let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| ForgeError::UnknownState(s.into()));
        let mut ts = Vec::new();
        for (kind, counter, args) in transitions {
            let t = match (*kind, args.len()) {
                ("inc", 2) => Transition::Inc { counter: *counter, from: idx(args[0])?, to: idx(args[1])? },
                ("dec", 3) => Transition::Dec {
                    counter: *counter,
                    from: idx(args[0])?,
                    zero: idx(args[1])?,
                    nonzero: idx(args[2])?,
                },
                _ => return Err(ForgeError::Parameter(format!("bad transition `{kind}` with {} states", args.len()))),
            };
            ts.push(t);
        }
        let (init, halt) = (idx(init)?, idx(halt)?);
        TwoCounterMachine::new(names, init, halt, ts)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn halt(&self) -> usize {
        self.halt
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Letter token of transition `i`.
    pub fn letter(i: usize) -> String {
        format!("t{}", i + 1)
    }

    /// `{a, b} ∪ T`, sorted as automata store it.
    pub fn alphabet(&self) -> Vec<String> {
        let mut v: Vec<String> = vec!["a".into(), "b".into()];
        v.extend((0..self.transitions.len()).map(TwoCounterMachine::letter));
        v.sort();
        v
    }

    fn outgoing(&self, q: usize) -> Option<usize> {
        self.transitions.iter().position(|t| t.from() == q)
    }

    /// Runs from `(q_init, 0, 0)` for at most `max_steps` transitions.
    pub fn simulate(&self, max_steps: usize) -> Result<Execution, ForgeError> {
        let mut q = self.init;
        let (mut u, mut v) = (0u64, 0u64);
        let mut steps = Vec::new();
        while q != self.halt {
            if steps.len() >= max_steps {
                return Err(ForgeError::NoHalt(max_steps));
            }
            let i = self.outgoing(q).ok_or_else(|| ForgeError::Stuck(self.states[q].clone()))?;
            let t = self.transitions[i];
            let c = match t.counter() {
                Counter::One => &mut u,
                Counter::Two => &mut v,
            };
            q = match t {
                Transition::Inc { to, .. } => {
                    *c += 1;
                    to
                }
                Transition::Dec { zero, nonzero, .. } => {
                    if *c == 0 {
                        zero
                    } else {
                        *c -= 1;
                        nonzero
                    }
                }
            };
            steps.push(Step { transition: i, counters: (u, v) });
        }
        Ok(Execution { steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub transition: usize,
    /// Counter values after the transition.
    pub counters: (u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub steps: Vec<Step>,
}

impl Execution {
    /// Letter tokens of the encoding.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.steps {
            out.push(TwoCounterMachine::letter(s.transition));
            out.extend(std::iter::repeat_n("a".to_string(), s.counters.0 as usize));
            out.extend(std::iter::repeat_n("b".to_string(), s.counters.1 as usize));
        }
        out
    }
}

/// Word of the halting execution, over [`TwoCounterMachine::alphabet`].
pub fn encode_execution(m: &TwoCounterMachine, max_steps: usize) -> Result<Word, ForgeError> {
    let exec = m.simulate(max_steps)?;
    let alphabet = m.alphabet();
    Ok(exec
        .tokens()
        .iter()
        .map(|t| alphabet.iter().position(|x| x == t).expect("encoding uses the machine alphabet"))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CheckState {
    Start,
    Sink,
    Block {
        /// State the next transition must leave from.
        next: usize,
        /// Counters that must stay empty in this block (a decrement at zero).
        zero_a: bool,
        zero_b: bool,
        seen_a: bool,
        seen_b: bool,
    },
}

fn after_transition(t: &Transition, seen_a: bool, seen_b: bool) -> CheckState {
    let tested_zero = match t.counter() {
        Counter::One => !seen_a,
        Counter::Two => !seen_b,
    };
    let dec_at_zero = !t.is_inc() && tested_zero;
    CheckState::Block {
        next: t.target(tested_zero),
        zero_a: dec_at_zero && t.counter() == Counter::One,
        zero_b: dec_at_zero && t.counter() == Counter::Two,
        seen_a: false,
        seen_b: false,
    }
}

impl CheckState {
    fn step(self, m: &TwoCounterMachine, letter: &str) -> CheckState {
        match self {
            CheckState::Sink => CheckState::Sink,
            CheckState::Start => match transition_of(m, letter) {
                Some(t) if t.from() == m.init => after_transition(&t, false, false),
                _ => CheckState::Sink,
            },
            CheckState::Block { next, zero_a, zero_b, seen_a, seen_b } => match letter {
                "a" if seen_b || zero_a => CheckState::Sink,
                "a" => CheckState::Block { next, zero_a, zero_b, seen_a: true, seen_b },
                "b" if zero_b => CheckState::Sink,
                "b" => CheckState::Block { next, zero_a, zero_b, seen_a, seen_b: true },
                _ => match transition_of(m, letter) {
                    Some(t) if t.from() == next => after_transition(&t, seen_a, seen_b),
                    _ => CheckState::Sink,
                },
            },
        }
    }

    fn name(&self, m: &TwoCounterMachine) -> String {
        match self {
            CheckState::Start => "start".into(),
            CheckState::Sink => "sink".into(),
            CheckState::Block { next, zero_a, zero_b, seen_a, seen_b } => {
                let flag = |b: bool| if b { '1' } else { '0' };
                format!(
                    "{}:z{}{}:s{}{}",
                    m.states[*next],
                    flag(*zero_a),
                    flag(*zero_b),
                    flag(*seen_a),
                    flag(*seen_b)
                )
            }
        }
    }
}

fn transition_of(m: &TwoCounterMachine, letter: &str) -> Option<Transition> {
    let i: usize = letter.strip_prefix('t')?.parse().ok()?;
    m.transitions.get(i.checked_sub(1)?).copied()
}

/// Deterministic automaton with value 0 exactly on proper words (the encoding of an
/// execution from `q_init` that ends in `q_halt`, with zero tests respected) and 1
/// on every other word.
pub fn build_a0(m: &TwoCounterMachine) -> Pa {
    let alphabet = m.alphabet();
    let mut index: HashMap<CheckState, usize> = HashMap::new();
    let mut order: Vec<CheckState> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(CheckState::Start, 0);
    order.push(CheckState::Start);
    queue.push_back(CheckState::Start);
    let mut edges: Vec<(CheckState, String, CheckState)> = Vec::new();
    while let Some(s) = queue.pop_front() {
        for letter in &alphabet {
            let t = s.step(m, letter);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                e.insert(order.len());
                order.push(t);
                queue.push_back(t);
            }
            edges.push((s, letter.clone(), t));
        }
    }
    let mut b = PaBuilder::new(&alphabet);
    for s in &order {
        b.add_state(&s.name(m));
        let proper = matches!(s, CheckState::Block { next, .. } if *next == m.halt);
        if !proper {
            b.add_final(&s.name(m));
        }
    }
    b.add_initial(&CheckState::Start.name(m), Rational::one());
    for (s, letter, t) in edges {
        b.add_transition(&s.name(m), &letter, &t.name(m), Rational::one());
    }
    b.build().expect("the shape checker is a valid automaton")
}

/// Which property a gadget checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetKind {
    /// Counter grows by one across transitions of `T_c^+`.
    Increment(Counter),
    /// Counter is unchanged across transitions acting on the other counter.
    Unchanged(Counter),
    /// Counter shrinks by one across transitions of `T_c^-` taken at a non-zero value.
    Decrement(Counter),
}

fn check_params(x: &Rational, y: &Rational, z: &Rational) -> Result<(), ForgeError> {
    let unit = |p: &Rational| *p > Rational::zero() && *p <= Rational::one();
    if !unit(x) || !unit(y) || !unit(z) {
        return Err(ForgeError::Parameter("x, y, z must lie in (0, 1]".into()));
    }
    if x + x > Rational::one() {
        return Err(ForgeError::Parameter("two initial weights x must sum to at most 1".into()));
    }
    Ok(())
}

/// Gadget automaton for `kind`. The increment gadget on the first counter is `C(x,y,z)`
/// and the decrement gadget on the first counter is `D(x,y,z)`; the others are their
/// analogues for the second counter and for an unchanged counter.
pub fn build_gadget(
    m: &TwoCounterMachine,
    kind: GadgetKind,
    x: &Rational,
    y: &Rational,
    z: &Rational,
) -> Result<Pa, ForgeError> {
    check_params(x, y, z)?;
    let alphabet = m.alphabet();
    let ts: Vec<String> = (0..m.transitions.len()).map(TwoCounterMachine::letter).collect();
    let half = rat(1, 2);
    let one = Rational::one();
    let counter = match kind {
        GadgetKind::Increment(c) | GadgetKind::Unchanged(c) | GadgetKind::Decrement(c) => c,
    };
    let (own, other) = (counter.letter(), counter.other().letter());
    let checked: Vec<&String> = ts
        .iter()
        .zip(&m.transitions)
        .filter(|(_, t)| match kind {
            GadgetKind::Increment(c) => t.is_inc() && t.counter() == c,
            GadgetKind::Unchanged(c) => t.counter() == c.other(),
            GadgetKind::Decrement(c) => !t.is_inc() && t.counter() == c,
        })
        .map(|(s, _)| s)
        .collect();
    // Probability of the edge reading the checked transition.
    let cross = match kind {
        GadgetKind::Increment(_) => y.clone(),
        GadgetKind::Unchanged(_) => one.clone(),
        GadgetKind::Decrement(_) => z.clone(),
    };

    let mut b = PaBuilder::new(&alphabet).state("q1");
    let decrement = matches!(kind, GadgetKind::Decrement(_));
    if decrement {
        b.add_state("q");
    }
    b = b.state("q2").state("q3").state("q4").final_state("q3").final_state("q4");
    b.add_initial("q1", x.clone());
    let entry = if decrement { "q" } else { "q2" };
    b.add_initial(entry, x.clone());

    // q1 waits, splitting evenly on every transition letter.
    for l in ["a", "b"] {
        b.add_transition("q1", l, "q1", one.clone());
    }
    for t in &ts {
        b.add_transition("q1", t, "q1", half.clone());
        b.add_transition("q1", t, entry, half.clone());
    }
    // Block before the checked letter: the counter's letters weigh y.
    if decrement {
        // At least one letter of the counter is required.
        if counter == Counter::Two {
            b.add_transition("q", "a", "q", one.clone());
        }
        b.add_transition("q", own, "q2", y.clone());
    }
    b.add_transition("q2", own, "q2", y.clone());
    b.add_transition("q2", other, "q2", one.clone());
    for t in &checked {
        b.add_transition("q2", t, "q3", cross.clone());
    }
    // Block after the checked letter: the counter's letters weigh z.
    b.add_transition("q3", own, "q3", z.clone());
    match counter {
        Counter::One => b.add_transition("q3", "b", "q4", one.clone()),
        Counter::Two => b.add_transition("q3", "a", "q3", one.clone()),
    }
    for t in &ts {
        b.add_transition("q3", t, "q4", one.clone());
    }
    for l in &alphabet {
        b.add_transition("q4", l, "q4", one.clone());
    }
    Ok(b.build().expect("gadget transitions are well formed"))
}

/// `C(x,y,z)`: checks increments of the first counter.
pub fn build_gadget_c(m: &TwoCounterMachine, x: &Rational, y: &Rational, z: &Rational) -> Result<Pa, ForgeError> {
    build_gadget(m, GadgetKind::Increment(Counter::One), x, y, z)
}

/// `D(x,y,z)`: checks non-zero decrements of the first counter.
pub fn build_gadget_d(m: &TwoCounterMachine, x: &Rational, y: &Rational, z: &Rational) -> Result<Pa, ForgeError> {
    build_gadget(m, GadgetKind::Decrement(Counter::One), x, y, z)
}

/// Gadget kinds of `A1..A6`, in order.
pub const COMPONENTS: [GadgetKind; 6] = [
    GadgetKind::Increment(Counter::One),
    GadgetKind::Increment(Counter::Two),
    GadgetKind::Unchanged(Counter::One),
    GadgetKind::Unchanged(Counter::Two),
    GadgetKind::Decrement(Counter::One),
    GadgetKind::Decrement(Counter::Two),
];

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    /// `7/13 A0 + 1/13 (A1 + ... + A6)`.
    pub a: Pa,
    /// `1/13 (B1 + ... + B6)`.
    pub b: Pa,
    /// `1/2 A`.
    pub a_prime: Pa,
    /// `1/2 B + 1/26 (1/4)^(|w|+1)`; the machine halts iff some word has
    /// `[[a_prime]] < [[b_prime]]`.
    pub b_prime: Pa,
    /// `A0, A1, ..., A6`.
    pub parts_a: Vec<Pa>,
    /// `B1, ..., B6`.
    pub parts_b: Vec<Pa>,
}

pub fn compile(m: &TwoCounterMachine) -> ReductionOutput {
    let (x, y, z) = (rat(1, 2), rat(1, 1), rat(1, 4));
    let half = rat(1, 2);
    let mut parts_a = vec![build_a0(m)];
    let mut parts_b = Vec::new();
    for kind in COMPONENTS {
        let g1 = build_gadget(m, kind, &x, &y, &z).expect("fixed parameters are in range");
        let g2 = build_gadget(m, kind, &x, &z, &y).expect("fixed parameters are in range");
        parts_a.push(weighted_sum(&[(half.clone(), &g1), (half.clone(), &g2)]).expect("same alphabet"));
        parts_b.push(build_gadget(m, kind, &x, &x, &x).expect("fixed parameters are in range"));
    }
    let thirteenth = rat(1, 13);
    let mut a_terms: Vec<(Rational, &Pa)> = vec![(rat(7, 13), &parts_a[0])];
    a_terms.extend(parts_a[1..].iter().map(|p| (thirteenth.clone(), p)));
    let a = weighted_sum(&a_terms).expect("weights sum to 1");
    let b_terms: Vec<(Rational, &Pa)> = parts_b.iter().map(|p| (thirteenth.clone(), p)).collect();
    let b = weighted_sum(&b_terms).expect("weights sum to 6/13");
    let a_prime = weighted_sum(&[(half.clone(), &a)]).expect("weight 1/2");
    let length = catalog::length_decay(&m.alphabet(), rat(1, 4));
    let b_prime = weighted_sum(&[(half, &b), (rat(1, 26), &length)]).expect("weights below 1");
    ReductionOutput { a, b, a_prime, b_prime, parts_a, parts_b }
}

/// Separation margin `(1/13)(1/4)^(|w|+1)` between `A` and `B` off the halting word.
pub fn margin(len: usize) -> Rational {
    rat(1, 13) * crate::rational::pow_i64(&rat(1, 4), len as i64 + 1)
}

/// Closed form of a gadget's value on a proper word, computed from the counter
/// blocks: `sum_i x (1/2)^(i-1) w_i` over the checked positions `i`.
pub fn gadget_closed_form(
    m: &TwoCounterMachine,
    kind: GadgetKind,
    x: &Rational,
    y: &Rational,
    z: &Rational,
    steps: &[Step],
) -> Rational {
    use crate::rational::pow_i64;
    let mut total = Rational::zero();
    let mut before = (0u64, 0u64);
    let half = rat(1, 2);
    for (i, s) in steps.iter().enumerate() {
        let t = m.transitions[s.transition];
        let pick = |c: (u64, u64), k: Counter| match k {
            Counter::One => c.0,
            Counter::Two => c.1,
        };
        let weight = pow_i64(&half, i as i64) * x;
        let term = match kind {
            GadgetKind::Increment(c) if t.is_inc() && t.counter() == c => {
                Some(pow_i64(y, pick(before, c) as i64 + 1) * pow_i64(z, pick(s.counters, c) as i64))
            }
            GadgetKind::Unchanged(c) if t.counter() == c.other() => {
                Some(pow_i64(y, pick(before, c) as i64) * pow_i64(z, pick(s.counters, c) as i64))
            }
            GadgetKind::Decrement(c) if !t.is_inc() && t.counter() == c && pick(before, c) > 0 => {
                Some(pow_i64(y, pick(before, c) as i64) * pow_i64(z, pick(s.counters, c) as i64 + 1))
            }
            _ => None,
        };
        if let Some(v) = term {
            total += weight * v;
        }
        before = s.counters;
    }
    total
}
