//! Line-based text formats for automata, two-counter machines and IP+EXP instances.
//!
//! All three share the same lexical rules: `#` starts a comment, tokens are separated
//! by whitespace, rationals are written `num/den` (a bare integer reads as `k/1`).
//!
//! ```text
//! # automaton
//! alphabet a b
//! state p
//! state q
//! initial p 1/1
//! final q
//! trans p a q 1/2
//!
//! # two-counter machine; transition k (1-based, file order) is the letter `tk`
//! state s0
//! state h
//! init s0
//! halt h
//! inc1 s0 s0
//!
//! # IP+EXP instance: header `ipexp n terms rows`
//! ipexp 1 2 0
//! term 1/2 2/1
//! term 1/2 1/2
//! ```

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use thiserror::Error;

use crate::forge::{Counter, ForgeError, Transition, TwoCounterMachine};
use crate::ipexp::{ExpSumFunction, IpExpError, IpExpInstance};
use crate::pa::{Pa, PaBuilder, PaError, Word};
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: {source}")]
    InvalidAt { line: usize, source: PaError },
    #[error(transparent)]
    Invalid(#[from] PaError),
    #[error(transparent)]
    Machine(#[from] ForgeError),
    #[error(transparent)]
    IpExp(#[from] IpExpError),
    #[error("unknown letter `{0}` in word")]
    Letter(String),
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    no: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, i: usize, msg: impl Into<String>) -> TextError {
        let col = self.tokens.get(i).map_or_else(|| self.tokens.last().map_or(1, |t| t.col + t.text.len()), |t| t.col);
        TextError::Syntax { line: self.no, col, msg: msg.into() }
    }

    fn keyword(&self) -> &'a str {
        self.tokens[0].text
    }

    fn arity(&self, n: usize) -> Result<(), TextError> {
        match self.tokens.len().cmp(&(n + 1)) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Less => Err(self.err(self.tokens.len(), format!("`{}` expects {n} arguments", self.keyword()))),
            std::cmp::Ordering::Greater => Err(self.err(n + 1, "unexpected extra token")),
        }
    }

    fn at_least(&self, n: usize) -> Result<(), TextError> {
        if self.tokens.len() < n + 1 {
            return Err(self.err(self.tokens.len(), format!("`{}` expects at least {n} arguments", self.keyword())));
        }
        Ok(())
    }

    fn arg(&self, i: usize) -> &'a str {
        self.tokens[i].text
    }

    fn rational(&self, i: usize) -> Result<Rational, TextError> {
        parse_rational(self.arg(i)).map_err(|e| self.err(i, e.to_string()))
    }

    fn integer<T: std::str::FromStr>(&self, i: usize) -> Result<T, TextError> {
        self.arg(i).parse().map_err(|_| self.err(i, format!("expected an integer, found `{}`", self.arg(i))))
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token { text: &body[s..pos], col: body[..s].chars().count() + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line { no: i + 1, tokens });
        }
    }
    out
}

fn empty_input() -> TextError {
    TextError::Syntax { line: 1, col: 1, msg: "empty input".into() }
}

/// Parses an automaton. Every referenced state and letter must be declared first.
pub fn parse_pa(text: &str) -> Result<Pa, TextError> {
    let lines = lex(text);
    if lines.is_empty() {
        return Err(empty_input());
    }
    let first = &lines[0];
    if first.keyword() != "alphabet" {
        return Err(first.err(0, "expected `alphabet` first"));
    }
    first.at_least(1)?;
    let letters: Vec<&str> = first.tokens[1..].iter().map(|t| t.text).collect();
    let mut letter_set = HashSet::new();
    for (i, l) in letters.iter().enumerate() {
        if !letter_set.insert(*l) {
            return Err(first.err(i + 1, format!("letter `{l}` declared twice")));
        }
    }
    let mut b = PaBuilder::new(&letters);
    let mut states: HashSet<&str> = HashSet::new();
    // Last line mentioning each (state, letter) row, to locate row-sum violations.
    let mut row_line: HashMap<(String, String), usize> = HashMap::new();
    let mut initial_lines = Vec::new();
    let state_ref = |line: &Line, i: usize, states: &HashSet<&str>| -> Result<(), TextError> {
        if states.contains(line.arg(i)) {
            Ok(())
        } else {
            Err(line.err(i, format!("undeclared state `{}`", line.arg(i))))
        }
    };
    let prob = |line: &Line, i: usize, what: String| -> Result<Rational, TextError> {
        let p = line.rational(i)?;
        if p > Rational::from_integer(0.into()) && p <= Rational::from_integer(1.into()) {
            Ok(p)
        } else {
            Err(TextError::InvalidAt { line: line.no, source: PaError::ProbabilityOutOfRange { what, value: fmt_rational(&p) } })
        }
    };
    for line in &lines[1..] {
        match line.keyword() {
            "state" => {
                line.arity(1)?;
                if !states.insert(line.arg(1)) {
                    return Err(line.err(1, format!("state `{}` declared twice", line.arg(1))));
                }
                b.add_state(line.arg(1));
            }
            "initial" => {
                line.arity(2)?;
                state_ref(line, 1, &states)?;
                let p = prob(line, 2, format!("initial weight of `{}`", line.arg(1)))?;
                b.add_initial(line.arg(1), p);
                initial_lines.push(line.no);
            }
            "final" => {
                line.arity(1)?;
                state_ref(line, 1, &states)?;
                b.add_final(line.arg(1));
            }
            "trans" => {
                line.arity(4)?;
                state_ref(line, 1, &states)?;
                if !letter_set.contains(line.arg(2)) {
                    return Err(line.err(2, format!("undeclared letter `{}`", line.arg(2))));
                }
                state_ref(line, 3, &states)?;
                let what = format!("transition {} --{}--> {}", line.arg(1), line.arg(2), line.arg(3));
                let p = prob(line, 4, what)?;
                b.add_transition(line.arg(1), line.arg(2), line.arg(3), p);
                row_line.insert((line.arg(1).to_string(), line.arg(2).to_string()), line.no);
            }
            "alphabet" => return Err(line.err(0, "`alphabet` may appear only once")),
            other => return Err(line.err(0, format!("unknown directive `{other}`"))),
        }
    }
    b.build().map_err(|e| {
        let line = match &e {
            PaError::RowSumExceedsOne { state, letter, .. } => row_line.get(&(state.clone(), letter.clone())).copied(),
            PaError::InitialSumExceedsOne(_) => initial_lines.last().copied(),
            _ => None,
        };
        match line {
            Some(line) => TextError::InvalidAt { line, source: e },
            None => TextError::Invalid(e),
        }
    })
}

/// Canonical text of an automaton; `parse_pa(&render_pa(a)) == a`.
pub fn render_pa(pa: &Pa) -> String {
    let mut s = format!("alphabet {}\n", pa.alphabet().join(" "));
    for q in pa.states() {
        s += &format!("state {q}\n");
    }
    for q in pa.initial_support() {
        s += &format!("initial {} {}\n", pa.states()[q], fmt_rational(pa.initial(q)));
    }
    for q in pa.finals() {
        s += &format!("final {}\n", pa.states()[q]);
    }
    for (p, l, q, prob) in pa.transitions() {
        s += &format!("trans {} {} {} {}\n", pa.states()[p], pa.alphabet()[l], pa.states()[q], fmt_rational(prob));
    }
    s
}

/// Parses a two-counter machine; transitions are numbered in file order.
pub fn parse_machine(text: &str) -> Result<TwoCounterMachine, TextError> {
    let lines = lex(text);
    if lines.is_empty() {
        return Err(empty_input());
    }
    let mut states: Vec<String> = Vec::new();
    let mut init = None;
    let mut halt = None;
    let mut transitions = Vec::new();
    let find = |line: &Line, i: usize, states: &[String]| -> Result<usize, TextError> {
        states
            .iter()
            .position(|s| s == line.arg(i))
            .ok_or_else(|| line.err(i, format!("undeclared state `{}`", line.arg(i))))
    };
    for line in &lines {
        let counter = match line.keyword().chars().last() {
            Some('1') => Counter::One,
            _ => Counter::Two,
        };
        match line.keyword() {
            "state" => {
                line.arity(1)?;
                if states.iter().any(|s| s == line.arg(1)) {
                    return Err(line.err(1, format!("state `{}` declared twice", line.arg(1))));
                }
                states.push(line.arg(1).to_string());
            }
            "init" | "halt" => {
                line.arity(1)?;
                let q = find(line, 1, &states)?;
                let slot = if line.keyword() == "init" { &mut init } else { &mut halt };
                if slot.replace(q).is_some() {
                    return Err(line.err(0, format!("`{}` given twice", line.keyword())));
                }
            }
            "inc1" | "inc2" => {
                line.arity(2)?;
                transitions.push(Transition::Inc { counter, from: find(line, 1, &states)?, to: find(line, 2, &states)? });
            }
            "dec1" | "dec2" => {
                line.arity(3)?;
                transitions.push(Transition::Dec {
                    counter,
                    from: find(line, 1, &states)?,
                    zero: find(line, 2, &states)?,
                    nonzero: find(line, 3, &states)?,
                });
            }
            other => return Err(line.err(0, format!("unknown directive `{other}`"))),
        }
    }
    let last = lines.last().expect("non-empty");
    let init = init.ok_or_else(|| TextError::Syntax { line: last.no, col: 1, msg: "missing `init`".into() })?;
    let halt = halt.ok_or_else(|| TextError::Syntax { line: last.no, col: 1, msg: "missing `halt`".into() })?;
    Ok(TwoCounterMachine::new(states, init, halt, transitions)?)
}

pub fn render_machine(m: &TwoCounterMachine) -> String {
    let name = |q: usize| &m.states()[q];
    let mut s = String::new();
    for q in m.states() {
        s += &format!("state {q}\n");
    }
    s += &format!("init {}\nhalt {}\n", name(m.init()), name(m.halt()));
    for t in m.transitions() {
        s += &match *t {
            Transition::Inc { counter, from, to } => format!("inc{counter} {} {}\n", name(from), name(to)),
            Transition::Dec { counter, from, zero, nonzero } => {
                format!("dec{counter} {} {} {}\n", name(from), name(zero), name(nonzero))
            }
        };
    }
    s
}

/// Parses an IP+EXP instance: `ipexp n terms rows`, then the `term r s1 .. sn`
/// lines, then the `row M1 .. Mn c` lines.
pub fn parse_ipexp(text: &str) -> Result<IpExpInstance, TextError> {
    let lines = lex(text);
    if lines.is_empty() {
        return Err(empty_input());
    }
    let head = &lines[0];
    if head.keyword() != "ipexp" {
        return Err(head.err(0, "expected header `ipexp n terms rows`"));
    }
    head.arity(3)?;
    let n: usize = head.integer(1)?;
    let terms: usize = head.integer(2)?;
    let rows: usize = head.integer(3)?;
    let body = &lines[1..];
    if body.len() != terms + rows {
        let line = body.last().unwrap_or(head);
        return Err(TextError::Syntax {
            line: line.no,
            col: 1,
            msg: format!("expected {} term and row lines, found {}", terms + rows, body.len()),
        });
    }
    let (mut r, mut s, mut m, mut c) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, line) in body.iter().enumerate() {
        let want = if k < terms { "term" } else { "row" };
        if line.keyword() != want {
            return Err(line.err(0, format!("expected `{want}`")));
        }
        line.arity(n + 1)?;
        if k < terms {
            r.push(line.rational(1)?);
            s.push((2..n + 2).map(|i| line.rational(i)).collect::<Result<Vec<_>, _>>()?);
        } else {
            m.push((1..n + 1).map(|i| line.integer::<BigInt>(i)).collect::<Result<Vec<_>, _>>()?);
            c.push(line.integer::<BigInt>(n + 1)?);
        }
    }
    let f = ExpSumFunction::new(n, r, s)?;
    Ok(IpExpInstance::new(f, m, c)?)
}

pub fn render_ipexp(inst: &IpExpInstance) -> String {
    let mut s = format!("ipexp {} {} {}\n", inst.n(), inst.f.num_terms(), inst.m.len());
    for (r, bases) in inst.f.r.iter().zip(&inst.f.s) {
        let mut t = vec!["term".to_string(), fmt_rational(r)];
        t.extend(bases.iter().map(fmt_rational));
        s += &(t.join(" ") + "\n");
    }
    for (row, c) in inst.m.iter().zip(&inst.c) {
        let mut t = vec!["row".to_string()];
        t.extend(row.iter().chain(std::iter::once(c)).map(|x| x.to_string()));
        s += &(t.join(" ") + "\n");
    }
    s
}

/// Reads a word for `pa`. Tokens are separated by whitespace or commas; a single
/// token that is not a letter is split into characters; `""` and `ε` are the empty
/// word.
pub fn parse_word(pa: &Pa, text: &str) -> Result<Word, TextError> {
    let text = text.trim();
    if text.is_empty() || text == "ε" {
        return Ok(Vec::new());
    }
    let mut tokens: Vec<String> =
        text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(String::from).collect();
    if tokens.len() == 1 && pa.letter_index(&tokens[0]).is_none() {
        tokens = tokens[0].chars().map(String::from).collect();
    }
    tokens
        .iter()
        .map(|t| pa.letter_index(t).ok_or_else(|| TextError::Letter(t.clone())))
        .collect()
}
