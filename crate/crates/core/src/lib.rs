//! Exact analysis of probabilistic automata with bounded ambiguity.
//!
//! The crate covers construction and evaluation of probabilistic automata
//! ([`pa`]), ambiguity classification ([`ambiguity`]), the cycle and product
//! machinery that turns containment into exponential-polynomial inequalities
//! ([`structure`]), the deciders built on top ([`deciders`]), a solver for integer
//! points under exponential-sum constraints ([`ipexp`]), a compiler from
//! two-counter machines to automata pairs ([`forge`]) and brute-force oracles
//! ([`oracle`]). Text formats live in [`text`].

pub mod ambiguity;
pub mod catalog;
pub mod deciders;
pub mod forge;
pub mod ipexp;
pub(crate) mod graph;
pub mod nfa;
pub mod oracle;
pub mod pa;
pub mod rational;
pub mod structure;
pub mod text;

pub use pa::{complement, trim, weighted_sum, Pa, PaBuilder, PaError, Run, Word};
pub use rational::Rational;
