//! Cycle structure and the reduction of containment to exponential-sum tuples.
//!
//! [`periods`] enumerates simple cycles inside a state set, [`simple_cycle_decomposition`]
//! peels a run into a spine plus cycle multiplicities, [`build_product`] builds the
//! automaton following several distinct accepting runs at once, and [`translate`]
//! turns each accepting spine of that product into a [`DeltaTuple`].

mod cycles;
mod product;
mod translate;

use thiserror::Error;

pub use cycles::{
    inject, irreducible_decomposition, periods, simple_cycle_decomposition, Decomposition, Host,
};
pub use product::{build_product, ProductAutomaton, ProductState, ProductTransition};
pub use translate::{exp_sum, translate, DeltaEntry, DeltaTuple, TranslateOptions};

use crate::graph::scc_ids;
use crate::pa::Pa;

#[derive(Debug, Clone, Error)]
pub enum StructureError {
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
    #[error("resource limit reached: more than {limit} {what}")]
    Budget { what: &'static str, limit: usize },
    #[error("resource limit reached: more than {limit} {what} ({} tuples so far)", partial.len())]
    Partial { what: &'static str, limit: usize, partial: Vec<DeltaEntry> },
}

impl StructureError {
    pub(crate) fn with_partial(self, partial: Vec<DeltaEntry>) -> Self {
        match self {
            StructureError::Budget { what, limit } => StructureError::Partial { what, limit, partial },
            other => other,
        }
    }
}

/// Strongly connected components of the transition graph, each sorted, ordered by
/// smallest member.
pub fn scc_partition(pa: &Pa) -> Vec<Vec<usize>> {
    let adj = pa.to_nfa().graph();
    let ids = scc_ids(&adj);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; adj.len()];
    for (q, &c) in ids.iter().enumerate() {
        if slot[c] == usize::MAX {
            slot[c] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[c]].push(q);
    }
    blocks
}
