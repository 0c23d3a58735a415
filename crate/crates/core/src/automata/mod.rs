//! ω-automata and finite-word automata over explicitly enumerated alphabets.
//!
//! Letters are dense `u32` indices into the alphabet's letter table:
//! concrete letters are `2^AP` bitmasks (inputs first), open letters use
//! [`OpenLetterIndex`](crate::threeval::OpenLetterIndex), and input letters
//! are `2^I` bitmasks.

mod aba;
mod bitset;
mod dfa;
mod monoid;
mod nba;
mod scc;
mod ucw;

use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::ltl::Partition;
use crate::threeval::OpenLetterIndex;

pub use aba::{aba_to_nba, aba_to_nba_limited, ltl_to_aba, Aba, Dnf};
pub use bitset::BitSet;
pub use dfa::{Dfa, SafetyAutomaton, SafetyPruning};
pub use monoid::TransitionMonoid;
pub use nba::{
    nba_emptiness, nba_membership, nba_product, nba_product_limited, project_inputs, word_automaton,
    LassoWitness, Nba, NbaBuilder,
};
pub use scc::strongly_connected_components;
pub use ucw::{
    ltl_to_nba, ltl_to_ucw, nba_complement, nba_complement_limited, ComplementBuilder, Embedding, Ucw,
};

pub type Letter = u32;
pub type StateId = u32;

/// Which letter table an automaton reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphabetKind {
    /// `2^AP`
    Concrete,
    /// `3^O × 2^I`
    Open,
    /// `2^I`
    Input,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub kind: AlphabetKind,
    pub partition: Arc<Partition>,
}

impl Alphabet {
    pub fn new(kind: AlphabetKind, partition: Arc<Partition>) -> Self {
        Alphabet { kind, partition }
    }

    pub fn concrete(partition: &Arc<Partition>) -> Self {
        Alphabet::new(AlphabetKind::Concrete, partition.clone())
    }

    pub fn open(partition: &Arc<Partition>) -> Self {
        Alphabet::new(AlphabetKind::Open, partition.clone())
    }

    pub fn input(partition: &Arc<Partition>) -> Self {
        Alphabet::new(AlphabetKind::Input, partition.clone())
    }

    pub fn size(&self) -> usize {
        match self.kind {
            AlphabetKind::Concrete => 1 << self.partition.num_props(),
            AlphabetKind::Open => OpenLetterIndex::new(&self.partition).len(),
            AlphabetKind::Input => 1 << self.partition.num_inputs(),
        }
    }

    /// Input valuation carried by a letter.
    pub fn input_of(&self, letter: Letter) -> u32 {
        match self.kind {
            AlphabetKind::Concrete => letter & self.partition.input_mask(),
            AlphabetKind::Open => OpenLetterIndex::new(&self.partition).input_of(letter),
            AlphabetKind::Input => letter,
        }
    }

    pub fn letter_label(&self, letter: Letter) -> String {
        let p = &self.partition;
        match self.kind {
            AlphabetKind::Concrete => {
                let parts: Vec<String> = (0..p.num_props())
                    .map(|b| {
                        let name = if b < p.num_inputs() {
                            &p.inputs()[b]
                        } else {
                            &p.outputs()[b - p.num_inputs()]
                        };
                        if letter >> b & 1 == 1 {
                            name.clone()
                        } else {
                            format!("!{name}")
                        }
                    })
                    .collect();
                parts.join(" ")
            }
            AlphabetKind::Open => {
                OpenLetterIndex::new(p).decode(letter).display(p).to_string()
            }
            AlphabetKind::Input => {
                let parts: Vec<String> = p
                    .inputs()
                    .iter()
                    .enumerate()
                    .map(|(b, n)| if letter >> b & 1 == 1 { n.clone() } else { format!("!{n}") })
                    .collect();
                parts.join(" ")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automata read different alphabets")]
    AlphabetMismatch,
    #[error("resource limit exceeded in {construction}: {detail}")]
    ResourceLimit { construction: &'static str, detail: String },
    #[error("formula is not in negation normal form")]
    NotNnf,
}

/// Caps applied to every explicit construction.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_states: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 1_000_000, deadline: None }
    }
}

impl Limits {
    pub fn check(&self, construction: &'static str, states: usize) -> Result<(), AutomatonError> {
        if states > self.max_states {
            return Err(AutomatonError::ResourceLimit {
                construction,
                detail: format!("more than {} states", self.max_states),
            });
        }
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(AutomatonError::ResourceLimit {
                    construction,
                    detail: "timeout".into(),
                });
            }
        }
        Ok(())
    }
}
