//! Kripke models, pre-models and their updates.
//!
//! Every relation is an equivalence, so relations are stored as partitions.
//! Group relations of a genuine model are derived on demand (intersection
//! for distributed knowledge, union closure for common knowledge); a
//! pre-model stores one relation per group explicitly.

mod file;
mod model;
mod partition;
mod premodel;

use std::fmt;

use crate::syntax::{Agent, Group};

pub use file::{validate, LoadError, ModelFile};
pub use model::{Model, Target, MAX_AGENTS};
pub use partition::{DisjointSets, Partition, PartitionError};
pub use premodel::{as_premodel, PreModel, PseudoModel, MAX_PREMODEL_AGENTS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KripkeError {
    #[error("a model needs at least one state")]
    NoStates,
    #[error("a model needs at least one agent")]
    NoAgents,
    #[error("{0} agents exceed the supported maximum")]
    TooManyAgents(usize),
    #[error("agents must be sorted and unique")]
    UnsortedAgents,
    #[error("relation or valuation size does not match the state count")]
    ShapeMismatch,
    #[error("unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("restriction to an empty set of states")]
    EmptyRestriction,
}

/// Whose relation a violation is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Owner {
    Agent(String),
    Group(String),
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Agent(a) => write!(f, "agent {a}"),
            Owner::Group(g) => write!(f, "group {g}"),
        }
    }
}

/// One broken model invariant. Validation reports these as data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("no states declared")]
    NoStates,
    #[error("no agents declared")]
    NoAgents,
    #[error("{0} agents exceed the supported maximum")]
    TooManyAgents(usize),
    #[error("state {0} declared more than once")]
    DuplicateState(String),
    #[error("agent {0} declared more than once")]
    DuplicateAgent(String),
    #[error("agent {0} has no relation")]
    MissingRelation(String),
    #[error("relation given for undeclared agent {0}")]
    UndeclaredAgent(String),
    #[error("valuation given for undeclared atom {0}")]
    UndeclaredProp(String),
    #[error("{owner} mentions unknown state {state}")]
    UnknownState { owner: String, state: String },
    #[error("{owner} partition has an empty block")]
    EmptyBlock { owner: Owner },
    #[error("{owner} partition lists state {state} more than once")]
    Overlap { owner: Owner, state: String },
    #[error("{owner} partition does not cover {}", states.join(","))]
    Uncovered { owner: Owner, states: Vec<String> },
    #[error("group key `{0}` is not a comma-joined list of declared agents")]
    BadGroupKey(String),
    #[error("pseudo: relation of group {{{0}}} differs from agent {0}")]
    PseudoSingleton(Agent),
    #[error("pseudo: monotonicity violated for {smaller}⊆{larger}")]
    PseudoMonotonicity { smaller: Group, larger: Group },
}
