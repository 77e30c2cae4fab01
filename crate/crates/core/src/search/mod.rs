//! Bounded model search: enumeration of small models, satisfiability and
//! countermodel search, and soundness checks of axiom schemata and rules.
//!
//! Everything here is a semi-decision procedure. Finding no countermodel
//! up to a bound is evidence, not proof.

mod find;
mod generate;
mod schema;
mod space;

use std::collections::BTreeSet;

use crate::checker::CheckError;
use crate::syntax::{Agent, Formula};

pub use find::{find_countermodel, find_model, OutcomeJson, SearchOutcome, Verdict};
pub use generate::FormulaGenerator;
pub use schema::{
    check_rule_rrc, check_schema, check_schemata, Counterexample, Mutation, RuleEntry, Schema, SchemaEntry,
    SchemaReport, System,
};
pub use space::{all_partitions, enumerate_models, enumerate_pseudo_models, pseudo_extensions, ModelSpace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("the state bound must be at least 1")]
    NoStates,
    #[error("at least one agent is required")]
    NoAgents,
    #[error("the search space is too large for these bounds")]
    TooLarge,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Limits for enumeration and for seeded instance generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_states: usize,
    pub agents: BTreeSet<Agent>,
    /// `None` means the atoms of the query, or `{p}` when there is no query
    /// formula.
    pub atoms: Option<BTreeSet<String>>,
    pub seed: u64,
    pub instances: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_states: 4,
            agents: agents(["1", "2"]),
            atoms: None,
            seed: 0,
            instances: 200,
        }
    }
}

/// An agent set from names.
pub fn agents<'a>(names: impl IntoIterator<Item = &'a str>) -> BTreeSet<Agent> {
    names.into_iter().map(Agent::from).collect()
}

impl SearchBounds {
    pub fn with_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn with_agents<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.agents = agents(names);
        self
    }

    pub fn with_atoms<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.atoms = Some(names.into_iter().map(str::to_owned).collect());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_instances(mut self, instances: usize) -> Self {
        self.instances = instances;
        self
    }

    /// Atoms used when no query formula decides them.
    pub fn default_atoms(&self) -> BTreeSet<String> {
        self.atoms
            .clone()
            .unwrap_or_else(|| BTreeSet::from(["p".to_owned()]))
    }

    /// The space searched for `f`: the bound's agents plus any the formula
    /// mentions, and the bound's atoms or else the formula's.
    pub fn space_for(&self, f: &Formula) -> Result<ModelSpace, SearchError> {
        let mut agents = self.agents.clone();
        agents.extend(f.agents());
        let atoms = self.atoms.clone().unwrap_or_else(|| f.atoms());
        ModelSpace::new(self.max_states, &agents, &atoms)
    }

    pub fn space(&self) -> Result<ModelSpace, SearchError> {
        ModelSpace::new(self.max_states, &self.agents, &self.default_atoms())
    }
}
