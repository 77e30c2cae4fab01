use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{KripkeError, Partition};
use crate::syntax::{delta, Agent, Group};

/// Largest agent set a model may declare; groups are handled as bit masks.
pub const MAX_AGENTS: usize = 64;

/// A finite epistemic model: states, one equivalence relation per agent and
/// a valuation.
///
/// States are addressed by index internally and carry opaque names. Agents
/// are kept sorted; agent `k` in that order owns bit `k` of a group mask.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    states: Arc<[String]>,
    agents: Arc<[Agent]>,
    valuation: Arc<BTreeMap<String, Vec<bool>>>,
    relations: Vec<Partition>,
}

/// What `iterated_relation` is asked about.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Target {
    Agent(Agent),
    Group(Group),
}

impl Target {
    pub fn core(&self) -> Group {
        match self {
            Target::Agent(a) => Group::singleton(a.clone()),
            Target::Group(g) => g.clone(),
        }
    }
}

impl Model {
    /// Assembles a model from index-based parts.
    ///
    /// `relations` follows the sorted order of `agents`; every valuation
    /// vector and partition must have one entry per state.
    pub fn from_parts(
        states: Arc<[String]>,
        agents: Arc<[Agent]>,
        valuation: BTreeMap<String, Vec<bool>>,
        relations: Vec<Partition>,
    ) -> Result<Self, KripkeError> {
        if states.is_empty() {
            return Err(KripkeError::NoStates);
        }
        if agents.is_empty() {
            return Err(KripkeError::NoAgents);
        }
        if agents.len() > MAX_AGENTS {
            return Err(KripkeError::TooManyAgents(agents.len()));
        }
        if agents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(KripkeError::UnsortedAgents);
        }
        let n = states.len();
        if relations.len() != agents.len()
            || relations.iter().any(|p| p.len() != n)
            || valuation.values().any(|v| v.len() != n)
        {
            return Err(KripkeError::ShapeMismatch);
        }
        Ok(Model {
            states,
            agents,
            valuation: Arc::new(valuation),
            relations,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub(crate) fn state_or_err(&self, name: &str) -> Result<usize, KripkeError> {
        self.state_index(name)
            .ok_or_else(|| KripkeError::UnknownState(name.to_owned()))
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_set(&self) -> BTreeSet<Agent> {
        self.agents.iter().cloned().collect()
    }

    pub fn agent_index(&self, agent: &Agent) -> Option<usize> {
        self.agents.binary_search(agent).ok()
    }

    pub fn props(&self) -> impl Iterator<Item = &str> {
        self.valuation.keys().map(String::as_str)
    }

    /// Truth values of `prop` per state; `None` for undeclared atoms.
    pub fn valuation(&self, prop: &str) -> Option<&[bool]> {
        self.valuation.get(prop).map(Vec::as_slice)
    }

    pub(crate) fn valuation_map(&self) -> &BTreeMap<String, Vec<bool>> {
        &self.valuation
    }

    /// Same states, agents and valuation with new agent relations.
    pub(crate) fn with_relations(&self, relations: Vec<Partition>) -> Model {
        debug_assert_eq!(relations.len(), self.agents.len());
        Model {
            states: self.states.clone(),
            agents: self.agents.clone(),
            valuation: self.valuation.clone(),
            relations,
        }
    }

    pub(crate) fn shared_agents(&self) -> Arc<[Agent]> {
        self.agents.clone()
    }

    pub fn relation(&self, agent: &Agent) -> Option<&Partition> {
        self.agent_index(agent).map(|i| &self.relations[i])
    }

    pub fn relations(&self) -> &[Partition] {
        &self.relations
    }

    /// The mask of every agent.
    pub fn full_mask(&self) -> u64 {
        if self.agents.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.agents.len()) - 1
        }
    }

    pub fn mask(&self, group: &Group) -> Result<u64, KripkeError> {
        group.iter().try_fold(0u64, |m, a| {
            self.agent_index(a)
                .map(|i| m | (1 << i))
                .ok_or_else(|| KripkeError::UnknownAgent(a.clone()))
        })
    }

    pub fn group_of_mask(&self, mask: u64) -> Group {
        Group::new(
            (0..self.agents.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.agents[i].clone()),
        )
        .expect("non-zero mask")
    }

    pub(crate) fn members(mask: u64) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| mask & (1u64 << i) != 0)
    }

    /// `∼_G`: intersection of the members' relations.
    pub fn group_relation(&self, group: &Group) -> Result<Partition, KripkeError> {
        Ok(self.group_relation_mask(self.mask(group)?))
    }

    pub fn group_relation_mask(&self, mask: u64) -> Partition {
        let mut members = Model::members(mask);
        let first = members.next().expect("non-empty group");
        members.fold(self.relations[first].clone(), |acc, i| {
            acc.meet(&self.relations[i])
        })
    }

    /// Transitive closure of the union of the members' relations.
    pub fn common_relation(&self, group: &Group) -> Result<Partition, KripkeError> {
        Ok(self.common_relation_mask(self.mask(group)?))
    }

    pub fn common_relation_mask(&self, mask: u64) -> Partition {
        Partition::join_all(
            self.state_count(),
            Model::members(mask).map(|i| &self.relations[i]),
        )
    }

    /// The global update in which every member of `group` adopts the
    /// group's intersection relation; everyone else is unchanged.
    pub fn resolve(&self, group: &Group) -> Result<Model, KripkeError> {
        Ok(self.resolve_mask(self.mask(group)?))
    }

    pub fn resolve_mask(&self, mask: u64) -> Model {
        let shared = self.group_relation_mask(mask);
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if mask & (1 << i) != 0 {
                    shared.clone()
                } else {
                    p.clone()
                }
            })
            .collect();
        self.with_relations(relations)
    }

    /// `∼_{δ(core, gs)}` read off directly, which is the relation of
    /// `target` after resolving by `gs[0]`, then `gs[1]`, and so on.
    pub fn iterated_relation(&self, seq: &[Group], target: &Target) -> Result<Partition, KripkeError> {
        for g in seq {
            self.mask(g)?;
        }
        self.group_relation(&delta(&target.core(), seq))
    }

    /// The submodel on the named states.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<Model, KripkeError> {
        let mut idx = keep
            .iter()
            .map(|s| self.state_or_err(s))
            .collect::<Result<Vec<_>, _>>()?;
        idx.sort_unstable();
        self.restrict_indices(&idx).ok_or(KripkeError::EmptyRestriction)
    }

    /// The submodel on ascending state indices; `None` when `keep` is empty.
    pub fn restrict_indices(&self, keep: &[usize]) -> Option<Model> {
        if keep.is_empty() {
            return None;
        }
        if keep.len() == self.state_count() {
            return Some(self.clone());
        }
        let states: Arc<[String]> = keep.iter().map(|&s| self.states[s].clone()).collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(p, v)| (p.clone(), keep.iter().map(|&s| v[s]).collect()))
            .collect();
        Some(Model {
            states,
            agents: self.agents.clone(),
            valuation: Arc::new(valuation),
            relations: self.relations.iter().map(|p| p.restrict(keep)).collect(),
        })
    }
}
