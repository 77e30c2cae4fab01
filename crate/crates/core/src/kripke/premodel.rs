use std::collections::BTreeMap;
use std::ops::Deref;
use std::sync::Arc;

use super::{KripkeError, Model, Partition, Violation};
use crate::syntax::{Agent, Group};

/// Largest agent set for which every group relation is stored.
pub const MAX_PREMODEL_AGENTS: usize = 16;

/// A model whose relations are indexed by agents and, independently, by
/// every non-empty group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreModel {
    base: Model,
    /// Indexed by group mask minus one.
    groups: Vec<Partition>,
}

impl PreModel {
    /// Adds group relations to `base`. Groups missing from `explicit`
    /// default to the intersection of their members' agent relations.
    pub fn new(base: Model, explicit: BTreeMap<Group, Partition>) -> Result<Self, KripkeError> {
        let k = base.agents().len();
        if k > MAX_PREMODEL_AGENTS {
            return Err(KripkeError::TooManyAgents(k));
        }
        let mut groups: Vec<Option<Partition>> = vec![None; (1usize << k) - 1];
        for (g, p) in explicit {
            let mask = base.mask(&g)?;
            if p.len() != base.state_count() {
                return Err(KripkeError::ShapeMismatch);
            }
            groups[mask as usize - 1] = Some(p);
        }
        let groups = groups
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.unwrap_or_else(|| base.group_relation_mask(i as u64 + 1)))
            .collect();
        Ok(PreModel { base, groups })
    }

    pub(crate) fn from_raw(base: Model, groups: Vec<Partition>) -> Self {
        debug_assert_eq!(groups.len(), (1usize << base.agents().len()) - 1);
        PreModel { base, groups }
    }

    /// The agent-indexed part, viewed as a genuine model.
    pub fn base(&self) -> &Model {
        &self.base
    }

    pub fn states(&self) -> &[String] {
        self.base.states()
    }

    pub fn agents(&self) -> &[Agent] {
        self.base.agents()
    }

    pub fn agent_relation(&self, agent: &Agent) -> Option<&Partition> {
        self.base.relation(agent)
    }

    pub fn group_relation(&self, group: &Group) -> Result<&Partition, KripkeError> {
        Ok(self.group_relation_mask(self.base.mask(group)?))
    }

    pub fn group_relation_mask(&self, mask: u64) -> &Partition {
        &self.groups[mask as usize - 1]
    }

    /// Masks of every group, ascending.
    pub fn group_masks(&self) -> impl Iterator<Item = u64> {
        1..=self.base.full_mask()
    }

    /// Closure of the union of the members' agent relations; group
    /// relations do not take part.
    pub fn common_relation(&self, group: &Group) -> Result<Partition, KripkeError> {
        Ok(self.base.common_relation_mask(self.base.mask(group)?))
    }

    pub fn common_relation_mask(&self, mask: u64) -> Partition {
        self.base.common_relation_mask(mask)
    }

    pub fn resolve(&self, group: &Group) -> Result<PreModel, KripkeError> {
        Ok(self.resolve_mask(self.base.mask(group)?))
    }

    /// Members of the group take the group's relation; every group `H`
    /// overlapping it takes the relation of `H ∪ G`.
    pub fn resolve_mask(&self, mask: u64) -> PreModel {
        let shared = self.group_relation_mask(mask);
        let relations = self
            .base
            .relations()
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
        let base = self.base.with_relations(relations);
        let groups = (1..=self.base.full_mask())
            .map(|h| {
                let source = if h & mask != 0 { h | mask } else { h };
                self.group_relation_mask(source).clone()
            })
            .collect();
        PreModel { base, groups }
    }

    /// Failures of the two pseudo-model conditions: singleton groups match
    /// their agent, and larger groups have finer relations.
    pub fn pseudo_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, agent) in self.agents().iter().enumerate() {
            if self.group_relation_mask(1 << i) != &self.base.relations()[i] {
                out.push(Violation::PseudoSingleton(agent.clone()));
            }
        }
        // Checking each group against its subsets with one member fewer
        // covers every inclusion by transitivity.
        for large in self.group_masks() {
            for i in Model::members(large) {
                let small = large & !(1 << i);
                if small == 0 {
                    continue;
                }
                if !self.group_relation_mask(large).refines(self.group_relation_mask(small)) {
                    out.push(Violation::PseudoMonotonicity {
                        smaller: self.base.group_of_mask(small),
                        larger: self.base.group_of_mask(large),
                    });
                }
            }
        }
        out
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo_violations().is_empty()
    }

    /// Adds a copy `x'` of state `x` that sits in exactly the blocks
    /// containing `x`, in every agent and group relation.
    pub fn duplicate_state(&self, x: &str) -> Result<(PreModel, String), KripkeError> {
        let xi = self.base.state_or_err(x)?;
        let mut name = format!("{x}'");
        while self.base.state_index(&name).is_some() {
            name.push('\'');
        }
        let states: Arc<[String]> = self
            .states()
            .iter()
            .cloned()
            .chain(std::iter::once(name.clone()))
            .collect();
        let valuation = self
            .base
            .valuation_map()
            .iter()
            .map(|(p, v)| {
                let mut v = v.clone();
                v.push(v[xi]);
                (p.clone(), v)
            })
            .collect();
        let relations = self.base.relations().iter().map(|p| p.with_copy_of(xi)).collect();
        let base = Model::from_parts(states, self.base.shared_agents(), valuation, relations)?;
        let groups = self.groups.iter().map(|p| p.with_copy_of(xi)).collect();
        Ok((PreModel { base, groups }, name))
    }
}

/// A pre-model known to satisfy the pseudo-model conditions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PseudoModel(PreModel);

impl PseudoModel {
    pub fn new(pre: PreModel) -> Result<Self, Vec<Violation>> {
        let violations = pre.pseudo_violations();
        if violations.is_empty() {
            Ok(PseudoModel(pre))
        } else {
            Err(violations)
        }
    }

    /// The embedding of a genuine model: each group relation is the
    /// intersection of its members' relations.
    pub fn from_model(m: &Model) -> Result<Self, KripkeError> {
        Ok(PseudoModel(PreModel::new(m.clone(), BTreeMap::new())?))
    }

    pub fn into_inner(self) -> PreModel {
        self.0
    }
}

impl Deref for PseudoModel {
    type Target = PreModel;

    fn deref(&self) -> &PreModel {
        &self.0
    }
}

/// The canonical embedding of a model as a pseudo model.
pub fn as_premodel(m: &Model) -> Result<PseudoModel, KripkeError> {
    PseudoModel::from_model(m)
}
