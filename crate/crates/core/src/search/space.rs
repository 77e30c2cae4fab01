use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::SearchError;
use crate::kripke::{Model, Partition, PreModel, PseudoModel};
use crate::syntax::Agent;

/// Every partition of `0..n`, in lexicographic order of their canonical
/// labels.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn grow(labels: &mut Vec<u32>, max: u32, n: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            out.push(Partition::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            grow(labels, max.max(l), n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    grow(&mut vec![0], 0, n, &mut out);
    out
}

/// All models with `1..=max_states` states over fixed agents and atoms.
///
/// States are named `"0"` to `"n-1"`. Models are indexed: smaller models
/// first, then the agents' partitions as an odometer with the first agent
/// most significant, then the valuation bits with the fastest digit last.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    agents: Arc<[Agent]>,
    atoms: Vec<String>,
    partitions: Vec<Vec<Partition>>,
    names: Vec<Arc<[String]>>,
    /// `offsets[n]` is the index of the first model with `n + 1` states.
    offsets: Vec<u64>,
}

impl ModelSpace {
    pub fn new(max_states: usize, agents: &BTreeSet<Agent>, atoms: &BTreeSet<String>) -> Result<Self, SearchError> {
        if max_states == 0 {
            return Err(SearchError::NoStates);
        }
        if agents.is_empty() {
            return Err(SearchError::NoAgents);
        }
        let mut partitions = Vec::new();
        let mut names = Vec::new();
        let mut offsets = vec![0u64];
        for n in 1..=max_states {
            let parts = all_partitions(n);
            let count = (parts.len() as u64)
                .checked_pow(agents.len() as u32)
                .and_then(|c| c.checked_mul(1u64.checked_shl((n * atoms.len()) as u32)?))
                .and_then(|c| c.checked_add(*offsets.last().unwrap()))
                .filter(|&c| c < 1 << 48)
                .ok_or(SearchError::TooLarge)?;
            offsets.push(count);
            partitions.push(parts);
            names.push((0..n).map(|s| s.to_string()).collect());
        }
        Ok(ModelSpace {
            agents: agents.iter().cloned().collect(),
            atoms: atoms.iter().cloned().collect(),
            partitions,
            names,
            offsets,
        })
    }

    pub fn max_states(&self) -> usize {
        self.partitions.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Number of models.
    pub fn len(&self) -> u64 {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of models with at most `n` states.
    pub fn len_up_to(&self, n: usize) -> u64 {
        self.offsets[n.min(self.max_states())]
    }

    pub fn model_at(&self, index: u64) -> Model {
        assert!(index < self.len(), "model index out of range");
        let n = self.offsets.partition_point(|&o| o <= index);
        let mut rest = index - self.offsets[n - 1];
        let parts = &self.partitions[n - 1];
        let bits = n * self.atoms.len();
        let mut valuation_bits = rest & ((1u64 << bits) - 1);
        rest >>= bits;
        let b = parts.len() as u64;
        let mut relations = vec![Partition::discrete(0); self.agents.len()];
        for slot in relations.iter_mut().rev() {
            *slot = parts[(rest % b) as usize].clone();
            rest /= b;
        }
        let mut valuation = BTreeMap::new();
        for atom in self.atoms.iter().rev() {
            let mut v = vec![false; n];
            for s in (0..n).rev() {
                v[s] = valuation_bits & 1 == 1;
                valuation_bits >>= 1;
            }
            valuation.insert(atom.clone(), v);
        }
        Model::from_parts(self.names[n - 1].clone(), self.agents.clone(), valuation, relations)
            .expect("enumerated models are well formed")
    }

    pub fn iter(&self) -> impl Iterator<Item = Model> + '_ {
        (0..self.len()).map(|i| self.model_at(i))
    }

    /// The first model, in index order, for which `f` yields a value,
    /// together with its index. Work is spread over the rayon pool; the
    /// result does not depend on the number of workers.
    pub fn find_map_first<T, F>(&self, limit: u64, f: F) -> Option<(u64, T)>
    where
        T: Send,
        F: Fn(&Model) -> Option<T> + Sync + Send,
    {
        (0..limit.min(self.len()))
            .into_par_iter()
            .find_map_first(|i| f(&self.model_at(i)).map(|t| (i, t)))
    }
}

/// Every model within the bounds, smallest first.
pub fn enumerate_models(
    max_states: usize,
    agents: &BTreeSet<Agent>,
    atoms: &BTreeSet<String>,
) -> Result<impl Iterator<Item = Model>, SearchError> {
    let space = ModelSpace::new(max_states, agents, atoms)?;
    Ok((0..space.len()).map(move |i| space.model_at(i)))
}

/// Every pseudo model whose agent part is `base`: group relations range over
/// all partitions finer than the relations of the groups one member
/// smaller, and singletons repeat their agent's relation.
pub fn pseudo_extensions(base: &Model) -> Vec<PseudoModel> {
    let k = base.agents().len();
    assert!(k <= crate::kripke::MAX_PREMODEL_AGENTS, "too many agents for a pre-model");
    let candidates = all_partitions(base.state_count());
    let total = (1usize << k) - 1;
    let mut groups: Vec<Partition> = Vec::with_capacity(total);
    let mut out = Vec::new();
    fn fill(
        base: &Model,
        candidates: &[Partition],
        groups: &mut Vec<Partition>,
        total: usize,
        out: &mut Vec<PseudoModel>,
    ) {
        let mask = groups.len() as u64 + 1;
        if groups.len() == total {
            let pre = PreModel::from_raw(base.clone(), groups.clone());
            out.push(PseudoModel::new(pre).expect("constructed under the pseudo conditions"));
            return;
        }
        if mask.is_power_of_two() {
            groups.push(base.relations()[mask.trailing_zeros() as usize].clone());
            fill(base, candidates, groups, total, out);
            groups.pop();
            return;
        }
        for c in candidates {
            let fine = Model::members(mask).all(|i| {
                let smaller = mask & !(1 << i);
                c.refines(&groups[smaller as usize - 1])
            });
            if fine {
                groups.push(c.clone());
                fill(base, candidates, groups, total, out);
                groups.pop();
            }
        }
    }
    fill(base, &candidates, &mut groups, total, &mut out);
    out
}

/// Every pseudo model within the bounds.
pub fn enumerate_pseudo_models(
    max_states: usize,
    agents: &BTreeSet<Agent>,
    atoms: &BTreeSet<String>,
) -> Result<impl Iterator<Item = PseudoModel>, SearchError> {
    Ok(enumerate_models(max_states, agents, atoms)?.flat_map(|m| pseudo_extensions(&m)))
}
