//! JSON model files.
//!
//! ```json
//! { "agents": ["1","2"], "props": ["p"], "states": ["s","t"],
//!   "relations": { "1": [["s","t"]], "2": [["s"],["t"]] },
//!   "valuation": { "p": ["t"] },
//!   "group_relations": { "1,2": [["s"],["t"]] } }
//! ```
//!
//! `group_relations` is optional and marks the file as a pre-model; groups
//! it leaves out get the intersection of their members' relations. Group
//! keys are comma-joined agent names in sorted order. When loading,
//! singleton blocks may be omitted.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Model, Owner, Partition, PreModel, Violation, MAX_AGENTS, MAX_PREMODEL_AGENTS};
use crate::syntax::{Agent, Group};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub agents: Vec<String>,
    #[serde(default)]
    pub props: Vec<String>,
    pub states: Vec<String>,
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_relations: Option<BTreeMap<String, Vec<Vec<String>>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{context}: invalid JSON at line {}, column {}: {source}", source.line(), source.column())]
    Json {
        context: String,
        source: serde_json::Error,
    },
    #[error("{context}: invalid model: {}", render_violations(.violations))]
    Invalid {
        context: String,
        violations: Vec<Violation>,
    },
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Violation {
    /// Whether this only concerns the pseudo-model conditions, which a
    /// pre-model is allowed to fail.
    pub fn is_pseudo(&self) -> bool {
        matches!(
            self,
            Violation::PseudoSingleton(_) | Violation::PseudoMonotonicity { .. }
        )
    }
}

/// Strict structural check of a model file. Every block must be listed
/// explicitly. For pre-model files that are otherwise well formed, failures
/// of the pseudo-model conditions are reported too.
pub fn validate(file: &ModelFile) -> Vec<Violation> {
    let mut out = Vec::new();
    let states: HashSet<&str> = file.states.iter().map(String::as_str).collect();
    if file.states.is_empty() {
        out.push(Violation::NoStates);
    }
    out.extend(duplicates(&file.states).map(Violation::DuplicateState));
    if file.agents.is_empty() {
        out.push(Violation::NoAgents);
    }
    if file.agents.len() > MAX_AGENTS
        || (file.group_relations.is_some() && file.agents.len() > MAX_PREMODEL_AGENTS)
    {
        out.push(Violation::TooManyAgents(file.agents.len()));
    }
    out.extend(duplicates(&file.agents).map(Violation::DuplicateAgent));
    let agents: BTreeSet<&str> = file.agents.iter().map(String::as_str).collect();

    for agent in &file.agents {
        match file.relations.get(agent) {
            None => out.push(Violation::MissingRelation(agent.clone())),
            Some(blocks) => check_blocks(&file.states, &states, Owner::Agent(agent.clone()), blocks, &mut out),
        }
    }
    for key in file.relations.keys() {
        if !agents.contains(key.as_str()) {
            out.push(Violation::UndeclaredAgent(key.clone()));
        }
    }
    for (prop, true_at) in &file.valuation {
        if !file.props.contains(prop) {
            out.push(Violation::UndeclaredProp(prop.clone()));
        }
        for s in true_at {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState {
                    owner: format!("valuation of {prop}"),
                    state: s.clone(),
                });
            }
        }
    }
    if let Some(groups) = &file.group_relations {
        for (key, blocks) in groups {
            match canonical_group(key, &agents) {
                Some(_) => check_blocks(&file.states, &states, Owner::Group(key.clone()), blocks, &mut out),
                None => out.push(Violation::BadGroupKey(key.clone())),
            }
        }
    }
    if out.is_empty() && file.group_relations.is_some() {
        match file.build_premodel() {
            Ok(pre) => out.extend(pre.pseudo_violations()),
            Err(v) => out.extend(v),
        }
    }
    out
}

fn duplicates(names: &[String]) -> impl Iterator<Item = String> + '_ {
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    names
        .iter()
        .filter(move |n| !seen.insert(n.as_str()) && reported.insert(n.as_str()))
        .cloned()
}

fn canonical_group(key: &str, agents: &BTreeSet<&str>) -> Option<Group> {
    let group = Group::from_key(key).ok()?;
    let declared = group.iter().all(|a| agents.contains(a.name()));
    (declared && group.key() == key).then_some(group)
}

fn check_blocks(
    order: &[String],
    states: &HashSet<&str>,
    owner: Owner,
    blocks: &[Vec<String>],
    out: &mut Vec<Violation>,
) {
    let mut seen = HashSet::new();
    for block in blocks {
        if block.is_empty() {
            out.push(Violation::EmptyBlock { owner: owner.clone() });
        }
        for s in block {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState {
                    owner: format!("{owner} partition"),
                    state: s.clone(),
                });
            } else if !seen.insert(s.as_str()) {
                out.push(Violation::Overlap {
                    owner: owner.clone(),
                    state: s.clone(),
                });
            }
        }
    }
    let missing: Vec<String> = order
        .iter()
        .filter(|s| !seen.contains(s.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() {
        out.push(Violation::Uncovered { owner, states: missing });
    }
}

/// Appends the omitted singleton blocks of one partition.
fn fill_singletons(order: &[String], blocks: &mut Vec<Vec<String>>) {
    let listed: HashSet<String> = blocks.iter().flatten().cloned().collect();
    for s in order {
        if !listed.contains(s) {
            blocks.push(vec![s.clone()]);
        }
    }
}

impl ModelFile {
    pub fn from_json(text: &str, context: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|source| LoadError::Json {
            context: context.to_owned(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ModelFile::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    pub fn is_premodel(&self) -> bool {
        self.group_relations.is_some()
    }

    /// The same file with every omitted singleton block written out.
    pub fn with_implied_singletons(&self) -> ModelFile {
        let mut file = self.clone();
        for blocks in file.relations.values_mut() {
            fill_singletons(&self.states, blocks);
        }
        if let Some(groups) = &mut file.group_relations {
            for blocks in groups.values_mut() {
                fill_singletons(&self.states, blocks);
            }
        }
        file
    }

    fn checked(&self, context: &str) -> Result<ModelFile, LoadError> {
        let file = self.with_implied_singletons();
        let violations: Vec<Violation> = validate(&file).into_iter().filter(|v| !v.is_pseudo()).collect();
        if violations.is_empty() {
            Ok(file)
        } else {
            Err(LoadError::Invalid {
                context: context.to_owned(),
                violations,
            })
        }
    }

    /// Loads a genuine model. Group relations, if present, are ignored.
    pub fn to_model(&self, context: &str) -> Result<Model, LoadError> {
        let file = self.checked(context)?;
        file.build_model().map_err(|violations| LoadError::Invalid {
            context: context.to_owned(),
            violations,
        })
    }

    /// Loads a pre-model; a file without group relations yields the
    /// canonical embedding of its model.
    pub fn to_premodel(&self, context: &str) -> Result<PreModel, LoadError> {
        let file = self.checked(context)?;
        file.build_premodel().map_err(|violations| LoadError::Invalid {
            context: context.to_owned(),
            violations,
        })
    }

    fn partition(&self, blocks: &[Vec<String>], owner: Owner) -> Result<Partition, Vec<Violation>> {
        let index: BTreeMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let blocks: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| b.iter().map(|s| index[s.as_str()]).collect())
            .collect();
        Partition::from_blocks(self.states.len(), &blocks).map_err(|e| {
            vec![Violation::Uncovered {
                owner,
                states: vec![e.to_string()],
            }]
        })
    }

    fn build_model(&self) -> Result<Model, Vec<Violation>> {
        let mut agents: Vec<Agent> = self.agents.iter().map(|a| Agent::from(a.as_str())).collect();
        agents.sort();
        let relations = agents
            .iter()
            .map(|a| self.partition(&self.relations[a.name()], Owner::Agent(a.name().to_owned())))
            .collect::<Result<Vec<_>, _>>()?;
        let valuation = self
            .props
            .iter()
            .map(|p| {
                let true_at = self.valuation.get(p);
                let v = self
                    .states
                    .iter()
                    .map(|s| true_at.is_some_and(|t| t.contains(s)))
                    .collect();
                (p.clone(), v)
            })
            .collect();
        let states: Arc<[String]> = self.states.iter().cloned().collect();
        Model::from_parts(states, agents.into(), valuation, relations)
            .map_err(|e| vec![Violation::BadGroupKey(e.to_string())])
    }

    fn build_premodel(&self) -> Result<PreModel, Vec<Violation>> {
        let base = self.build_model()?;
        let mut explicit = BTreeMap::new();
        for (key, blocks) in self.group_relations.iter().flatten() {
            let group = Group::from_key(key).map_err(|_| vec![Violation::BadGroupKey(key.clone())])?;
            explicit.insert(group, self.partition(blocks, Owner::Group(key.clone()))?);
        }
        PreModel::new(base, explicit).map_err(|e| vec![Violation::BadGroupKey(e.to_string())])
    }

    fn blocks_of(m: &Model, p: &Partition) -> Vec<Vec<String>> {
        p.blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|s| m.states()[s].clone()).collect())
            .collect()
    }

    pub fn from_model(m: &Model) -> ModelFile {
        ModelFile {
            agents: m.agents().iter().map(|a| a.name().to_owned()).collect(),
            props: m.props().map(str::to_owned).collect(),
            states: m.states().to_vec(),
            relations: m
                .agents()
                .iter()
                .zip(m.relations())
                .map(|(a, p)| (a.name().to_owned(), ModelFile::blocks_of(m, p)))
                .collect(),
            valuation: m
                .props()
                .map(|p| {
                    let v = m.valuation(p).expect("declared");
                    let true_at = m
                        .states()
                        .iter()
                        .zip(v)
                        .filter(|(_, &b)| b)
                        .map(|(s, _)| s.clone())
                        .collect();
                    (p.to_owned(), true_at)
                })
                .collect(),
            group_relations: None,
        }
    }

    /// Writes every group relation, singletons included.
    pub fn from_premodel(pre: &PreModel) -> ModelFile {
        let base = pre.base();
        let mut file = ModelFile::from_model(base);
        file.group_relations = Some(
            pre.group_masks()
                .map(|mask| {
                    (
                        base.group_of_mask(mask).key(),
                        ModelFile::blocks_of(base, pre.group_relation_mask(mask)),
                    )
                })
                .collect(),
        );
        file
    }
}
