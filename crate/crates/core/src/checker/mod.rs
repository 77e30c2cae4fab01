//! Satisfaction on genuine models and pseudo satisfaction on pre-models.
//!
//! Evaluation is bottom-up: every subformula is turned into the set of
//! states where it holds. Resolved structures are built once per
//! (structure, group) pair within a query and reused.

use std::borrow::Cow;
use std::collections::HashMap;

use crate::kripke::{Model, Partition, PreModel};
use crate::syntax::{Agent, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("formula mentions agent `{0}`, which the model does not declare")]
    UnknownAgent(Agent),
    #[error("formula mentions atom `{0}`, which the model does not declare")]
    UnknownAtom(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("announcements are not interpreted on pre-models")]
    AnnouncementOnPreModel,
}

/// What the evaluator needs from a structure.
pub trait Structure: Clone + Send + Sync {
    /// States, agents, valuation and agent relations.
    fn base(&self) -> &Model;
    /// The relation `D_G` quantifies over.
    fn distributed(&self, mask: u64) -> Cow<'_, Partition>;
    /// The relation `C_G` quantifies over.
    fn common(&self, mask: u64) -> Partition;
    fn resolved(&self, mask: u64) -> Self;
    /// The substructure on ascending state indices, for announcements.
    fn restricted(&self, keep: &[usize]) -> Result<Self, CheckError>;
    fn interprets_announcements(&self) -> bool;
}

impl Structure for Model {
    fn base(&self) -> &Model {
        self
    }

    fn distributed(&self, mask: u64) -> Cow<'_, Partition> {
        if mask.is_power_of_two() {
            Cow::Borrowed(&self.relations()[mask.trailing_zeros() as usize])
        } else {
            Cow::Owned(self.group_relation_mask(mask))
        }
    }

    fn common(&self, mask: u64) -> Partition {
        self.common_relation_mask(mask)
    }

    fn resolved(&self, mask: u64) -> Self {
        self.resolve_mask(mask)
    }

    fn restricted(&self, keep: &[usize]) -> Result<Self, CheckError> {
        Ok(self.restrict_indices(keep).expect("non-empty restriction"))
    }

    fn interprets_announcements(&self) -> bool {
        true
    }
}

impl Structure for PreModel {
    fn base(&self) -> &Model {
        PreModel::base(self)
    }

    fn distributed(&self, mask: u64) -> Cow<'_, Partition> {
        Cow::Borrowed(self.group_relation_mask(mask))
    }

    fn common(&self, mask: u64) -> Partition {
        self.common_relation_mask(mask)
    }

    fn resolved(&self, mask: u64) -> Self {
        self.resolve_mask(mask)
    }

    fn restricted(&self, _keep: &[usize]) -> Result<Self, CheckError> {
        Err(CheckError::AnnouncementOnPreModel)
    }

    fn interprets_announcements(&self) -> bool {
        false
    }
}

/// A structure together with a designated state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pointed<S> {
    pub structure: S,
    pub state: usize,
}

impl<S: Structure> Pointed<S> {
    pub fn new(structure: S, state: &str) -> Result<Self, CheckError> {
        let state = structure
            .base()
            .state_index(state)
            .ok_or_else(|| CheckError::UnknownState(state.to_owned()))?;
        Ok(Pointed { structure, state })
    }

    pub fn state_name(&self) -> &str {
        &self.structure.base().states()[self.state]
    }

    /// Every point of a structure.
    pub fn all(structure: &S) -> Vec<Pointed<S>> {
        (0..structure.base().state_count())
            .map(|state| Pointed {
                structure: structure.clone(),
                state,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Knows(usize, Box<Node>),
    Distributed(u64, Box<Node>),
    Common(u64, Box<Node>),
    Resolved(u64, Box<Node>),
    Announce(Box<Node>, Box<Node>),
}

/// A formula with agents replaced by indices into a fixed agent list, so
/// it can be evaluated on many structures sharing that list.
#[derive(Clone, Debug)]
pub struct Compiled {
    agents: Vec<Agent>,
    root: Node,
    atoms: Vec<String>,
    announces: bool,
}

impl Compiled {
    /// `agents` must be sorted, as in [`Model::agents`].
    pub fn new(f: &Formula, agents: &[Agent]) -> Result<Self, CheckError> {
        let index = |a: &Agent| {
            agents
                .binary_search(a)
                .map_err(|_| CheckError::UnknownAgent(a.clone()))
        };
        let mask = |g: &crate::syntax::Group| {
            g.iter().try_fold(0u64, |m, a| Ok(m | 1 << index(a)?))
        };
        fn go(
            f: &Formula,
            index: &dyn Fn(&Agent) -> Result<usize, CheckError>,
            mask: &dyn Fn(&crate::syntax::Group) -> Result<u64, CheckError>,
        ) -> Result<Node, CheckError> {
            let sub = |a: &Formula| go(a, index, mask).map(Box::new);
            Ok(match f {
                Formula::Top => Node::Top,
                Formula::Bottom => Node::Bottom,
                Formula::Atom(p) => Node::Atom(p.clone()),
                Formula::Not(a) => Node::Not(sub(a)?),
                Formula::And(a, b) => Node::And(sub(a)?, sub(b)?),
                Formula::Knows(i, a) => Node::Knows(index(i)?, sub(a)?),
                Formula::Distributed(g, a) => Node::Distributed(mask(g)?, sub(a)?),
                Formula::Common(g, a) => Node::Common(mask(g)?, sub(a)?),
                Formula::Resolved(g, a) => Node::Resolved(mask(g)?, sub(a)?),
                Formula::Announce(a, b) => Node::Announce(sub(a)?, sub(b)?),
            })
        }
        Ok(Compiled {
            agents: agents.to_vec(),
            root: go(f, &index, &mask)?,
            atoms: f.atoms().into_iter().collect(),
            announces: f.has_announcement(),
        })
    }

    /// The states of `s` where the formula holds.
    pub fn extension<S: Structure>(&self, s: &S) -> Result<Vec<bool>, CheckError> {
        let base = s.base();
        if base.agents() != self.agents.as_slice() {
            let missing = self
                .agents
                .iter()
                .find(|a| base.agent_index(a).is_none())
                .or_else(|| base.agents().first())
                .cloned()
                .expect("models have agents");
            return Err(CheckError::UnknownAgent(missing));
        }
        if let Some(p) = self.atoms.iter().find(|p| base.valuation(p).is_none()) {
            return Err(CheckError::UnknownAtom(p.clone()));
        }
        if self.announces && !s.interprets_announcements() {
            return Err(CheckError::AnnouncementOnPreModel);
        }
        let mut eval = Evaluator {
            arena: vec![Cow::Borrowed(s)],
            resolved: HashMap::new(),
        };
        eval.extension(0, &self.root)
    }

    pub fn holds_at<S: Structure>(&self, s: &S, state: usize) -> Result<bool, CheckError> {
        Ok(self.extension(s)?[state])
    }
}

struct Evaluator<'a, S: Structure> {
    arena: Vec<Cow<'a, S>>,
    resolved: HashMap<(usize, u64), usize>,
}

impl<S: Structure> Evaluator<'_, S> {
    fn extension(&mut self, sid: usize, node: &Node) -> Result<Vec<bool>, CheckError> {
        let n = self.arena[sid].base().state_count();
        Ok(match node {
            Node::Top => vec![true; n],
            Node::Bottom => vec![false; n],
            Node::Atom(p) => self.arena[sid]
                .base()
                .valuation(p)
                .ok_or_else(|| CheckError::UnknownAtom(p.clone()))?
                .to_vec(),
            Node::Not(a) => {
                let mut v = self.extension(sid, a)?;
                v.iter_mut().for_each(|b| *b = !*b);
                v
            }
            Node::And(a, b) => {
                let mut v = self.extension(sid, a)?;
                if v.iter().any(|&x| x) {
                    let w = self.extension(sid, b)?;
                    v.iter_mut().zip(w).for_each(|(x, y)| *x &= y);
                }
                v
            }
            Node::Knows(i, a) => {
                let v = self.extension(sid, a)?;
                self.arena[sid].base().relations()[*i].necessity(&v)
            }
            Node::Distributed(m, a) => {
                let v = self.extension(sid, a)?;
                self.arena[sid].distributed(*m).necessity(&v)
            }
            Node::Common(m, a) => {
                let v = self.extension(sid, a)?;
                self.arena[sid].common(*m).necessity(&v)
            }
            Node::Resolved(m, a) => {
                let target = match self.resolved.get(&(sid, *m)) {
                    Some(&t) => t,
                    None => {
                        let r = self.arena[sid].resolved(*m);
                        self.arena.push(Cow::Owned(r));
                        let t = self.arena.len() - 1;
                        self.resolved.insert((sid, *m), t);
                        t
                    }
                };
                self.extension(target, a)?
            }
            Node::Announce(ann, body) => {
                let a = self.extension(sid, ann)?;
                let keep: Vec<usize> = (0..n).filter(|&s| a[s]).collect();
                if keep.is_empty() {
                    return Ok(vec![true; n]);
                }
                let sub = self.arena[sid].restricted(&keep)?;
                self.arena.push(Cow::Owned(sub));
                let b = self.extension(self.arena.len() - 1, body)?;
                let mut out = vec![true; n];
                for (k, &s) in keep.iter().enumerate() {
                    out[s] = b[k];
                }
                out
            }
        })
    }
}

fn state_of(m: &Model, state: &str) -> Result<usize, CheckError> {
    m.state_index(state)
        .ok_or_else(|| CheckError::UnknownState(state.to_owned()))
}

/// The states of `s` where `f` holds, under the semantics of `S`.
pub fn extension_of<S: Structure>(s: &S, f: &Formula) -> Result<Vec<bool>, CheckError> {
    Compiled::new(f, s.base().agents())?.extension(s)
}

pub fn satisfies(m: &Model, state: &str, f: &Formula) -> Result<bool, CheckError> {
    let s = state_of(m, state)?;
    Ok(extension(m, f)?[s])
}

/// Pseudo satisfaction: `D_G` reads the stored group relation, `C_G` the
/// closure of agent relations and `R_G` the pre-model update.
pub fn satisfies_pseudo(p: &PreModel, state: &str, f: &Formula) -> Result<bool, CheckError> {
    let s = state_of(p.base(), state)?;
    Ok(extension_pseudo(p, f)?[s])
}

pub fn extension(m: &Model, f: &Formula) -> Result<Vec<bool>, CheckError> {
    extension_of(m, f)
}

pub fn extension_pseudo(p: &PreModel, f: &Formula) -> Result<Vec<bool>, CheckError> {
    extension_of(p, f)
}

/// Names of the states where `f` holds.
pub fn extension_names(m: &Model, f: &Formula) -> Result<Vec<String>, CheckError> {
    let ext = extension(m, f)?;
    Ok(m.states()
        .iter()
        .zip(ext)
        .filter(|(_, b)| *b)
        .map(|(s, _)| s.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// The first point, by position in the input, where the two formulas
    /// differ, and the value of the left formula there.
    Differ { point: usize, left: bool },
}

/// Compares `f` and `g` at every supplied point.
pub fn equivalent_on<'a, S: Structure + 'a>(
    points: impl IntoIterator<Item = &'a Pointed<S>>,
    f: &Formula,
    g: &Formula,
) -> Result<Agreement, CheckError> {
    let mut cache: Vec<(Compiled, Compiled)> = Vec::new();
    for (k, p) in points.into_iter().enumerate() {
        let agents = p.structure.base().agents();
        let pos = match cache.iter().position(|(c, _)| c.agents == agents) {
            Some(pos) => pos,
            None => {
                cache.push((Compiled::new(f, agents)?, Compiled::new(g, agents)?));
                cache.len() - 1
            }
        };
        let (cf, cg) = &cache[pos];
        let left = cf.holds_at(&p.structure, p.state)?;
        if left != cg.holds_at(&p.structure, p.state)? {
            return Ok(Agreement::Differ { point: k, left });
        }
    }
    Ok(Agreement::Agree)
}
