//! Bisimulations between pre-models, and trans-bisimulations from a genuine
//! model to a pre-model.
//!
//! Both are computed as greatest fixpoints: start from every pair of
//! states that agree on atoms and delete pairs that break a back-and-forth
//! clause until nothing changes. Path clauses are decided against the
//! closure of a union of equivalence relations, which is again a partition.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::kripke::{KripkeError, Model, Partition, PreModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BisimError {
    #[error("the two structures have different agents")]
    AgentMismatch,
    #[error("the two structures declare different atoms")]
    AtomMismatch,
    #[error("unknown state `{0}`")]
    UnknownState(String),
}

/// A relation between the states of two structures, as index pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Relation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Relation::from_pairs((0..n).map(|s| (s, s)))
    }

    pub fn contains(&self, left: usize, right: usize) -> bool {
        self.pairs.contains(&(left, right))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn insert(&mut self, left: usize, right: usize) {
        self.pairs.insert((left, right));
    }

    /// The pairs spelled with state names, in index order.
    pub fn named(&self, left: &Model, right: &Model) -> Vec<NamedPair> {
        self.pairs
            .iter()
            .map(|&(a, b)| NamedPair(left.states()[a].clone(), right.states()[b].clone()))
            .collect()
    }
}

/// One pair of a relation as `[left, right]` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct NamedPair(pub String, pub String);

/// A clause that broke, for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub left: usize,
    pub right: usize,
    pub clause: String,
}

/// One back-and-forth condition: `forth` asks every `left`-successor of
/// the left state to be matched by a `right`-successor of the right state;
/// `back` asks the converse.
struct Clause {
    name: String,
    left: Partition,
    right: Partition,
    forth: bool,
    back: bool,
}

struct Problem<'a> {
    left: &'a Model,
    right: &'a Model,
    clauses: Vec<Clause>,
}

impl Problem<'_> {
    fn atoms_agree(&self, x: usize, y: usize) -> bool {
        self.left
            .props()
            .all(|p| self.left.valuation(p).unwrap()[x] == self.right.valuation(p).unwrap()[y])
    }

    fn failing_clause(&self, z: &[Vec<bool>], x: usize, y: usize) -> Option<&str> {
        if !self.atoms_agree(x, y) {
            return Some("at");
        }
        for c in &self.clauses {
            if c.forth
                && !c
                    .left
                    .block_of(x)
                    .all(|x2| c.right.block_of(y).any(|y2| z[x2][y2]))
            {
                return Some(&c.name);
            }
            if c.back
                && !c
                    .right
                    .block_of(y)
                    .all(|y2| c.left.block_of(x).any(|x2| z[x2][y2]))
            {
                return Some(&c.name);
            }
        }
        None
    }

    fn greatest(&self) -> Vec<Vec<bool>> {
        let (n, m) = (self.left.state_count(), self.right.state_count());
        let mut z: Vec<Vec<bool>> = (0..n)
            .map(|x| (0..m).map(|y| self.atoms_agree(x, y)).collect())
            .collect();
        loop {
            let mut changed = false;
            for x in 0..n {
                for y in 0..m {
                    if z[x][y] && self.failing_clause(&z, x, y).is_some() {
                        z[x][y] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                return z;
            }
        }
    }

    fn solve(&self, s: usize, t: usize) -> Option<Relation> {
        let z = self.greatest();
        z[s][t].then(|| {
            Relation::from_pairs(z.iter().enumerate().flat_map(|(x, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(move |(y, _)| (x, y))
            }))
        })
    }

    fn defect(&self, rel: &Relation) -> Option<Defect> {
        let (n, m) = (self.left.state_count(), self.right.state_count());
        if rel.pairs().any(|(x, y)| x >= n || y >= m) {
            let (left, right) = rel.pairs().find(|&(x, y)| x >= n || y >= m).unwrap();
            return Some(Defect {
                left,
                right,
                clause: "state out of range".into(),
            });
        }
        let mut z = vec![vec![false; m]; n];
        for (x, y) in rel.pairs() {
            z[x][y] = true;
        }
        rel.pairs().find_map(|(x, y)| {
            self.failing_clause(&z, x, y).map(|c| Defect {
                left: x,
                right: y,
                clause: c.to_owned(),
            })
        })
    }
}

fn compatible(a: &Model, b: &Model) -> Result<(), BisimError> {
    if a.agents() != b.agents() {
        return Err(BisimError::AgentMismatch);
    }
    if !a.props().eq(b.props()) {
        return Err(BisimError::AtomMismatch);
    }
    Ok(())
}

fn index(m: &Model, state: &str) -> Result<usize, BisimError> {
    m.state_index(state)
        .ok_or_else(|| BisimError::UnknownState(state.to_owned()))
}

fn pre_problem<'a>(a: &'a PreModel, b: &'a PreModel) -> Result<Problem<'a>, BisimError> {
    compatible(a.base(), b.base())?;
    let mut clauses: Vec<Clause> = a
        .agents()
        .iter()
        .zip(a.base().relations().iter().zip(b.base().relations()))
        .map(|(agent, (l, r))| Clause {
            name: format!("agent {agent}"),
            left: l.clone(),
            right: r.clone(),
            forth: true,
            back: true,
        })
        .collect();
    for mask in a.group_masks() {
        clauses.push(Clause {
            name: format!("group {}", a.base().group_of_mask(mask)),
            left: a.group_relation_mask(mask).clone(),
            right: b.group_relation_mask(mask).clone(),
            forth: true,
            back: true,
        });
    }
    Ok(Problem {
        left: a.base(),
        right: b.base(),
        clauses,
    })
}

/// The largest bisimulation between `a` and `b` over agent and group
/// labels, if it links `s` with `t`.
pub fn bisimilar_pre(a: &PreModel, s: &str, b: &PreModel, t: &str) -> Result<Option<Relation>, BisimError> {
    let problem = pre_problem(a, b)?;
    Ok(problem.solve(index(a.base(), s)?, index(b.base(), t)?))
}

/// The first pair of `rel` that breaks a bisimulation clause.
pub fn pre_bisimulation_defect(a: &PreModel, b: &PreModel, rel: &Relation) -> Result<Option<Defect>, BisimError> {
    Ok(pre_problem(a, b)?.defect(rel))
}

pub fn is_pre_bisimulation(a: &PreModel, b: &PreModel, rel: &Relation) -> Result<bool, BisimError> {
    Ok(pre_bisimulation_defect(a, b, rel)?.is_none())
}

fn trans_problem<'a>(m: &'a Model, n: &'a PreModel) -> Result<Problem<'a>, BisimError> {
    compatible(m, n.base())?;
    let size = n.states().len();
    let masks: Vec<u64> = n.group_masks().collect();
    let mut clauses = Vec::new();
    for (i, agent) in m.agents().iter().enumerate() {
        let bit = 1u64 << i;
        let path = Partition::join_all(
            size,
            std::iter::once(&n.base().relations()[i]).chain(
                masks
                    .iter()
                    .filter(|&&g| g & bit != 0)
                    .map(|&g| n.group_relation_mask(g)),
            ),
        );
        clauses.push(Clause {
            name: format!("zig_ag {agent}"),
            left: m.relations()[i].clone(),
            right: path,
            forth: true,
            back: false,
        });
        clauses.push(Clause {
            name: format!("zag agent {agent}"),
            left: m.relations()[i].clone(),
            right: n.base().relations()[i].clone(),
            forth: false,
            back: true,
        });
    }
    for &g in &masks {
        let group = m.group_of_mask(g);
        let meet = m.group_relation_mask(g);
        if g.count_ones() >= 2 {
            let path = Partition::join_all(
                size,
                masks
                    .iter()
                    .filter(|&&h| h & g == g)
                    .map(|&h| n.group_relation_mask(h)),
            );
            clauses.push(Clause {
                name: format!("zig_gr {group}"),
                left: meet.clone(),
                right: path,
                forth: true,
                back: false,
            });
        }
        clauses.push(Clause {
            name: format!("zag group {group}"),
            left: meet,
            right: n.group_relation_mask(g).clone(),
            forth: false,
            back: true,
        });
    }
    Ok(Problem {
        left: m,
        right: n.base(),
        clauses,
    })
}

/// The largest trans-bisimulation between `m` and `n`, if it links `s`
/// with `t`. Path clauses allow paths of length zero.
pub fn trans_bisimilar(m: &Model, s: &str, n: &PreModel, t: &str) -> Result<Option<Relation>, BisimError> {
    let problem = trans_problem(m, n)?;
    Ok(problem.solve(index(m, s)?, index(n.base(), t)?))
}

pub fn trans_bisimulation_defect(m: &Model, n: &PreModel, rel: &Relation) -> Result<Option<Defect>, BisimError> {
    Ok(trans_problem(m, n)?.defect(rel))
}

pub fn is_trans_bisimulation(m: &Model, n: &PreModel, rel: &Relation) -> Result<bool, BisimError> {
    Ok(trans_bisimulation_defect(m, n, rel)?.is_none())
}

/// Adds a copy of `x`; see [`PreModel::duplicate_state`]. Returns the new
/// pre-model, the copy's name and the relation linking every original
/// state to itself and `x` to its copy.
pub fn duplicate_state(p: &PreModel, x: &str) -> Result<(PreModel, String, Relation), KripkeError> {
    let (dup, name) = p.duplicate_state(x)?;
    let mut rel = Relation::identity(p.states().len());
    rel.insert(
        p.base().state_index(x).expect("checked by duplicate_state"),
        dup.base().state_index(&name).expect("just added"),
    );
    Ok((dup, name, rel))
}
