//! Formulas of the epistemic languages with distributed knowledge, common
//! knowledge, public announcement and resolution operators.

mod closure;
mod parse;
mod reduce;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use closure::{closure, ClosureError};
pub use parse::{parse, parse_open, ParseError};
pub use reduce::{delta, push_modal, reduce, PushError};

/// An agent, identified by an opaque symbolic name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Self {
        Agent(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Self {
        Agent(s.to_owned())
    }
}

/// A non-empty set of agents.
///
/// Members are kept sorted, so two groups with the same members compare
/// equal and print identically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Group(BTreeSet<Agent>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a group must contain at least one agent")]
pub struct EmptyGroup;

impl Group {
    pub fn new<I, A>(members: I) -> Result<Self, EmptyGroup>
    where
        I: IntoIterator<Item = A>,
        A: Into<Agent>,
    {
        let set: BTreeSet<Agent> = members.into_iter().map(Into::into).collect();
        if set.is_empty() {
            Err(EmptyGroup)
        } else {
            Ok(Group(set))
        }
    }

    pub fn singleton(agent: Agent) -> Self {
        Group(BTreeSet::from([agent]))
    }

    /// Parses the comma-joined spelling used by model files and CLI flags,
    /// e.g. `"1,2"`.
    pub fn from_key(key: &str) -> Result<Self, EmptyGroup> {
        Group::new(
            key.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Agent::from),
        )
    }

    /// Comma-joined member names in sorted order.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(Agent::name)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn members(&self) -> &BTreeSet<Agent> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Agent> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }

    pub fn contains(&self, agent: &Agent) -> bool {
        self.0.contains(agent)
    }

    pub fn intersects(&self, other: &Group) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &Group) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Group) -> Group {
        Group(self.0.union(&other.0).cloned().collect())
    }

    /// The intersection, or `None` when the groups are disjoint.
    pub fn intersection(&self, other: &Group) -> Option<Group> {
        let set: BTreeSet<Agent> = self.0.intersection(&other.0).cloned().collect();
        (!set.is_empty()).then_some(Group(set))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl From<Agent> for Group {
    fn from(agent: Agent) -> Self {
        Group::singleton(agent)
    }
}

/// Abstract syntax of formulas.
///
/// Only primitive connectives are represented. Disjunction, implication,
/// the biconditional and "everybody knows" are built by the constructor
/// functions below and never appear as nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `K_i φ`
    Knows(Agent, Box<Formula>),
    /// `D_G φ`
    Distributed(Group, Box<Formula>),
    /// `C_G φ`
    Common(Group, Box<Formula>),
    /// `R_G φ`
    Resolved(Group, Box<Formula>),
    /// `[ψ] φ`: the announcement comes first, the body second.
    Announce(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `a ∨ b` as `¬(¬a ∧ ¬b)`.
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a → b` as `¬(a ∧ ¬b)`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `a ↔ b` as `(a → b) ∧ (b → a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn knows(agent: impl Into<Agent>, f: Formula) -> Self {
        Formula::Knows(agent.into(), Box::new(f))
    }

    pub fn distributed(group: Group, f: Formula) -> Self {
        Formula::Distributed(group, Box::new(f))
    }

    pub fn common(group: Group, f: Formula) -> Self {
        Formula::Common(group, Box::new(f))
    }

    pub fn resolved(group: Group, f: Formula) -> Self {
        Formula::Resolved(group, Box::new(f))
    }

    pub fn announce(announcement: Formula, body: Formula) -> Self {
        Formula::Announce(Box::new(announcement), Box::new(body))
    }

    /// `E_G φ`: the conjunction of `K_i φ` over the members of `G`, in
    /// member order, nested to the left.
    pub fn everybody(group: &Group, f: Formula) -> Self {
        let mut members = group.iter();
        let first = members.next().expect("groups are non-empty");
        members.fold(Formula::knows(first.clone(), f.clone()), |acc, agent| {
            Formula::and(acc, Formula::knows(agent.clone(), f.clone()))
        })
    }

    /// `R_{G_1} ⋯ R_{G_n} φ` with `G_1` outermost.
    pub fn resolved_chain(prefix: &[Group], inner: Formula) -> Self {
        prefix
            .iter()
            .rev()
            .fold(inner, |acc, g| Formula::resolved(g.clone(), acc))
    }

    /// Splits off the maximal leading run of resolution operators.
    pub fn resolution_prefix(&self) -> (Vec<&Group>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let Formula::Resolved(g, body) = cur {
            prefix.push(g);
            cur = body;
        }
        (prefix, cur)
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::Not(a)
            | Formula::Knows(_, a)
            | Formula::Distributed(_, a)
            | Formula::Common(_, a)
            | Formula::Resolved(_, a) => vec![a],
            Formula::And(a, b) | Formula::Announce(a, b) => vec![a, b],
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Every agent mentioned by a modality.
    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Knows(a, _) => {
                out.insert(a.clone());
            }
            Formula::Distributed(g, _) | Formula::Common(g, _) | Formula::Resolved(g, _) => {
                out.extend(g.iter().cloned());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_resolution(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Resolved(..)))
    }

    pub fn has_common(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Common(..)))
    }

    pub fn has_announcement(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Announce(..)))
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// The smallest of the five languages containing every connective used,
    /// or `None` if the formula mixes announcements with resolution.
    pub fn language(&self) -> Option<LanguageTag> {
        let (c, r, a) = (self.has_common(), self.has_resolution(), self.has_announcement());
        match (c, r, a) {
            (_, true, true) => None,
            (false, false, false) => Some(LanguageTag::Eld),
            (true, false, false) => Some(LanguageTag::Elcd),
            (_, false, true) => Some(LanguageTag::Pacd),
            (false, true, false) => Some(LanguageTag::Rd),
            (true, true, false) => Some(LanguageTag::Rcd),
        }
    }
}

/// The languages a formula may belong to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LanguageTag {
    Eld,
    Elcd,
    Pacd,
    Rd,
    Rcd,
}

impl LanguageTag {
    /// Language inclusion.
    pub fn is_within(self, other: LanguageTag) -> bool {
        use LanguageTag::*;
        matches!(
            (self, other),
            (Eld, _)
                | (Elcd, Elcd | Pacd | Rcd)
                | (Pacd, Pacd)
                | (Rd, Rd | Rcd)
                | (Rcd, Rcd)
        )
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageTag::Eld => "ELD",
            LanguageTag::Elcd => "ELCD",
            LanguageTag::Pacd => "PACD",
            LanguageTag::Rd => "RD",
            LanguageTag::Rcd => "RCD",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(key: &str) -> Group {
        Group::from_key(key).unwrap()
    }

    #[test]
    fn group_canonical_order() {
        assert_eq!(g("2,1"), g("1,2"));
        assert_eq!(g("3,1,2").key(), "1,2,3");
        assert_eq!(Group::from_key(""), Err(EmptyGroup));
    }

    #[test]
    fn subformulas_examples() {
        let p = Formula::atom("p");
        let k1p = Formula::knows("1", p.clone());
        assert_eq!(k1p.subformulas(), BTreeSet::from([k1p.clone(), p.clone()]));

        let conj = Formula::and(p.clone(), Formula::not(p.clone()));
        assert_eq!(
            conj.subformulas(),
            BTreeSet::from([conj.clone(), p.clone(), Formula::not(p.clone())])
        );

        let d = Formula::distributed(g("2"), p.clone());
        let r = Formula::resolved(g("1,2"), d.clone());
        assert_eq!(r.subformulas(), BTreeSet::from([r.clone(), d, p]));
    }

    #[test]
    fn everybody_expands_to_conjunction() {
        let p = Formula::atom("p");
        let e = Formula::everybody(&g("1,2"), p.clone());
        assert_eq!(
            e,
            Formula::and(Formula::knows("1", p.clone()), Formula::knows("2", p))
        );
    }

    #[test]
    fn language_tags() {
        let p = Formula::atom("p");
        assert_eq!(Formula::knows("1", p.clone()).language(), Some(LanguageTag::Eld));
        assert_eq!(
            Formula::common(g("1,2"), p.clone()).language(),
            Some(LanguageTag::Elcd)
        );
        assert_eq!(
            Formula::announce(p.clone(), p.clone()).language(),
            Some(LanguageTag::Pacd)
        );
        assert_eq!(
            Formula::resolved(g("1,2"), p.clone()).language(),
            Some(LanguageTag::Rd)
        );
        let rc = Formula::resolved(g("1"), Formula::common(g("1,2"), p.clone()));
        assert_eq!(rc.language(), Some(LanguageTag::Rcd));
        let mixed = Formula::announce(p.clone(), Formula::resolved(g("1"), p));
        assert_eq!(mixed.language(), None);
        assert!(LanguageTag::Eld.is_within(LanguageTag::Rcd));
        assert!(!LanguageTag::Pacd.is_within(LanguageTag::Rcd));
    }

    #[test]
    fn resolution_prefix_split() {
        let p = Formula::atom("p");
        let f = Formula::resolved_chain(&[g("1"), g("2,3")], Formula::knows("1", p.clone()));
        let (prefix, inner) = f.resolution_prefix();
        assert_eq!(prefix, vec![&g("1"), &g("2,3")]);
        assert_eq!(inner, &Formula::knows("1", p));
    }
}
