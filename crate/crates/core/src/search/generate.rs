use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Agent, Formula, Group, LanguageTag};

/// Seeded random formulas over fixed agents and atoms.
///
/// The same seed, stream and settings always give the same sequence.
#[derive(Clone, Debug)]
pub struct FormulaGenerator {
    rng: ChaCha8Rng,
    agents: Vec<Agent>,
    atoms: Vec<String>,
    language: LanguageTag,
}

impl FormulaGenerator {
    /// `language` limits the operators: common knowledge only in ELCD,
    /// PACD and RCD, resolution only in RD and RCD, announcements only in
    /// PACD.
    pub fn new(seed: u64, stream: u64, agents: &[Agent], atoms: &[String], language: LanguageTag) -> Self {
        assert!(!agents.is_empty() && !atoms.is_empty(), "generator needs agents and atoms");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        FormulaGenerator {
            rng,
            agents: agents.to_vec(),
            atoms: atoms.to_vec(),
            language,
        }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn agent(&mut self) -> Agent {
        self.agents.choose(&mut self.rng).unwrap().clone()
    }

    pub fn atom(&mut self) -> Formula {
        Formula::atom(self.atoms.choose(&mut self.rng).unwrap().clone())
    }

    /// A uniformly chosen non-empty group.
    pub fn group(&mut self) -> Group {
        let k = self.agents.len();
        let mask = self.rng.random_range(1..(1u64 << k));
        self.group_of(mask)
    }

    pub fn group_of(&self, mask: u64) -> Group {
        Group::new(
            (0..self.agents.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.agents[i].clone()),
        )
        .expect("non-zero mask")
    }

    /// A random group satisfying `accept`, or `None` if no group does.
    pub fn group_where(&mut self, accept: impl Fn(&Group) -> bool) -> Option<Group> {
        let all: Vec<Group> = (1..(1u64 << self.agents.len()))
            .map(|m| self.group_of(m))
            .filter(|g| accept(g))
            .collect();
        all.choose(&mut self.rng).cloned()
    }

    fn common(&self) -> bool {
        matches!(self.language, LanguageTag::Elcd | LanguageTag::Pacd | LanguageTag::Rcd)
    }

    fn resolution(&self) -> bool {
        matches!(self.language, LanguageTag::Rd | LanguageTag::Rcd)
    }

    fn announcement(&self) -> bool {
        self.language == LanguageTag::Pacd
    }

    /// A formula with at most `depth` nested operators, so its
    /// [`Formula::depth`] is at most `depth + 1`.
    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.random_bool(0.25) {
            return self.leaf();
        }
        let mut ops = vec![0, 1, 2, 3];
        if self.common() {
            ops.push(4);
        }
        if self.resolution() {
            ops.extend([5, 5]);
        }
        if self.announcement() {
            ops.push(6);
        }
        let d = depth - 1;
        match *ops.choose(&mut self.rng).unwrap() {
            0 => Formula::not(self.formula(d)),
            1 => {
                let a = self.formula(d);
                Formula::and(a, self.formula(d))
            }
            2 => {
                let i = self.agent();
                Formula::knows(i, self.formula(d))
            }
            3 => {
                let g = self.group();
                Formula::distributed(g, self.formula(d))
            }
            4 => {
                let g = self.group();
                Formula::common(g, self.formula(d))
            }
            5 => {
                let g = self.group();
                Formula::resolved(g, self.formula(d))
            }
            _ => {
                let a = self.formula(d);
                Formula::announce(a, self.formula(d))
            }
        }
    }

    fn leaf(&mut self) -> Formula {
        match self.rng.random_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => self.atom(),
        }
    }

    /// A random propositional tautology in the letters `parts`, built by
    /// drawing skeletons until a truth-table check succeeds, with a fixed
    /// fallback shape.
    pub fn tautology(&mut self, parts: &[Formula]) -> Formula {
        for _ in 0..64 {
            let skeleton = self.skeleton(parts.len(), 3);
            if is_tautology(&skeleton, parts.len()) {
                return substitute(&skeleton, parts);
            }
        }
        let a = parts[0].clone();
        Formula::or(a.clone(), Formula::not(a))
    }

    fn skeleton(&mut self, letters: usize, depth: usize) -> Skeleton {
        if depth == 0 || self.rng.random_bool(0.2) {
            return Skeleton::Letter(self.rng.random_range(0..letters));
        }
        match self.rng.random_range(0..4) {
            0 => Skeleton::Not(Box::new(self.skeleton(letters, depth - 1))),
            1 => Skeleton::And(
                Box::new(self.skeleton(letters, depth - 1)),
                Box::new(self.skeleton(letters, depth - 1)),
            ),
            2 => Skeleton::Or(
                Box::new(self.skeleton(letters, depth - 1)),
                Box::new(self.skeleton(letters, depth - 1)),
            ),
            _ => Skeleton::Implies(
                Box::new(self.skeleton(letters, depth - 1)),
                Box::new(self.skeleton(letters, depth - 1)),
            ),
        }
    }
}

#[derive(Clone, Debug)]
enum Skeleton {
    Letter(usize),
    Not(Box<Skeleton>),
    And(Box<Skeleton>, Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
    Implies(Box<Skeleton>, Box<Skeleton>),
}

fn truth(s: &Skeleton, row: u32) -> bool {
    match s {
        Skeleton::Letter(i) => row & (1 << i) != 0,
        Skeleton::Not(a) => !truth(a, row),
        Skeleton::And(a, b) => truth(a, row) && truth(b, row),
        Skeleton::Or(a, b) => truth(a, row) || truth(b, row),
        Skeleton::Implies(a, b) => !truth(a, row) || truth(b, row),
    }
}

fn is_tautology(s: &Skeleton, letters: usize) -> bool {
    (0..1u32 << letters).all(|row| truth(s, row))
}

fn substitute(s: &Skeleton, parts: &[Formula]) -> Formula {
    match s {
        Skeleton::Letter(i) => parts[*i].clone(),
        Skeleton::Not(a) => Formula::not(substitute(a, parts)),
        Skeleton::And(a, b) => Formula::and(substitute(a, parts), substitute(b, parts)),
        Skeleton::Or(a, b) => Formula::or(substitute(a, parts), substitute(b, parts)),
        Skeleton::Implies(a, b) => Formula::implies(substitute(a, parts), substitute(b, parts)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(seed: u64, lang: LanguageTag) -> FormulaGenerator {
        FormulaGenerator::new(seed, 0, &["1".into(), "2".into()], &["p".into(), "q".into()], lang)
    }

    #[test]
    fn deterministic() {
        let a: Vec<Formula> = (0..20).map({
            let mut g = gen(7, LanguageTag::Rcd);
            move |_| g.formula(3)
        }).collect();
        let b: Vec<Formula> = (0..20).map({
            let mut g = gen(7, LanguageTag::Rcd);
            move |_| g.formula(3)
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn respects_language_and_depth() {
        let mut g = gen(1, LanguageTag::Rd);
        for _ in 0..300 {
            let f = g.formula(3);
            assert!(f.depth() <= 4);
            assert!(f.language().unwrap().is_within(LanguageTag::Rd), "{f}");
        }
        let mut g = gen(1, LanguageTag::Eld);
        for _ in 0..300 {
            assert_eq!(g.formula(2).language(), Some(LanguageTag::Eld));
        }
    }

    #[test]
    fn tautologies_are_tautologies() {
        let mut g = gen(3, LanguageTag::Eld);
        let parts = [Formula::atom("p"), Formula::atom("q")];
        for _ in 0..50 {
            let t = g.tautology(&parts);
            // check by brute force over both atoms
            for row in 0..4u32 {
                let val = |name: &str| if name == "p" { row & 1 != 0 } else { row & 2 != 0 };
                fn eval(f: &Formula, val: &dyn Fn(&str) -> bool) -> bool {
                    match f {
                        Formula::Top => true,
                        Formula::Bottom => false,
                        Formula::Atom(a) => val(a),
                        Formula::Not(a) => !eval(a, val),
                        Formula::And(a, b) => eval(a, val) && eval(b, val),
                        _ => unreachable!(),
                    }
                }
                assert!(eval(&t, &val), "{t}");
            }
        }
    }
}
