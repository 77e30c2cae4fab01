use std::collections::BTreeSet;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{FormulaGenerator, ModelSpace, SearchBounds, SearchError};
use crate::checker::Compiled;
use crate::kripke::{Model, ModelFile};
use crate::syntax::{Formula, Group, LanguageTag};

/// Depth cap for the formulas substituted into schemata.
const INSTANCE_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// Knowledge, distributed knowledge and resolution.
    Rd,
    /// `Rd` plus common knowledge.
    Rcd,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Rd => "RD",
            System::Rcd => "RCD",
        })
    }
}

impl System {
    pub fn language(self) -> LanguageTag {
        match self {
            System::Rd => LanguageTag::Rd,
            System::Rcd => LanguageTag::Rcd,
        }
    }

    pub fn schemata(self) -> Vec<Schema> {
        use Schema::*;
        let mut out = vec![Pc, K, T, Four, Five, KD, TD, FiveD, D1, D2];
        if self == System::Rcd {
            out.extend([KC, TC, C1, C2]);
        }
        out.extend([RA, RC, RN, RD1, RD2]);
        out
    }
}

/// Deliberately broken schemata, used to show the checker catches errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// RD1 with the intersection of the groups in place of their union.
    CorruptRd1,
    /// T_D replaced by its converse `φ → D_G φ`.
    DropTd,
    /// C1 replaced by `E_G φ → C_G φ`.
    BreakC1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Schema {
    Pc,
    K,
    T,
    Four,
    Five,
    KD,
    TD,
    FiveD,
    D1,
    D2,
    KC,
    TC,
    C1,
    C2,
    RA,
    RC,
    RN,
    RD1,
    RD2,
    Mutant(Mutation),
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Schema::*;
        f.write_str(match self {
            Pc => "PC",
            K => "K",
            T => "T",
            Four => "4",
            Five => "5",
            KD => "K_D",
            TD => "T_D",
            FiveD => "5_D",
            D1 => "D1",
            D2 => "D2",
            KC => "K_C",
            TC => "T_C",
            C1 => "C1",
            C2 => "C2",
            RA => "RA",
            RC => "RC",
            RN => "RN",
            RD1 => "RD1",
            RD2 => "RD2",
            Mutant(Mutation::CorruptRd1) => "RD1 (intersection mutant)",
            Mutant(Mutation::DropTd) => "T_D (converse mutant)",
            Mutant(Mutation::BreakC1) => "C1 (everybody-to-common mutant)",
        })
    }
}

impl Schema {
    pub const ALL: [Schema; 19] = {
        use Schema::*;
        [Pc, K, T, Four, Five, KD, TD, FiveD, D1, D2, KC, TC, C1, C2, RA, RC, RN, RD1, RD2]
    };

    pub const MUTANTS: [Schema; 3] = [
        Schema::Mutant(Mutation::CorruptRd1),
        Schema::Mutant(Mutation::DropTd),
        Schema::Mutant(Mutation::BreakC1),
    ];

    fn stream(self) -> u64 {
        match self {
            Schema::Mutant(m) => 100 + m as u64,
            s => Schema::ALL.iter().position(|&x| x == s).unwrap() as u64,
        }
    }

    /// Parses the names printed by `Display` for the genuine schemata.
    pub fn from_name(name: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|s| s.to_string() == name)
    }

    /// One random instance respecting the schema's side condition, or
    /// `None` when the agents admit no groups satisfying it.
    pub fn instance(self, g: &mut FormulaGenerator) -> Option<Formula> {
        use Formula as F;
        let phi = g.formula(INSTANCE_DEPTH);
        let psi = g.formula(INSTANCE_DEPTH);
        let i = g.agent();
        let grp = g.group();
        Some(match self {
            Schema::Pc => {
                let chi = g.formula(INSTANCE_DEPTH);
                g.tautology(&[phi, psi, chi])
            }
            Schema::K => F::implies(
                F::knows(i.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(F::knows(i.clone(), phi), F::knows(i, psi)),
            ),
            Schema::T => F::implies(F::knows(i, phi.clone()), phi),
            Schema::Four => F::implies(F::knows(i.clone(), phi.clone()), F::knows(i.clone(), F::knows(i, phi))),
            Schema::Five => {
                let k = F::knows(i.clone(), phi);
                F::implies(F::not(k.clone()), F::knows(i, F::not(k)))
            }
            Schema::KD => F::implies(
                F::distributed(grp.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(F::distributed(grp.clone(), phi), F::distributed(grp, psi)),
            ),
            Schema::TD => F::implies(F::distributed(grp, phi.clone()), phi),
            Schema::FiveD => {
                let d = F::distributed(grp.clone(), phi);
                F::implies(F::not(d.clone()), F::distributed(grp, F::not(d)))
            }
            Schema::D1 => F::iff(
                F::knows(i.clone(), phi.clone()),
                F::distributed(Group::singleton(i), phi),
            ),
            Schema::D2 => {
                let small = g.group_where(|s| s.is_subset(&grp))?;
                F::implies(F::distributed(small, phi.clone()), F::distributed(grp, phi))
            }
            Schema::KC => F::implies(
                F::common(grp.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(F::common(grp.clone(), phi), F::common(grp, psi)),
            ),
            Schema::TC => F::implies(F::common(grp, phi.clone()), phi),
            Schema::C1 => {
                let c = F::common(grp.clone(), phi);
                F::implies(c.clone(), F::everybody(&grp, c))
            }
            Schema::C2 => F::implies(
                F::common(grp.clone(), F::implies(phi.clone(), F::everybody(&grp, phi.clone()))),
                F::implies(phi.clone(), F::common(grp, phi)),
            ),
            Schema::RA => {
                let p = g.atom();
                F::iff(F::resolved(grp, p.clone()), p)
            }
            Schema::RC => F::iff(
                F::resolved(grp.clone(), F::and(phi.clone(), psi.clone())),
                F::and(F::resolved(grp.clone(), phi), F::resolved(grp, psi)),
            ),
            Schema::RN => F::iff(
                F::resolved(grp.clone(), F::not(phi.clone())),
                F::not(F::resolved(grp, phi)),
            ),
            Schema::RD1 => {
                let h = g.group_where(|h| h.intersects(&grp))?;
                F::iff(
                    F::resolved(grp.clone(), F::distributed(h.clone(), phi.clone())),
                    F::distributed(grp.union(&h), F::resolved(grp, phi)),
                )
            }
            Schema::RD2 => {
                let h = g.group_where(|h| !h.intersects(&grp))?;
                F::iff(
                    F::resolved(grp.clone(), F::distributed(h.clone(), phi.clone())),
                    F::distributed(h, F::resolved(grp, phi)),
                )
            }
            Schema::Mutant(Mutation::CorruptRd1) => {
                let h = g.group_where(|h| h.intersects(&grp))?;
                F::iff(
                    F::resolved(grp.clone(), F::distributed(h.clone(), phi.clone())),
                    F::distributed(grp.intersection(&h).expect("overlapping"), F::resolved(grp, phi)),
                )
            }
            Schema::Mutant(Mutation::DropTd) => F::implies(phi.clone(), F::distributed(grp, phi)),
            Schema::Mutant(Mutation::BreakC1) => {
                F::implies(F::everybody(&grp, phi.clone()), F::common(grp, phi))
            }
        })
    }
}

/// A formula that failed, with the pointed model where it fails.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: String,
    pub state: String,
    pub model: ModelFile,
}

impl Counterexample {
    fn new(f: &Formula, m: &Model, state: usize) -> Self {
        Counterexample {
            instance: f.to_string(),
            state: m.states()[state].clone(),
            model: ModelFile::from_model(m),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SchemaEntry {
    pub schema: String,
    /// Distinct instances checked.
    pub instances: usize,
    pub violations: Vec<Counterexample>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RuleEntry {
    pub rule: String,
    pub instances: usize,
    /// Instances whose premises actually held, so that the conclusion had
    /// to be checked.
    pub nonvacuous: usize,
    pub violations: Vec<Counterexample>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SchemaReport {
    pub system: String,
    pub max_states: usize,
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    pub seed: u64,
    pub models: u64,
    pub schemata: Vec<SchemaEntry>,
    pub rules: Vec<RuleEntry>,
}

impl SchemaReport {
    pub fn violation_count(&self) -> usize {
        self.schemata.iter().map(|e| e.violations.len()).sum::<usize>()
            + self.rules.iter().map(|e| e.violations.len()).sum::<usize>()
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }

    /// One line per schema and rule.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} over {} models (≤{} states, agents {}, atoms {}, seed {})\n",
            self.system,
            self.models,
            self.max_states,
            self.agents.join(","),
            self.atoms.join(","),
            self.seed
        );
        for e in &self.schemata {
            out += &format!(
                "  {:<32} {:>4} instances  {}\n",
                e.schema,
                e.instances,
                verdict(e.violations.len())
            );
            for v in e.violations.iter().take(1) {
                out += &format!("      fails at {} for {}\n", v.state, v.instance);
            }
        }
        for e in &self.rules {
            out += &format!(
                "  {:<32} {:>4} instances  {:>4} non-vacuous  {}\n",
                e.rule,
                e.instances,
                e.nonvacuous,
                verdict(e.violations.len())
            );
            for v in e.violations.iter().take(1) {
                out += &format!("      conclusion fails at {} for {}\n", v.state, v.instance);
            }
        }
        out
    }
}

fn verdict(violations: usize) -> String {
    if violations == 0 {
        "ok".to_owned()
    } else {
        format!("{violations} violated")
    }
}

/// The first pointed model in `space` where `f` fails.
fn first_failure(space: &ModelSpace, compiled: &Compiled) -> Option<(u64, usize)> {
    space.find_map_first(space.len(), |m| {
        compiled
            .extension(m)
            .expect("instances only use the space's agents and atoms")
            .iter()
            .position(|&b| !b)
    })
}

fn counterexample(space: &ModelSpace, f: &Formula) -> Result<Option<Counterexample>, SearchError> {
    let compiled = Compiled::new(f, space.agents())?;
    Ok(first_failure(space, &compiled).map(|(idx, state)| Counterexample::new(f, &space.model_at(idx), state)))
}

/// Draws `instances` instances of `schema` and keeps the distinct ones.
fn draw(schema: Schema, language: LanguageTag, space: &ModelSpace, bounds: &SearchBounds) -> Vec<Formula> {
    let mut g = FormulaGenerator::new(bounds.seed, schema.stream(), space.agents(), space.atoms(), language);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..bounds.instances {
        if let Some(f) = schema.instance(&mut g) {
            if seen.insert(f.clone()) {
                out.push(f);
            }
        }
    }
    out
}

fn check_one(
    schema: Schema,
    language: LanguageTag,
    space: &ModelSpace,
    bounds: &SearchBounds,
) -> Result<(SchemaEntry, Vec<Formula>), SearchError> {
    let instances = draw(schema, language, space, bounds);
    let mut violations = Vec::new();
    let mut valid = Vec::new();
    for f in &instances {
        match counterexample(space, f)? {
            Some(c) => violations.push(c),
            None => valid.push(f.clone()),
        }
    }
    Ok((
        SchemaEntry {
            schema: schema.to_string(),
            instances: instances.len(),
            violations,
        },
        valid,
    ))
}

/// Checks the given schemata, each over its own seeded instances, against
/// every model within the bounds.
pub fn check_schemata(schemata: &[Schema], bounds: &SearchBounds) -> Result<Vec<SchemaEntry>, SearchError> {
    let space = bounds.space()?;
    schemata
        .iter()
        .map(|&s| check_one(s, LanguageTag::Rcd, &space, bounds).map(|(e, _)| e))
        .collect()
}

/// Checks every schema of `system`, then its rules as validity
/// preservation on the same class of models. Premises for the rules are
/// drawn from schema instances that survived the check.
pub fn check_schema(system: System, bounds: &SearchBounds) -> Result<SchemaReport, SearchError> {
    let space = bounds.space()?;
    let mut schemata = Vec::new();
    let mut pool = Vec::new();
    for s in system.schemata() {
        let (entry, valid) = check_one(s, system.language(), &space, bounds)?;
        schemata.push(entry);
        pool.extend(valid);
    }
    let mut rules = vec![
        check_mp(&pool, system.language(), &space, bounds)?,
        check_necessitation("N", &pool, &space, bounds, |g, f| Formula::knows(g.agent(), f))?,
    ];
    if system == System::Rcd {
        rules.push(check_necessitation("N_C", &pool, &space, bounds, |g, f| {
            Formula::common(g.group(), f)
        })?);
    }
    rules.push(check_necessitation("N_R", &pool, &space, bounds, |g, f| {
        Formula::resolved(g.group(), f)
    })?);
    if system == System::Rcd {
        rules.push(rrc_entry(&space, bounds)?);
    }
    Ok(SchemaReport {
        system: system.to_string(),
        max_states: space.max_states(),
        agents: space.agents().iter().map(|a| a.name().to_owned()).collect(),
        atoms: space.atoms().to_vec(),
        seed: bounds.seed,
        models: space.len(),
        schemata,
        rules,
    })
}

fn is_valid(space: &ModelSpace, f: &Formula) -> Result<bool, SearchError> {
    let compiled = Compiled::new(f, space.agents())?;
    Ok(first_failure(space, &compiled).is_none())
}

/// From `φ` and `φ → ψ` infer `ψ`. Half the time `ψ` is another valid
/// formula, so the premises hold; otherwise it is random and the instance
/// is usually vacuous.
fn check_mp(pool: &[Formula], language: LanguageTag, space: &ModelSpace, bounds: &SearchBounds) -> Result<RuleEntry, SearchError> {
    let mut g = FormulaGenerator::new(bounds.seed, 200, space.agents(), space.atoms(), language);
    let mut entry = RuleEntry {
        rule: "MP".into(),
        instances: 0,
        nonvacuous: 0,
        violations: Vec::new(),
    };
    if pool.is_empty() {
        return Ok(entry);
    }
    for _ in 0..bounds.instances {
        let phi = pool.choose(g.rng()).unwrap().clone();
        let psi = if g.rng().random_bool(0.5) {
            pool.choose(g.rng()).unwrap().clone()
        } else {
            g.formula(INSTANCE_DEPTH)
        };
        entry.instances += 1;
        if !is_valid(space, &Formula::implies(phi, psi.clone()))? {
            continue;
        }
        entry.nonvacuous += 1;
        if let Some(c) = counterexample(space, &psi)? {
            entry.violations.push(c);
        }
    }
    Ok(entry)
}

/// From valid `φ` infer `wrap(φ)`.
fn check_necessitation(
    name: &str,
    pool: &[Formula],
    space: &ModelSpace,
    bounds: &SearchBounds,
    wrap: impl Fn(&mut FormulaGenerator, Formula) -> Formula,
) -> Result<RuleEntry, SearchError> {
    let mut g = FormulaGenerator::new(bounds.seed, 201, space.agents(), space.atoms(), LanguageTag::Rcd);
    let mut entry = RuleEntry {
        rule: name.into(),
        instances: 0,
        nonvacuous: 0,
        violations: Vec::new(),
    };
    if pool.is_empty() {
        return Ok(entry);
    }
    for _ in 0..bounds.instances {
        let phi = pool.choose(g.rng()).unwrap().clone();
        let conclusion = wrap(&mut g, phi);
        entry.instances += 1;
        entry.nonvacuous += 1;
        if let Some(c) = counterexample(space, &conclusion)? {
            entry.violations.push(c);
        }
    }
    Ok(entry)
}

/// One instance of the resolved common knowledge induction rule:
/// from `φ → (E_H φ ∧ R_{G_1} ⋯ R_{G_n} ψ)` infer `φ → R_{G_1} ⋯ R_{G_n} C_H ψ`.
struct RrcInstance {
    premise: Formula,
    conclusion: Formula,
}

fn rrc_instance(g: &mut FormulaGenerator) -> RrcInstance {
    let h = g.group();
    let n = g.rng().random_range(0..=2);
    let prefix: Vec<Group> = (0..n).map(|_| g.group()).collect();
    let chi = g.formula(INSTANCE_DEPTH);
    let phi = match g.rng().random_range(0..5) {
        0 | 1 => Formula::common(h.clone(), chi.clone()),
        2 => Formula::Top,
        3 => Formula::Bottom,
        _ => g.formula(INSTANCE_DEPTH),
    };
    let psi = if g.rng().random_bool(0.5) {
        chi
    } else {
        g.formula(INSTANCE_DEPTH)
    };
    let premise = Formula::implies(
        phi.clone(),
        Formula::and(
            Formula::everybody(&h, phi.clone()),
            Formula::resolved_chain(&prefix, psi.clone()),
        ),
    );
    let conclusion = Formula::implies(
        phi,
        Formula::resolved_chain(&prefix, Formula::common(h, psi)),
    );
    RrcInstance { premise, conclusion }
}

fn rrc_entry(space: &ModelSpace, bounds: &SearchBounds) -> Result<RuleEntry, SearchError> {
    let mut g = FormulaGenerator::new(bounds.seed, 202, space.agents(), space.atoms(), LanguageTag::Rcd);
    let mut entry = RuleEntry {
        rule: "RR_C (per model)".into(),
        instances: 0,
        nonvacuous: 0,
        violations: Vec::new(),
    };
    for _ in 0..bounds.instances {
        let inst = rrc_instance(&mut g);
        let premise = Compiled::new(&inst.premise, space.agents())?;
        let conclusion = Compiled::new(&inst.conclusion, space.agents())?;
        entry.instances += 1;
        // per model: None when the premise fails somewhere, otherwise the
        // first state where the conclusion fails, if any
        let results: Vec<Option<Option<usize>>> = (0..space.len())
            .into_par_iter()
            .map(|i| {
                let m = space.model_at(i);
                let ok = |c: &Compiled| c.extension(&m).expect("space atoms and agents");
                if ok(&premise).iter().all(|&b| b) {
                    Some(ok(&conclusion).iter().position(|&b| !b))
                } else {
                    None
                }
            })
            .collect();
        entry.nonvacuous += results.iter().filter(|r| r.is_some()).count();
        if let Some((i, state)) = results
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.flatten().map(|s| (i, s)))
        {
            entry
                .violations
                .push(Counterexample::new(&inst.conclusion, &space.model_at(i as u64), state));
        }
    }
    Ok(entry)
}

/// The model-local form of the resolved common knowledge induction rule:
/// whenever a model makes the premise true everywhere, it must make the
/// conclusion true everywhere. Counts every (model, instance) pair whose
/// premise held as non-vacuous.
pub fn check_rule_rrc(bounds: &SearchBounds) -> Result<RuleEntry, SearchError> {
    rrc_entry(&bounds.space()?, bounds)
}
