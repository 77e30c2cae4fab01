use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use resdk::bisim::{bisimilar_pre, trans_bisimilar, NamedPair, Relation};
use resdk::checker::{extension_of, Structure};
use resdk::kripke::{Model, ModelFile, PreModel};
use resdk::search::{
    check_schema, check_schemata, find_countermodel, find_model, Schema, SchemaEntry, SearchBounds, System,
};
use resdk::syntax::{closure, delta, parse, parse_open, reduce, Agent, Formula, Group};

/// Model checking, reduction and bounded search for epistemic logic with
/// resolution, distributed and common knowledge.
#[derive(Parser, Debug)]
#[command(name = "resdk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a model file.
    ///
    /// With --state, prints `true` or `false`. Without it, prints the states
    /// where the formula holds and succeeds only if that is all of them.
    /// Files with group relations are read as pre-models.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Resolve a group in a model file and write the result.
    Resolve {
        #[arg(long)]
        model: PathBuf,
        /// Comma-joined agents, e.g. `1,2`.
        #[arg(long)]
        group: String,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Push resolution operators inward.
    Reduce {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// The group whose distributed knowledge a knowledge operator uses
    /// after a sequence of resolutions.
    Delta {
        /// An agent or a comma-joined group.
        #[arg(long)]
        target: String,
        /// Semicolon-separated groups, outermost first, e.g. `1,2;1,3`.
        #[arg(long, default_value = "")]
        sequence: String,
        #[arg(long)]
        json: bool,
    },
    /// The closure set of a formula, one member per line.
    Closure {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide bisimilarity of two pointed structures.
    ///
    /// By default both files are read as pre-models. With --trans the left
    /// file must be a model and trans-bisimilarity is decided.
    Bisim {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        left_state: String,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        right_state: String,
        #[arg(long)]
        trans: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search small models for a satisfying (or falsifying) point.
    Search {
        #[arg(long)]
        formula: String,
        /// Look for a point where the formula fails.
        #[arg(long)]
        countermodel: bool,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Write the witness model here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Test the soundness of axiom schemata and rules on small models.
    Axioms {
        #[arg(long, value_enum, default_value = "rcd")]
        system: SystemArg,
        /// Check only these schemata (by printed name) instead of the system.
        #[arg(long = "schema")]
        schemata: Vec<String>,
        /// Check the deliberately broken schemata; succeeds when each is caught.
        #[arg(long, conflicts_with = "schemata")]
        mutants: bool,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args, Debug)]
struct BoundArgs {
    #[arg(long, default_value_t = 4)]
    max_states: usize,
    /// Comma-joined agents.
    #[arg(long, default_value = "1,2")]
    agents: String,
    /// Comma-joined atoms. Defaults to the formula's atoms, or `p`.
    #[arg(long)]
    atoms: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Rd,
    Rcd,
}

impl BoundArgs {
    fn bounds(&self) -> Result<SearchBounds> {
        let mut b = SearchBounds::default()
            .with_states(self.max_states)
            .with_agents(split(&self.agents, ',').context("--agents")?);
        if let Some(atoms) = &self.atoms {
            b = b.with_atoms(split(atoms, ',').context("--atoms")?);
        }
        Ok(b)
    }
}

fn split(text: &str, sep: char) -> Result<Vec<&str>> {
    let parts: Vec<&str> = text.split(sep).map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        bail!("empty entry in `{text}`");
    }
    Ok(parts)
}

fn group(text: &str) -> Result<Group> {
    Group::new(split(text, ',')?.into_iter().map(Agent::new)).map_err(|_| anyhow!("empty group"))
}

fn formula(text: &str, agents: Option<&BTreeSet<Agent>>) -> Result<Formula> {
    let parsed = match agents {
        Some(a) => parse(text, a),
        None => parse_open(text),
    };
    parsed.with_context(|| format!("--formula `{text}`"))
}

enum Loaded {
    Model(Model),
    Pre(PreModel),
}

fn load(path: &Path) -> Result<Loaded> {
    let file = ModelFile::read(path)?;
    let context = path.display().to_string();
    Ok(if file.is_premodel() {
        Loaded::Pre(file.to_premodel(&context)?)
    } else {
        Loaded::Model(file.to_model(&context)?)
    })
}

fn load_pre(path: &Path) -> Result<PreModel> {
    let file = ModelFile::read(path)?;
    Ok(file.to_premodel(&path.display().to_string())?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).with_context(|| path.display().to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extension: Option<Vec<String>>,
}

fn check_on<S: Structure>(s: &S, state: Option<&str>, f: &Formula, json: bool) -> Result<bool> {
    let ext = extension_of(s, f)?;
    let names = s.base().states();
    let (ok, report) = match state {
        Some(name) => {
            let i = s
                .base()
                .state_index(name)
                .ok_or_else(|| anyhow!("--state: unknown state `{name}`"))?;
            (
                ext[i],
                CheckJson {
                    formula: f.to_string(),
                    state: Some(name),
                    value: Some(ext[i]),
                    extension: None,
                },
            )
        }
        None => {
            let holding: Vec<String> = names.iter().zip(&ext).filter(|(_, &b)| b).map(|(n, _)| n.clone()).collect();
            (
                holding.len() == names.len(),
                CheckJson {
                    formula: f.to_string(),
                    state: None,
                    value: None,
                    extension: Some(holding),
                },
            )
        }
    };
    if json {
        print_json(&report)?;
    } else if let Some(v) = report.value {
        println!("{v}");
    } else {
        println!("{}", report.extension.unwrap_or_default().join(","));
    }
    Ok(ok)
}

#[derive(Serialize)]
struct BisimJson {
    bisimilar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    relation: Option<Vec<NamedPair>>,
}

fn report_bisim(rel: Option<Relation>, left: &Model, right: &Model, json: bool) -> Result<bool> {
    let named = rel.map(|r| r.named(left, right));
    if json {
        print_json(&BisimJson {
            bisimilar: named.is_some(),
            relation: named.clone(),
        })?;
    } else {
        match &named {
            Some(pairs) => {
                println!("bisimilar");
                for NamedPair(a, b) in pairs {
                    println!("{a} {b}");
                }
            }
            None => println!("not bisimilar"),
        }
    }
    Ok(named.is_some())
}

fn render_entries(entries: &[SchemaEntry]) -> String {
    entries
        .iter()
        .map(|e| {
            let verdict = match e.violations.first() {
                None => "ok".to_owned(),
                Some(v) => format!(
                    "{} violations, first at {} of a {}-state model",
                    e.violations.len(),
                    v.state,
                    v.model.states.len()
                ),
            };
            format!("{:<32} {:>4} instances  {verdict}", e.schema, e.instances)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Runs one command; `Ok(false)` means a negative answer.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { model, state, formula: text, json } => match load(&model)? {
            Loaded::Model(m) => check_on(&m, state.as_deref(), &formula(&text, Some(&m.agent_set()))?, json),
            Loaded::Pre(p) => check_on(&p, state.as_deref(), &formula(&text, Some(&p.base().agent_set()))?, json),
        },
        Command::Resolve { model, group: g, out } => {
            let file = match load(&model)? {
                Loaded::Model(m) => ModelFile::from_model(&m.resolve(&group(&g).context("--group")?)?),
                Loaded::Pre(p) => ModelFile::from_premodel(&p.resolve(&group(&g).context("--group")?)?),
            };
            write_or_print(out.as_deref(), &file.to_json())?;
            Ok(true)
        }
        Command::Reduce { formula: text, json } => {
            let f = formula(&text, None)?;
            let r = reduce(&f);
            if json {
                #[derive(Serialize)]
                struct ReduceJson {
                    input: String,
                    reduced: String,
                    resolution_free: bool,
                }
                print_json(&ReduceJson {
                    input: f.to_string(),
                    reduced: r.to_string(),
                    resolution_free: !r.has_resolution(),
                })?;
            } else {
                println!("{r}");
            }
            Ok(true)
        }
        Command::Delta { target, sequence, json } => {
            let core = group(&target).context("--target")?;
            let seq = if sequence.trim().is_empty() {
                Vec::new()
            } else {
                split(&sequence, ';')
                    .and_then(|parts| parts.into_iter().map(group).collect::<Result<Vec<_>>>())
                    .context("--sequence")?
            };
            let d = delta(&core, &seq);
            if json {
                print_json(&d.iter().map(Agent::name).collect::<Vec<_>>())?;
            } else {
                println!("{}", d.key());
            }
            Ok(true)
        }
        Command::Closure { formula: text, json } => {
            let set = closure(&formula(&text, None)?)?;
            let lines: Vec<String> = set.iter().map(ToString::to_string).collect();
            if json {
                print_json(&lines)?;
            } else {
                let mut out = std::io::stdout().lock();
                for l in lines {
                    if let Err(e) = writeln!(out, "{l}") {
                        if e.kind() == std::io::ErrorKind::BrokenPipe {
                            break;
                        }
                        return Err(e.into());
                    }
                }
            }
            Ok(true)
        }
        Command::Bisim { left, left_state, right, right_state, trans, json } => {
            let n = load_pre(&right)?;
            if trans {
                let m = match load(&left)? {
                    Loaded::Model(m) => m,
                    Loaded::Pre(_) => bail!("{}: --trans needs a model without group relations", left.display()),
                };
                let rel = trans_bisimilar(&m, &left_state, &n, &right_state)?;
                report_bisim(rel, &m, n.base(), json)
            } else {
                let p = load_pre(&left)?;
                let rel = bisimilar_pre(&p, &left_state, &n, &right_state)?;
                report_bisim(rel, p.base(), n.base(), json)
            }
        }
        Command::Search { formula: text, countermodel, bounds, out, json } => {
            let f = formula(&text, None)?;
            let b = bounds.bounds()?;
            let outcome = if countermodel { find_countermodel(&f, &b)? } else { find_model(&f, &b)? };
            let report = outcome.to_json();
            if json {
                print_json(&report)?;
            } else if let Some(w) = outcome.witness() {
                println!(
                    "witness: state {} of a {}-state model ({} models examined)",
                    w.state_name(),
                    w.structure.state_count(),
                    outcome.models_examined
                );
                write_or_print(out.as_deref(), &ModelFile::from_model(&w.structure).to_json())?;
            } else {
                println!(
                    "none up to {} states ({} models examined)",
                    b.max_states, outcome.models_examined
                );
            }
            Ok(outcome.is_witness())
        }
        Command::Axioms { system, schemata, mutants, bounds, instances, seed, json } => {
            let b = bounds.bounds()?.with_instances(instances).with_seed(seed);
            if mutants || !schemata.is_empty() {
                let chosen = if mutants {
                    Schema::MUTANTS.to_vec()
                } else {
                    schemata
                        .iter()
                        .map(|n| Schema::from_name(n).ok_or_else(|| anyhow!("--schema: unknown schema `{n}`")))
                        .collect::<Result<Vec<_>>>()?
                };
                let entries = check_schemata(&chosen, &b)?;
                let ok = if mutants {
                    entries.iter().all(|e| !e.violations.is_empty())
                } else {
                    entries.iter().all(|e| e.violations.is_empty())
                };
                if json {
                    print_json(&entries)?;
                } else {
                    println!("{}", render_entries(&entries));
                }
                return Ok(ok);
            }
            let system = match system {
                SystemArg::Rd => System::Rd,
                SystemArg::Rcd => System::Rcd,
            };
            let report = check_schema(system, &b)?;
            if json {
                print_json(&report)?;
            } else {
                print!("{}", report.render());
            }
            Ok(report.is_clean())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
