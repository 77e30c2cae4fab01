//! Epistemic logic with distributed knowledge and resolution.
//!
//! The crate covers formula syntax and rewriting ([`syntax`]), finite
//! models and pre-models ([`kripke`]), model checking ([`checker`]),
//! bisimulations ([`bisim`]) and bounded model search ([`search`]).

pub mod bisim;
pub mod checker;
pub mod fixtures;
pub mod kripke;
pub mod search;
pub mod syntax;

pub use kripke::{as_premodel, Model, ModelFile, Partition, PreModel, PseudoModel};
pub use syntax::{parse, parse_open, Agent, Formula, Group};
