use serde::Serialize;

use super::{SearchBounds, SearchError};
use crate::checker::{Compiled, Pointed};
use crate::kripke::{Model, ModelFile};
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Witness(Pointed<Model>),
    /// Nothing found among models with at most this many states. Says
    /// nothing about larger models.
    Exhausted { max_states: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub models_examined: u64,
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Pointed<Model>> {
        match &self.verdict {
            Verdict::Witness(p) => Some(p),
            Verdict::Exhausted { .. } => None,
        }
    }

    pub fn is_witness(&self) -> bool {
        self.witness().is_some()
    }

    pub fn to_json(&self) -> OutcomeJson {
        match &self.verdict {
            Verdict::Witness(p) => OutcomeJson {
                verdict: "witness",
                models_examined: self.models_examined,
                max_states: None,
                state: Some(p.state_name().to_owned()),
                model: Some(ModelFile::from_model(&p.structure)),
            },
            Verdict::Exhausted { max_states } => OutcomeJson {
                verdict: "exhausted",
                models_examined: self.models_examined,
                max_states: Some(*max_states),
                state: None,
                model: None,
            },
        }
    }
}

/// Machine-readable form of a [`SearchOutcome`].
#[derive(Clone, Debug, Serialize)]
pub struct OutcomeJson {
    pub verdict: &'static str,
    pub models_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
}

fn search(f: &Formula, bounds: &SearchBounds, want: bool) -> Result<SearchOutcome, SearchError> {
    let space = bounds.space_for(f)?;
    let compiled = Compiled::new(f, space.agents())?;
    compiled.extension(&space.model_at(0))?;
    let found = space.find_map_first(space.len(), |m| {
        let ext = compiled.extension(m).expect("checked on the first model");
        ext.iter().position(|&b| b == want)
    });
    Ok(match found {
        Some((index, state)) => SearchOutcome {
            verdict: Verdict::Witness(Pointed {
                structure: space.model_at(index),
                state,
            }),
            models_examined: index + 1,
        },
        None => SearchOutcome {
            verdict: Verdict::Exhausted {
                max_states: bounds.max_states,
            },
            models_examined: space.len(),
        },
    })
}

/// The first pointed model, smallest first, where `f` holds.
pub fn find_model(f: &Formula, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    search(f, bounds, true)
}

/// The first pointed model, smallest first, where `f` fails. Running out
/// of models is not a proof of validity.
pub fn find_countermodel(f: &Formula, bounds: &SearchBounds) -> Result<SearchOutcome, SearchError> {
    search(f, bounds, false)
}
