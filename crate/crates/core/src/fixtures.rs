//! Small hand-built models used by tests, examples and the CLI corpus.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::kripke::{Model, Partition};
use crate::syntax::Agent;

fn build(states: &[&str], relations: [&[&[usize]]; 2], p_true: &[usize]) -> Model {
    let n = states.len();
    let states: Arc<[String]> = states.iter().map(|s| s.to_string()).collect();
    let agents: Arc<[Agent]> = [Agent::from("1"), Agent::from("2")].into();
    let relations = relations
        .iter()
        .map(|blocks| {
            let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
            Partition::from_blocks(n, &blocks).expect("fixture partition")
        })
        .collect();
    let p = (0..n).map(|s| p_true.contains(&s)).collect();
    Model::from_parts(states, agents, BTreeMap::from([("p".to_owned(), p)]), relations)
        .expect("fixture model")
}

/// Five states `s,t,u,v,w`, agents `1` and `2`, one atom `p` true at
/// `t`, `v` and `w`.
///
/// Agent 1 confuses `s,t,v,w`; agent 2 confuses `t,u,v`.
pub fn two_agent_example() -> Model {
    build(
        &["s", "t", "u", "v", "w"],
        [&[&[0, 1, 3, 4], &[2]], &[&[1, 2, 3], &[0], &[4]]],
        &[1, 3, 4],
    )
}

/// [`two_agent_example`] after both agents pool their information: each
/// relation is the intersection `{t,v}`, `{s}`, `{u}`, `{w}`.
pub fn two_agent_example_core() -> Model {
    build(
        &["s", "t", "u", "v", "w"],
        [&[&[1, 3], &[0], &[2], &[4]], &[&[1, 3], &[0], &[2], &[4]]],
        &[1, 3, 4],
    )
}

/// Two states, `p` true only at `b`, and neither agent can tell them apart.
/// `p ∧ ¬D{1,2} p` holds at `b`.
pub fn shared_ignorance() -> Model {
    build(&["a", "b"], [&[&[0, 1]], &[&[0, 1]]], &[1])
}
