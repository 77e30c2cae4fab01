//! Reduction normal form: pushing resolution operators inward.

use super::{Formula, Group};

/// Closed form of the group whose distributed knowledge relation a knowledge
/// operator ends up using after the sequence `R_{G_1} ⋯ R_{G_n}`.
///
/// Starts from `core` and consumes `G_n, …, G_1` once each, innermost first;
/// a group is absorbed whenever it overlaps the accumulator.
pub fn delta(core: &Group, seq: &[Group]) -> Group {
    seq.iter().rev().fold(core.clone(), |acc, g| {
        if g.intersects(&acc) {
            g.union(&acc)
        } else {
            acc
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("push_modal expects a K or D formula, got `{0}`")]
pub struct PushError(pub Formula);

/// One reduction step: `R_{G_1} ⋯ R_{G_n} K_i φ` (or `D_H φ`) becomes
/// `D_δ R_{G_1} ⋯ R_{G_n} φ`.
pub fn push_modal(prefix: &[Group], inner: &Formula) -> Result<Formula, PushError> {
    let (core, body) = match inner {
        Formula::Knows(i, body) => (Group::singleton(i.clone()), body),
        Formula::Distributed(h, body) => (h.clone(), body),
        other => return Err(PushError(other.clone())),
    };
    Ok(Formula::distributed(
        delta(&core, prefix),
        Formula::resolved_chain(prefix, (**body).clone()),
    ))
}

/// Rewrites `f` innermost-first until no reduction principle applies.
///
/// Formulas without common knowledge or announcements come out free of
/// resolution operators. `R_G C_H` blocks with overlapping, non-nested
/// groups have no reduction and are kept.
pub fn reduce(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(reduce(a)),
        Formula::And(a, b) => Formula::and(reduce(a), reduce(b)),
        Formula::Knows(i, a) => Formula::knows(i.clone(), reduce(a)),
        Formula::Distributed(g, a) => Formula::distributed(g.clone(), reduce(a)),
        Formula::Common(g, a) => Formula::common(g.clone(), reduce(a)),
        Formula::Announce(a, b) => Formula::announce(reduce(a), reduce(b)),
        Formula::Resolved(g, a) => push_resolution(g, reduce(a)),
    }
}

/// `R_G body` where `body` is already reduced.
fn push_resolution(g: &Group, body: Formula) -> Formula {
    if g.is_singleton() {
        return body;
    }
    match body {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => body,
        Formula::Not(a) => Formula::not(push_resolution(g, *a)),
        Formula::And(a, b) => Formula::and(push_resolution(g, *a), push_resolution(g, *b)),
        Formula::Knows(i, a) => {
            let pushed = push_resolution(g, *a);
            if g.contains(&i) {
                Formula::distributed(g.clone(), pushed)
            } else {
                Formula::knows(i, pushed)
            }
        }
        Formula::Distributed(h, a) => {
            let target = if g.intersects(&h) { g.union(&h) } else { h };
            Formula::distributed(target, push_resolution(g, *a))
        }
        Formula::Common(h, a) => {
            if !g.intersects(&h) {
                Formula::common(h, push_resolution(g, *a))
            } else if h.is_subset(g) {
                Formula::distributed(g.clone(), push_resolution(g, *a))
            } else {
                Formula::resolved(g.clone(), Formula::common(h, *a))
            }
        }
        Formula::Resolved(h, a) if h == *g => Formula::Resolved(h, a),
        other => Formula::resolved(g.clone(), other),
    }
}
