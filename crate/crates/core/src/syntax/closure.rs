use std::collections::BTreeSet;

use super::{delta, Formula, Group};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("closure is defined for formulas without announcements, got `{0}`")]
pub struct ClosureError(pub Formula);

/// The finite closure set used as the filtration universe of a formula.
///
/// Least set containing `f` that is closed under subformulas, single
/// negation of non-negations, `K_i ψ ⇔ D_{i} ψ`, `C_G ψ ⇒ K_i C_G ψ` for
/// `i ∈ G`, and the reduction consequences of formulas behind a
/// resolution prefix.
pub fn closure(f: &Formula) -> Result<BTreeSet<Formula>, ClosureError> {
    if f.has_announcement() {
        return Err(ClosureError(f.clone()));
    }
    let mut set = BTreeSet::new();
    let mut work = vec![f.clone()];
    while let Some(cur) = work.pop() {
        if set.contains(&cur) {
            continue;
        }
        work.extend(consequences(&cur));
        set.insert(cur);
    }
    Ok(set)
}

/// Formulas a single member forces into the closure.
fn consequences(f: &Formula) -> Vec<Formula> {
    let mut out: Vec<Formula> = f.children().into_iter().cloned().collect();
    if !matches!(f, Formula::Not(_)) {
        out.push(Formula::not(f.clone()));
    }
    match f {
        Formula::Knows(i, a) => {
            out.push(Formula::distributed(Group::singleton(i.clone()), (**a).clone()));
        }
        Formula::Distributed(g, a) if g.is_singleton() => {
            let i = g.iter().next().expect("singleton").clone();
            out.push(Formula::knows(i, (**a).clone()));
        }
        Formula::Common(g, _) => {
            out.extend(g.iter().map(|i| Formula::knows(i.clone(), f.clone())));
        }
        _ => {}
    }

    let (prefix, inner) = f.resolution_prefix();
    if prefix.is_empty() {
        return out;
    }
    let prefix: Vec<Group> = prefix.into_iter().cloned().collect();
    let behind = |body: &Formula| Formula::resolved_chain(&prefix, body.clone());
    match inner {
        Formula::Not(a) => out.push(behind(a)),
        Formula::And(a, b) => {
            out.push(behind(a));
            out.push(behind(b));
        }
        Formula::Knows(i, a) => {
            out.push(Formula::distributed(
                delta(&Group::singleton(i.clone()), &prefix),
                behind(a),
            ));
        }
        Formula::Distributed(h, a) => {
            out.push(Formula::distributed(delta(h, &prefix), behind(a)));
        }
        Formula::Common(h, a) => {
            out.push(Formula::distributed(delta(h, &prefix), f.clone()));
            out.extend(
                h.iter()
                    .map(|i| Formula::distributed(delta(&Group::singleton(i.clone()), &prefix), f.clone())),
            );
            out.push(behind(a));
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_open;

    fn set(texts: &[&str]) -> BTreeSet<Formula> {
        texts.iter().map(|t| parse_open(t).unwrap()).collect()
    }

    #[test]
    fn closure_of_atom() {
        assert_eq!(closure(&parse_open("p").unwrap()).unwrap(), set(&["p", "~p"]));
    }

    #[test]
    fn closure_of_knowledge() {
        assert_eq!(
            closure(&parse_open("K1 p").unwrap()).unwrap(),
            set(&["K1 p", "~K1 p", "D{1} p", "~D{1} p", "p", "~p"])
        );
    }

    #[test]
    fn closure_of_resolved_atom() {
        assert_eq!(
            closure(&parse_open("R{1,2} p").unwrap()).unwrap(),
            set(&["R{1,2} p", "~R{1,2} p", "p", "~p"])
        );
    }

    #[test]
    fn closure_rejects_announcements() {
        assert!(closure(&parse_open("[p] q").unwrap()).is_err());
    }

    #[test]
    fn closure_of_resolved_common() {
        let f = parse_open("R{1,2} C{2,3} p").unwrap();
        let cl = closure(&f).unwrap();
        for expected in [
            "D{1,2,3} R{1,2} C{2,3} p",
            "D{1,2} R{1,2} C{2,3} p",
            "D{3} R{1,2} C{2,3} p",
            "K3 R{1,2} C{2,3} p",
            "R{1,2} p",
            "K2 C{2,3} p",
        ] {
            assert!(cl.contains(&parse_open(expected).unwrap()), "missing {expected}");
        }
    }
}
