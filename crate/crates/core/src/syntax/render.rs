use std::fmt;

use super::Formula;

// Conjunction is the only binary node; prefix operators take a parenthesized
// operand when that operand is a conjunction. The output parses back to the
// same tree.

fn write_operand(f: &mut fmt::Formatter<'_>, sep: &str, op: &Formula) -> fmt::Result {
    if let Formula::And(..) = op {
        write!(f, "({op})")
    } else {
        write!(f, "{sep}{op}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bottom => f.write_str("false"),
            Formula::Atom(p) => f.write_str(p),
            Formula::Not(a) => {
                f.write_str("~")?;
                write_operand(f, "", a)
            }
            Formula::And(a, b) => {
                write!(f, "{a} & ")?;
                if let Formula::And(..) = **b {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::Knows(i, a) => {
                write!(f, "K{i}")?;
                write_operand(f, " ", a)
            }
            Formula::Distributed(g, a) => {
                write!(f, "D{g}")?;
                write_operand(f, " ", a)
            }
            Formula::Common(g, a) => {
                write!(f, "C{g}")?;
                write_operand(f, " ", a)
            }
            Formula::Resolved(g, a) => {
                write!(f, "R{g}")?;
                write_operand(f, " ", a)
            }
            Formula::Announce(ann, body) => {
                write!(f, "[{ann}]")?;
                write_operand(f, " ", body)
            }
        }
    }
}
