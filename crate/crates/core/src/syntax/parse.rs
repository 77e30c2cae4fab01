//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! phi := 'true' | 'false' | ATOM | '~' phi | phi '&' phi | phi '|' phi
//!      | phi '->' phi | phi '<->' phi | 'K' AGENT phi
//!      | ('D' | 'C' | 'E' | 'R') '{' AGENT (',' AGENT)* '}' phi
//!      | '[' phi ']' phi | '(' phi ')'
//! ```
//!
//! Prefix operators bind tightest, then `&`, `|`, `->` (right associative)
//! and `<->`. Atoms start with a lowercase letter. The agent of `K` may be
//! written directly after it (`K1 p`) or separated by whitespace.

use std::collections::BTreeSet;

use super::{Agent, Formula, Group};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("undeclared agent `{agent}` at column {column}")]
    UndeclaredAgent { column: usize, agent: String },
    #[error("empty group at column {column}")]
    EmptyGroup { column: usize },
}

impl ParseError {
    /// 1-based column of the offending token.
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::UndeclaredAgent { column, .. }
            | ParseError::EmptyGroup { column } => *column,
        }
    }
}

/// Parses `text`, rejecting agents outside `agents`.
pub fn parse(text: &str, agents: &BTreeSet<Agent>) -> Result<Formula, ParseError> {
    Parser::new(text, Some(agents))?.run()
}

/// Parses `text` accepting any agent name.
pub fn parse_open(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, None)?.run()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokens paired with their 1-based starting column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                (Tok::DoubleArrow, 3)
            }
            c if is_word_char(c) => {
                let end = (i..chars.len())
                    .find(|&j| !is_word_char(chars[j]))
                    .unwrap_or(chars.len());
                (Tok::Word(chars[i..end].iter().collect()), end - i)
            }
            other => {
                return Err(ParseError::Syntax {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, column));
        i += len;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    agents: Option<&'a BTreeSet<Agent>>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, agents: Option<&'a BTreeSet<Agent>>) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            agents,
        })
    }

    fn run(mut self) -> Result<Formula, ParseError> {
        let f = self.iff()?;
        match self.peek() {
            Tok::End => Ok(f),
            other => Err(self.unexpected(other.clone(), "end of input")),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, found: Tok, expected: &str) -> ParseError {
        ParseError::Syntax {
            column: self.column(),
            message: format!("expected {expected}, found {}", found.describe()),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(self.peek().clone(), &tok.describe()))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let column = self.column();
        match self.bump() {
            Tok::Tilde => Ok(Formula::not(self.unary()?)),
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBracket => {
                let ann = self.iff()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::announce(ann, self.unary()?))
            }
            Tok::Word(w) => self.word(w, column),
            other => {
                if other != Tok::End {
                    self.pos -= 1;
                }
                Err(self.unexpected(other, "a formula"))
            }
        }
    }

    fn word(&mut self, w: String, column: usize) -> Result<Formula, ParseError> {
        match w.as_str() {
            "true" => return Ok(Formula::Top),
            "false" => return Ok(Formula::Bottom),
            "K" => {
                let agent_column = self.column();
                let agent = match self.bump() {
                    Tok::Word(a) => a,
                    other => {
                        self.pos -= 1;
                        return Err(self.unexpected(other, "an agent after `K`"));
                    }
                };
                let agent = self.agent(agent, agent_column)?;
                return Ok(Formula::knows(agent, self.unary()?));
            }
            "D" | "C" | "E" | "R" => {
                let group = self.group()?;
                let body = self.unary()?;
                return Ok(match w.as_str() {
                    "D" => Formula::distributed(group, body),
                    "C" => Formula::common(group, body),
                    "E" => Formula::everybody(&group, body),
                    _ => Formula::resolved(group, body),
                });
            }
            _ => {}
        }
        let first = w.chars().next().expect("words are non-empty");
        if let Some(agent) = w.strip_prefix('K') {
            let agent = self.agent(agent.to_owned(), column + 1)?;
            return Ok(Formula::knows(agent, self.unary()?));
        }
        if first.is_ascii_lowercase() {
            return Ok(Formula::Atom(w));
        }
        Err(ParseError::Syntax {
            column,
            message: format!("`{w}` is neither an atom nor an operator"),
        })
    }

    fn agent(&self, name: String, column: usize) -> Result<Agent, ParseError> {
        let agent = Agent::new(name);
        match self.agents {
            Some(declared) if !declared.contains(&agent) => Err(ParseError::UndeclaredAgent {
                column,
                agent: agent.name().to_owned(),
            }),
            _ => Ok(agent),
        }
    }

    fn group(&mut self) -> Result<Group, ParseError> {
        let open = self.column();
        self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        if *self.peek() == Tok::RBrace {
            return Err(ParseError::EmptyGroup { column: open });
        }
        loop {
            let column = self.column();
            match self.bump() {
                Tok::Word(a) => members.push(self.agent(a, column)?),
                other => {
                    self.pos -= 1;
                    return Err(self.unexpected(other, "an agent"));
                }
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::RBrace => break,
                other => {
                    self.pos -= 1;
                    return Err(self.unexpected(other, "`,` or `}`"));
                }
            }
        }
        Ok(Group::new(members).expect("at least one member was read"))
    }
}
