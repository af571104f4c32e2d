//! Grammar-driven parsing.
//!
//! The engine walks a [`LanguageDef`]'s productions directly. Alternatives
//! for a nonterminal are tried in declaration order and the first one that
//! matches is committed (ordered choice), so lists are written
//! right-recursively with the longer alternative first. The result is a
//! concrete parse tree whose nodes carry their production's action key.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::lexer::{Lexer, Token};
use crate::langdef::{LanguageDef, Production, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseChild {
    Node(ParseNode),
    Token(Token),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNode {
    pub lhs: String,
    pub action_key: String,
    pub line: u32,
    pub column: u32,
    pub children: Vec<ParseChild>,
}

/// The first syntax error, at the farthest position any alternative reached.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub line: u32,
    pub column: u32,
    /// Offending token, or `None` at end of input.
    pub found: Option<Token>,
    pub expected: BTreeSet<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.found {
            Some(tok) => write!(f, "unexpected {tok}")?,
            None => f.write_str("unexpected end of input")?,
        }
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        match expected.as_slice() {
            [] => Ok(()),
            [one] => write!(f, ", expected {one}"),
            many => write!(f, ", expected one of {}", many.join(", ")),
        }
    }
}

const END_OF_INPUT: &str = "end of input";

/// Productions indexed by lhs, plus the token kind of every literal.
///
/// Alternatives keep their order within a rule group. An lhs whose
/// productions span several groups sees them in group-name order.
pub struct Grammar<'a> {
    lang: &'a LanguageDef,
    by_lhs: HashMap<&'a str, Vec<&'a Production>>,
    literal_kinds: HashMap<&'a str, String>,
}

impl<'a> Grammar<'a> {
    pub fn new(lang: &'a LanguageDef, lexer: &Lexer) -> Self {
        let mut by_lhs: HashMap<&str, Vec<&Production>> = HashMap::new();
        let mut literal_kinds = HashMap::new();
        for p in lang.productions() {
            by_lhs.entry(p.lhs.as_str()).or_default().push(p);
            for sym in &p.rhs {
                if let Symbol::Literal(l) = sym {
                    if let Some(kind) = lexer.classify(l) {
                        literal_kinds.insert(l.as_str(), kind.to_string());
                    }
                }
            }
        }
        Grammar {
            lang,
            by_lhs,
            literal_kinds,
        }
    }

    /// Parses the significant tokens of `tokens` from the start symbol.
    pub fn parse(&self, tokens: &[Token]) -> Result<ParseNode, SyntaxError> {
        let significant: Vec<&Token> = tokens.iter().filter(|t| !t.skip).collect();
        let end = tokens.last().map_or((1, 1), Token::end_position);
        let mut run = Run {
            grammar: self,
            tokens: &significant,
            end,
            farthest: 0,
            expected: BTreeSet::new(),
            active: HashSet::new(),
        };
        let parsed = run.nonterminal(&self.lang.start_symbol, 0);
        match parsed {
            Some((node, pos)) if pos == significant.len() => Ok(node),
            Some((_, pos)) => {
                run.fail(pos, END_OF_INPUT.to_string());
                Err(run.error())
            }
            None => Err(run.error()),
        }
    }
}

struct Run<'g, 't> {
    grammar: &'g Grammar<'g>,
    tokens: &'t [&'t Token],
    end: (u32, u32),
    farthest: usize,
    expected: BTreeSet<String>,
    // (nonterminal, position) pairs currently being expanded; re-entering
    // one means left recursion, which is treated as a failed alternative.
    active: HashSet<(&'g str, usize)>,
}

impl<'g, 't> Run<'g, 't> {
    fn fail(&mut self, pos: usize, expected: String) {
        if pos > self.farthest {
            self.farthest = pos;
            self.expected.clear();
        }
        if pos == self.farthest {
            self.expected.insert(expected);
        }
    }

    fn position(&self, pos: usize) -> (u32, u32) {
        self.tokens
            .get(pos)
            .map_or(self.end, |t| (t.line, t.column))
    }

    fn error(&self) -> SyntaxError {
        let (line, column) = self.position(self.farthest);
        SyntaxError {
            line,
            column,
            found: self.tokens.get(self.farthest).map(|t| (*t).clone()),
            expected: self.expected.clone(),
        }
    }

    fn nonterminal(&mut self, name: &'g str, pos: usize) -> Option<(ParseNode, usize)> {
        let grammar = self.grammar;
        let alternatives = grammar.by_lhs.get(name)?;
        if !self.active.insert((name, pos)) {
            return None;
        }
        let mut result = None;
        for prod in alternatives {
            if let Some((children, next)) = self.sequence(&prod.rhs, pos) {
                let (line, column) = self.position(pos);
                result = Some((
                    ParseNode {
                        lhs: prod.lhs.clone(),
                        action_key: prod.action_key.clone(),
                        line,
                        column,
                        children,
                    },
                    next,
                ));
                break;
            }
        }
        self.active.remove(&(name, pos));
        result
    }

    fn sequence(&mut self, rhs: &'g [Symbol], mut pos: usize) -> Option<(Vec<ParseChild>, usize)> {
        let mut children = Vec::with_capacity(rhs.len());
        for sym in rhs {
            match sym {
                Symbol::NonTerminal(n) => {
                    let (node, next) = self.nonterminal(n, pos)?;
                    children.push(ParseChild::Node(node));
                    pos = next;
                }
                Symbol::Token(kind) => match self.tokens.get(pos) {
                    Some(tok) if &tok.kind == kind => {
                        children.push(ParseChild::Token((*tok).clone()));
                        pos += 1;
                    }
                    _ => {
                        self.fail(pos, kind.clone());
                        return None;
                    }
                },
                Symbol::Literal(text) => {
                    let kind = self.grammar.literal_kinds.get(text.as_str());
                    match self.tokens.get(pos) {
                        Some(tok) if &tok.text == text && Some(&tok.kind) == kind => {
                            children.push(ParseChild::Token((*tok).clone()));
                            pos += 1;
                        }
                        _ => {
                            self.fail(pos, format!("'{text}'"));
                            return None;
                        }
                    }
                }
            }
        }
        Some((children, pos))
    }
}
