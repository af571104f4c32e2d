use std::fmt;

use regex::Regex;
use thiserror::Error;

use crate::langdef::LexRule;

/// One lexeme. Whitespace and comments are tokens too (`skip == true`), so
/// the concatenated token texts reproduce the source exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: String,
    pub text: String,
    pub line: u32,
    pub column: u32,
    pub skip: bool,
}

impl Token {
    /// Position just past the last character of this token.
    pub fn end_position(&self) -> (u32, u32) {
        advance(self.line, self.column, &self.text)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} `{}`", self.kind, self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{line}:{column}: no lexical rule matches {found:?}")]
    NoMatch { line: u32, column: u32, found: char },
    #[error("lexical rule {rule} has an invalid pattern: {message}")]
    BadPattern { rule: String, message: String },
}

struct CompiledRule {
    name: String,
    regex: Regex,
    priority: u32,
    skip: bool,
}

/// A maximal-munch tokenizer over a lexicon.
pub struct Lexer {
    rules: Vec<CompiledRule>,
}

impl Lexer {
    pub fn new(lexicon: &[LexRule]) -> Result<Self, LexError> {
        let rules = lexicon
            .iter()
            .map(|r| {
                let regex = Regex::new(&format!("^(?:{})", r.pattern)).map_err(|e| {
                    LexError::BadPattern {
                        rule: r.name.clone(),
                        message: e.to_string(),
                    }
                })?;
                Ok(CompiledRule {
                    name: r.name.clone(),
                    regex,
                    priority: r.priority,
                    skip: r.skip,
                })
            })
            .collect::<Result<Vec<_>, LexError>>()?;
        Ok(Lexer { rules })
    }

    // Longest non-empty match at the start of `rest`; ties go to the lowest
    // priority, then to the earliest rule.
    fn best_match(&self, rest: &str) -> Option<(&CompiledRule, usize)> {
        let mut best: Option<(&CompiledRule, usize)> = None;
        for rule in &self.rules {
            let Some(m) = rule.regex.find(rest) else {
                continue;
            };
            let len = m.end();
            if len == 0 {
                continue;
            }
            best = match best {
                Some((b, blen)) if blen > len || (blen == len && b.priority <= rule.priority) => {
                    Some((b, blen))
                }
                _ => Some((rule, len)),
            };
        }
        best
    }

    pub fn tokenize(&self, source: &str) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        let (mut pos, mut line, mut column) = (0usize, 1u32, 1u32);
        while pos < source.len() {
            let rest = &source[pos..];
            let Some((rule, len)) = self.best_match(rest) else {
                return Err(LexError::NoMatch {
                    line,
                    column,
                    found: rest.chars().next().unwrap_or('\0'),
                });
            };
            let text = &rest[..len];
            tokens.push(Token {
                kind: rule.name.clone(),
                text: text.to_string(),
                line,
                column,
                skip: rule.skip,
            });
            (line, column) = advance(line, column, text);
            pos += len;
        }
        Ok(tokens)
    }

    /// The rule name `text` lexes to, if it lexes to exactly one
    /// significant token.
    pub fn classify(&self, text: &str) -> Option<&str> {
        match self.best_match(text) {
            Some((rule, len)) if len == text.len() && !rule.skip => Some(&rule.name),
            _ => None,
        }
    }
}

fn advance(mut line: u32, mut column: u32, text: &str) -> (u32, u32) {
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

/// Tokenizes `source` under `lexicon`.
pub fn tokenize(source: &str, lexicon: &[LexRule]) -> Result<Vec<Token>, LexError> {
    Lexer::new(lexicon)?.tokenize(source)
}
