//! Tokenizing and parsing under a [`LanguageDef`].

mod actions;
mod ast;
mod lexer;
mod parser;

use thiserror::Error;

pub use actions::{Action, ActionArgs, ActionError, ActionRegistry, SemValue};
pub use ast::*;
pub use lexer::{tokenize, LexError, Lexer, Token};
pub use parser::{Grammar, ParseChild, ParseNode, SyntaxError};

use crate::langdef::LanguageDef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

impl FrontendError {
    /// Source position, when the error has one.
    pub fn position(&self) -> Option<Pos> {
        match self {
            FrontendError::Lex(LexError::NoMatch { line, column, .. }) => {
                Some(Pos::new(*line, *column))
            }
            FrontendError::Lex(LexError::BadPattern { .. }) => None,
            FrontendError::Syntax(e) => Some(Pos::new(e.line, e.column)),
            FrontendError::Action(e) => Some(Pos::new(e.line, e.column)),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            FrontendError::Lex(_) => "LexError",
            FrontendError::Syntax(_) => "ParseError",
            FrontendError::Action(_) => "ActionError",
        }
    }

    /// Message without the leading position.
    pub fn message(&self) -> String {
        match self {
            FrontendError::Lex(LexError::NoMatch { found, .. }) => {
                format!("no lexical rule matches {found:?}")
            }
            FrontendError::Lex(e @ LexError::BadPattern { .. }) => e.to_string(),
            FrontendError::Syntax(e) => e.to_string(),
            FrontendError::Action(e) => e.message.clone(),
        }
    }
}

/// Parses `tokens` (produced under `lang`'s lexicon) into a program, using
/// the standard action handlers.
pub fn parse(tokens: &[Token], lang: &LanguageDef) -> Result<ProgramAst, FrontendError> {
    Frontend::new(lang)?.parse_tokens(tokens)
}

/// A language ready to parse many sources.
pub struct Frontend<'a> {
    lexer: Lexer,
    lang: &'a LanguageDef,
    actions: ActionRegistry,
}

impl<'a> Frontend<'a> {
    pub fn new(lang: &'a LanguageDef) -> Result<Self, FrontendError> {
        Self::with_actions(lang, ActionRegistry::standard())
    }

    pub fn with_actions(
        lang: &'a LanguageDef,
        actions: ActionRegistry,
    ) -> Result<Self, FrontendError> {
        Ok(Frontend {
            lexer: Lexer::new(&lang.lexicon)?,
            lang,
            actions,
        })
    }

    pub fn tokenize(&self, source: &str) -> Result<Vec<Token>, FrontendError> {
        Ok(self.lexer.tokenize(source)?)
    }

    pub fn parse_tree(&self, tokens: &[Token]) -> Result<ParseNode, FrontendError> {
        Ok(Grammar::new(self.lang, &self.lexer).parse(tokens)?)
    }

    pub fn parse_tokens(&self, tokens: &[Token]) -> Result<ProgramAst, FrontendError> {
        let tree = self.parse_tree(tokens)?;
        Ok(self.actions.build_program(&tree)?)
    }

    pub fn parse_source(&self, source: &str) -> Result<ProgramAst, FrontendError> {
        self.parse_tokens(&self.tokenize(source)?)
    }
}
