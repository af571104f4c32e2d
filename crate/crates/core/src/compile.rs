//! Source text to checked program: tokenize, parse, analyze.

use std::fmt;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::frontend::{Category, FrontendError, Pos, ProgramAst};
use crate::langdef::Dialect;
use crate::semantics::{analyze_with_categories, StaticState};

#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub ast: ProgramAst,
    pub state: StaticState,
    /// Warning-severity diagnostics only.
    pub warnings: Vec<Diagnostic>,
}

/// Compilation failed; `diagnostics` holds every diagnostic collected,
/// errors and warnings, sorted by position.
#[derive(Debug, Clone)]
pub struct CompileError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let errors: Vec<String> = self
            .diagnostics
            .iter()
            .filter(|d| d.is_error())
            .map(|d| format!("{}: {}", d.pos, d.message))
            .collect();
        f.write_str(&errors.join("; "))
    }
}

impl std::error::Error for CompileError {}

impl From<FrontendError> for CompileError {
    fn from(e: FrontendError) -> Self {
        CompileError {
            diagnostics: vec![Diagnostic::error(
                e.code(),
                e.position().unwrap_or(Pos::new(1, 1)),
                e.message(),
            )],
        }
    }
}

pub fn compile(source: &str, dialect: Dialect) -> Result<CompiledProgram, CompileError> {
    compile_for_categories(source, dialect, &[])
}

/// Like [`compile`], also warning about categorized variables that lack a
/// value for one of `categories`.
pub fn compile_for_categories(
    source: &str,
    dialect: Dialect,
    categories: &[Category],
) -> Result<CompiledProgram, CompileError> {
    let ast = dialect.parse(source)?;
    let (state, diagnostics) = analyze_with_categories(&ast, categories);
    if has_errors(&diagnostics) {
        return Err(CompileError { diagnostics });
    }
    Ok(CompiledProgram {
        ast,
        state,
        warnings: diagnostics,
    })
}
