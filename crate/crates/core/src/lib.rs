//! EasyTime / EasyTime++: a composable race-timing DSL.
//!
//! * [`langdef`]: language definitions and their composition.
//! * [`frontend`]: grammar-driven tokenizer and parser.
//! * [`semantics`]: meaning of declarations and static checks.
//! * [`runtime`]: the abstract machine applying crossing events.
//! * [`agents_io`]: rosters, event logs, the TCP listener, result files.

pub mod agents_io;
pub mod compile;
pub mod diagnostic;
pub mod frontend;
pub mod langdef;
pub mod runtime;
pub mod semantics;

pub use compile::{compile, compile_for_categories, CompileError, CompiledProgram};
pub use diagnostic::{Diagnostic, Severity};
pub use langdef::Dialect;
