//! Mini-J: a small Java-like language used to compile, repair and run code
//! snippets in memory.

pub mod frontend;
pub mod runtime;

pub use frontend::{check, CompileResult, DiagCode, Diagnostic, SourceUnit, Type, TypeRegistry};
pub use runtime::{evaluate, run_test, Budget, Fault, RunOutcome, RunStatus, Value};
