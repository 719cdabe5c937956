//! Mini-J frontend: lexing, error-recovering parsing and semantic analysis.

pub mod analyzer;
pub mod ast;
pub mod diag;
pub mod lexer;
pub mod library;
pub mod parser;
pub mod registry;
pub mod source;
pub mod types;

use serde::{Deserialize, Serialize};

pub use analyzer::analyze;
pub use diag::{DiagCode, Diagnostic, Hint};
pub use parser::{parse, parse_snippet, Mode};
pub use registry::{RegistryEntry, TypeRegistry};
pub use source::{LineSpan, Origin, Position, SourceUnit};
pub use types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileResult {
    pub diagnostics: Vec<Diagnostic>,
    pub error_count: usize,
}

/// Parses and analyzes a compilation unit entirely in memory.
pub fn check(unit: &SourceUnit, registry: &TypeRegistry) -> CompileResult {
    let (cu, mut diagnostics) = parse(unit);
    diagnostics.extend(analyze(&cu, unit, registry));
    diagnostics.sort_by_key(|d| (d.range.start, d.range.end, d.code));
    let error_count = diagnostics.len();
    CompileResult {
        diagnostics,
        error_count,
    }
}

/// Error count only.
pub fn error_count(unit: &SourceUnit, registry: &TypeRegistry) -> usize {
    check(unit, registry).error_count
}
