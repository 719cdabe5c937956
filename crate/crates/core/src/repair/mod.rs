//! The correction cascade: integration, targeted fixes, line deletion.
//!
//! Every change is a [`PatchRecord`] over the candidate body (or its import
//! list), so the final body can be replayed from the retrieved text.

mod delete;
mod fix;
mod integrate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use snipfit_minij::frontend::check;
use snipfit_minij::{CompileResult, Diagnostic, TypeRegistry};

use crate::splice::{Context, Spliced};

pub use delete::{delete_lines, exhaustive_minimum, Acceptance, DeletionConfig, Loops, Order, ORACLE_MAX_LINES};
pub use fix::{fix_undeclared_variable, targeted_fix_pass, BRUTE_FORCE_TYPES};
pub use integrate::{extract_imports, snippetize, unwrap_main_in_main};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Retrieved,
    Integrated,
    Fixed,
    Deleted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    ExtractImport,
    StripClass,
    StripFunction,
    UnwrapMain,
    InsertToken,
    AddImport,
    DeclareVar,
    DeleteToken,
    DeleteLine,
}

/// One accepted change: `body[start..end]` (which held `removed`) becomes
/// `payload`, and `import`, when set, joins the import list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchRecord {
    pub kind: PatchKind,
    pub start: usize,
    pub end: usize,
    pub removed: String,
    pub payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub import: Option<String>,
    /// Line index into the body at deletion entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub errors_before: usize,
    pub errors_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("patch {index} expects {expected:?} at {start}..{end}")]
    Mismatch {
        index: usize,
        start: usize,
        end: usize,
        expected: String,
    },
}

/// Reapplies patches to the retrieved text, returning (imports, body).
pub fn replay(original: &str, patches: &[PatchRecord]) -> Result<(Vec<String>, String), ReplayError> {
    let mut body = original.to_string();
    let mut imports: Vec<String> = Vec::new();
    for (index, p) in patches.iter().enumerate() {
        if body.get(p.start..p.end) != Some(p.removed.as_str()) {
            return Err(ReplayError::Mismatch {
                index,
                start: p.start,
                end: p.end,
                expected: p.removed.clone(),
            });
        }
        body.replace_range(p.start..p.end, &p.payload);
        if let Some(i) = &p.import {
            if !imports.contains(i) {
                imports.push(i.clone());
            }
        }
    }
    Ok((imports, body))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub original: String,
    pub body: String,
    pub imports: Vec<String>,
    pub error_count: usize,
    pub diagnostics: Vec<Diagnostic>,
    pub patches: Vec<PatchRecord>,
    pub stage: Stage,
    pub deleted_lines: BTreeSet<usize>,
}

impl Candidate {
    pub fn retrieved(text: impl Into<String>, ev: &Evaluator) -> Self {
        let original: String = text.into();
        let result = ev.compile(&[], &original).1;
        Self {
            body: original.clone(),
            original,
            imports: Vec::new(),
            error_count: result.error_count,
            diagnostics: result.diagnostics,
            patches: Vec::new(),
            stage: Stage::Retrieved,
            deleted_lines: BTreeSet::new(),
        }
    }

    /// A body with no non-blank line.
    pub fn is_degenerate(&self) -> bool {
        self.body.trim().is_empty()
    }

    pub fn compiles(&self) -> bool {
        self.error_count == 0 && !self.is_degenerate()
    }

    /// Recompiles the current state.
    pub fn refresh(&mut self, ev: &Evaluator) {
        let r = ev.compile(&self.imports, &self.body).1;
        self.error_count = r.error_count;
        self.diagnostics = r.diagnostics;
    }

    /// Applies an edit that has already been evaluated and accepted.
    pub(crate) fn commit(&mut self, trial: Trial, kind: PatchKind, line: Option<usize>) {
        let Trial { edit, imports, body, result } = trial;
        self.patches.push(PatchRecord {
            kind,
            start: edit.start,
            end: edit.end,
            removed: edit.removed,
            payload: edit.payload,
            import: edit.import,
            line,
            errors_before: self.error_count,
            errors_after: result.error_count,
        });
        self.imports = imports;
        self.body = body;
        self.error_count = result.error_count;
        self.diagnostics = result.diagnostics;
    }
}

/// A proposed change, not yet committed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edit {
    pub start: usize,
    pub end: usize,
    pub removed: String,
    pub payload: String,
    pub import: Option<String>,
}

impl Edit {
    pub fn replace(body: &str, start: usize, end: usize, payload: impl Into<String>) -> Self {
        Self {
            start,
            end,
            removed: body[start..end].to_string(),
            payload: payload.into(),
            import: None,
        }
    }

    pub fn import(body_len: usize, line: impl Into<String>) -> Self {
        Self {
            start: body_len,
            end: body_len,
            removed: String::new(),
            payload: String::new(),
            import: Some(line.into()),
        }
    }
}

pub(crate) struct Trial {
    pub edit: Edit,
    pub imports: Vec<String>,
    pub body: String,
    pub result: CompileResult,
}

/// Compiles candidates spliced into one context.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub context: &'a Context,
    pub registry: &'a TypeRegistry,
}

impl<'a> Evaluator<'a> {
    pub fn new(context: &'a Context, registry: &'a TypeRegistry) -> Self {
        Self { context, registry }
    }

    pub fn compile(&self, imports: &[String], body: &str) -> (Spliced, CompileResult) {
        let spliced = self.context.splice(imports, body);
        let result = check(&spliced.unit, self.registry);
        (spliced, result)
    }

    pub fn errors(&self, imports: &[String], body: &str) -> usize {
        self.compile(imports, body).1.error_count
    }

    pub(crate) fn trial(&self, c: &Candidate, edit: Edit) -> Trial {
        let mut body = c.body.clone();
        body.replace_range(edit.start..edit.end, &edit.payload);
        let mut imports = c.imports.clone();
        if let Some(i) = &edit.import {
            if !imports.contains(i) {
                imports.push(i.clone());
            }
        }
        let result = self.compile(&imports, &body).1;
        Trial {
            edit,
            imports,
            body,
            result,
        }
    }
}

/// Error count and compilability after each stage, in [`Stage`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub errors: [usize; 4],
    pub compilable: [bool; 4],
}

impl StageTrace {
    fn record(&mut self, stage: Stage, c: &Candidate) {
        self.errors[stage as usize] = c.error_count;
        self.compilable[stage as usize] = c.compiles();
    }
}

/// Integration then targeted fixes, each gated on remaining errors.
pub fn integrate_and_fix(mut c: Candidate, ev: &Evaluator, trace: &mut StageTrace) -> Candidate {
    trace.record(Stage::Retrieved, &c);
    extract_imports(&mut c, ev);
    c.stage = Stage::Integrated;
    if c.error_count > 0 {
        unwrap_main_in_main(&mut c, ev);
        snippetize(&mut c, ev);
    }
    trace.record(Stage::Integrated, &c);
    if c.error_count > 0 {
        targeted_fix_pass(&mut c, ev);
        c.stage = Stage::Fixed;
    }
    trace.record(Stage::Fixed, &c);
    c
}

/// Line deletion, when errors remain.
pub fn finish_deletion(mut c: Candidate, ev: &Evaluator, cfg: DeletionConfig, trace: &mut StageTrace) -> Candidate {
    if c.error_count > 0 {
        delete_lines(&mut c, ev, cfg);
        c.stage = Stage::Deleted;
    }
    trace.record(Stage::Deleted, &c);
    c
}

pub fn repair_traced(c: Candidate, ev: &Evaluator, cfg: DeletionConfig) -> (Candidate, StageTrace) {
    let mut trace = StageTrace::default();
    let c = integrate_and_fix(c, ev, &mut trace);
    let c = finish_deletion(c, ev, cfg, &mut trace);
    (c, trace)
}

/// Runs the whole cascade.
pub fn repair(c: Candidate, ev: &Evaluator, cfg: DeletionConfig) -> Candidate {
    repair_traced(c, ev, cfg).0
}

/// Removes the common leading whitespace and surrounding blank lines.
pub(crate) fn dedent(text: &str) -> String {
    let lines: Vec<&str> = text.split('\n').collect();
    let first = lines.iter().position(|l| !l.trim().is_empty());
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let (Some(first), Some(last)) = (first, last) else {
        return String::new();
    };
    let lines = &lines[first..=last];
    let cut = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    lines
        .iter()
        .map(|l| {
            let l = l.trim_end();
            &l[cut.min(l.len() - l.trim_start().len())..]
        })
        .collect::<Vec<_>>()
        .join("\n")
}
