use std::collections::HashMap;

use snipfit_minij::{DiagCode, Diagnostic, Type};

use super::{Candidate, Edit, Evaluator, PatchKind, Trial};
use crate::splice::Spliced;

/// Tried in this order when usage gives no type.
pub const BRUTE_FORCE_TYPES: [Type; 7] = [
    Type::Int,
    Type::Char,
    Type::String,
    Type::Boolean,
    Type::Double,
    Type::Long,
    Type::Float,
];

const FALLBACK_TOKENS: [&str; 2] = [";", "}"];

fn key(d: &Diagnostic) -> (DiagCode, String) {
    (d.code, d.message.clone())
}

/// Attempts one fix per diagnostic. A fix is kept only if it strictly lowers
/// the error count; rejected diagnostics are remembered by (code, message)
/// occurrence so the next one is found even after the list shifts.
pub fn targeted_fix_pass(c: &mut Candidate, ev: &Evaluator) {
    let mut processed: HashMap<(DiagCode, String), usize> = HashMap::new();
    loop {
        let mut seen: HashMap<(DiagCode, String), usize> = HashMap::new();
        let mut target = None;
        for d in &c.diagnostics {
            let k = key(d);
            let n = seen.entry(k.clone()).or_default();
            if *n >= processed.get(&k).copied().unwrap_or(0) {
                target = Some(d.clone());
                break;
            }
            *n += 1;
        }
        let Some(d) = target else { break };
        if !try_fix(c, ev, &d) {
            *processed.entry(key(&d)).or_default() += 1;
        }
    }
}

fn try_fix(c: &mut Candidate, ev: &Evaluator, d: &Diagnostic) -> bool {
    let spliced = ev.context.splice(&c.imports, &c.body);
    match d.code {
        DiagCode::MissingToken => insert_token(c, ev, &spliced, d),
        DiagCode::UnresolvedType => d.name().is_some_and(|n| add_import(c, ev, n)),
        DiagCode::Unresolved => match d.name() {
            Some(n) if ev.registry.contains_simple(n) => add_import(c, ev, n),
            Some(_) => apply(c, fix_undeclared_variable(c, ev, d)),
            None => false,
        },
        DiagCode::UndeclaredVar => apply(c, fix_undeclared_variable(c, ev, d)),
        DiagCode::UnexpectedToken | DiagCode::Parse => delete_token(c, ev, &spliced, d),
        _ => false,
    }
}

fn apply(c: &mut Candidate, fixed: Option<Candidate>) -> bool {
    match fixed {
        Some(f) => {
            *c = f;
            true
        }
        None => false,
    }
}

fn accept_first(c: &mut Candidate, ev: &Evaluator, edits: impl IntoIterator<Item = Edit>, kind: PatchKind) -> bool {
    for edit in edits {
        let trial = ev.trial(c, edit);
        if trial.result.error_count < c.error_count {
            c.commit(trial, kind, None);
            return true;
        }
    }
    false
}

fn insert_token(c: &mut Candidate, ev: &Evaluator, spliced: &Spliced, d: &Diagnostic) -> bool {
    let hinted = d.expected_token().unwrap_or(";");
    let tokens: Vec<&str> = if FALLBACK_TOKENS.contains(&hinted) {
        FALLBACK_TOKENS.to_vec()
    } else {
        vec![hinted]
    };
    let at = match spliced.to_body_offset(d.range.start) {
        Some(at) => at,
        // an unclosed block in the snippet swallows the context's braces
        None if hinted == "}" => c.body.len(),
        None => return false,
    };
    let edits: Vec<Edit> = tokens.iter().map(|t| Edit::replace(&c.body, at, at, *t)).collect();
    accept_first(c, ev, edits, PatchKind::InsertToken)
}

fn add_import(c: &mut Candidate, ev: &Evaluator, name: &str) -> bool {
    let edits: Vec<Edit> = ev
        .registry
        .lookup(name)
        .iter()
        .map(|e| format!("import {};", e.qualified))
        .filter(|line| !c.imports.contains(line))
        .map(|line| Edit::import(c.body.len(), line))
        .collect();
    accept_first(c, ev, edits, PatchKind::AddImport)
}

fn delete_token(c: &mut Candidate, ev: &Evaluator, spliced: &Spliced, d: &Diagnostic) -> bool {
    match spliced.to_body_range(&d.range) {
        Some(r) if r.start < r.end => {
            let edit = Edit::replace(&c.body, r.start, r.end, "");
            accept_first(c, ev, [edit], PatchKind::DeleteToken)
        }
        _ => false,
    }
}

fn declaration(c: &Candidate, name: &str, ty: &Type) -> Option<Edit> {
    let lit = ty.default_literal()?;
    Some(Edit::replace(&c.body, 0, 0, format!("{ty} {name} = {lit};\n")))
}

/// Declares the name at the top of the snippet: with the type of its first
/// assignment when known, otherwise the first of [`BRUTE_FORCE_TYPES`] that
/// minimizes errors. Returns the fixed candidate only if errors drop.
pub fn fix_undeclared_variable(c: &Candidate, ev: &Evaluator, d: &Diagnostic) -> Option<Candidate> {
    let name = d.name()?;
    let assigned = match &d.hint {
        Some(snipfit_minij::frontend::Hint::Name { assigned_type, .. }) => assigned_type.clone(),
        _ => None,
    };
    let trial = |ty: &Type| declaration(c, name, ty).map(|e| ev.trial(c, e));
    let mut best: Option<Trial> = assigned.as_ref().and_then(trial);
    if best.as_ref().is_none_or(|b| b.result.error_count >= c.error_count) {
        best = None;
        for t in BRUTE_FORCE_TYPES.iter().filter_map(trial) {
            if best.as_ref().is_none_or(|b| t.result.error_count < b.result.error_count) {
                best = Some(t);
            }
        }
    }
    let best = best.filter(|b| b.result.error_count < c.error_count)?;
    let mut out = c.clone();
    out.commit(best, PatchKind::DeclareVar, None);
    Some(out)
}
