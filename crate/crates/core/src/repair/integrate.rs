use snipfit_minij::frontend::ast::{ClassDecl, Item, Member, MethodDecl};
use snipfit_minij::frontend::{parse, parse_snippet};
use snipfit_minij::SourceUnit;

use super::{dedent, Candidate, Edit, Evaluator, PatchKind};

/// Byte range that removes one physical line together with one adjacent newline.
pub(crate) fn line_removal(body: &str, start: usize, end: usize) -> (usize, usize) {
    if end < body.len() {
        (start, end + 1)
    } else if start > 0 {
        (start - 1, end)
    } else {
        (start, end)
    }
}

fn import_line(line: &str) -> Option<&str> {
    let t = line.trim();
    (t.starts_with("import ") && t.ends_with(';')).then_some(t)
}

/// Moves `import ...;` lines from the body to the import list.
pub fn extract_imports(c: &mut Candidate, ev: &Evaluator) {
    let mut skip = 0;
    loop {
        let mut offset = 0;
        let mut found = None;
        for (i, line) in c.body.split('\n').enumerate() {
            if i >= skip {
                if let Some(imp) = import_line(line) {
                    found = Some((i, offset, offset + line.len(), imp.to_string()));
                    break;
                }
            }
            offset += line.len() + 1;
        }
        let Some((i, start, end, imp)) = found else { break };
        let (s, mut e) = line_removal(&c.body, start, end);
        if s == 0 {
            // blank lines that separated the imports from the code
            while let Some(n) = c.body[e..].find('\n').filter(|&n| c.body[e..e + n].trim().is_empty()) {
                e += n + 1;
            }
        }
        let mut edit = Edit::replace(&c.body, s, e, "");
        edit.import = Some(imp);
        let trial = ev.trial(c, edit);
        if trial.result.error_count <= c.error_count {
            c.commit(trial, PatchKind::ExtractImport, None);
        } else {
            skip = i + 1;
        }
    }
}

fn snippet_items(body: &str) -> Vec<Item> {
    parse_snippet(&SourceUnit::snippet(body)).0.items
}

fn block_inner(body: &str, m: &MethodDecl) -> Option<String> {
    let block = m.body.as_ref()?;
    let close = block.close.as_ref()?;
    Some(dedent(&body[block.span.start + 1..close.start]))
}

fn class_inner(body: &str, cls: &ClassDecl) -> Option<String> {
    let close = cls.close.as_ref()?;
    Some(dedent(&body[cls.header.end..close.start]))
}

fn try_replace(c: &mut Candidate, ev: &Evaluator, span: std::ops::Range<usize>, payload: String, kind: PatchKind, strict: bool) -> bool {
    if payload.trim().is_empty() {
        return false;
    }
    let trial = ev.trial(c, Edit::replace(&c.body, span.start, span.end, payload));
    let ok = if strict {
        trial.result.error_count < c.error_count
    } else {
        trial.result.error_count <= c.error_count
    };
    if ok {
        c.commit(trial, kind, None);
    }
    ok
}

/// Strips a lone wrapper class (no fields, at most one method) and a lone
/// function, leaving the statement sequence.
pub fn snippetize(c: &mut Candidate, ev: &Evaluator) {
    if let [Item::Class(cls)] = snippet_items(&c.body).as_slice() {
        let methods = cls.members.iter().filter(|m| matches!(m, Member::Method(_))).count();
        if methods <= 1 && methods == cls.members.len() {
            match class_inner(&c.body, cls) {
                Some(inner) => {
                    if !try_replace(c, ev, cls.span.clone(), inner, PatchKind::StripClass, false) {
                        return;
                    }
                }
                None => return,
            }
        } else {
            return;
        }
    }
    if let [Item::Method(m)] = snippet_items(&c.body).as_slice() {
        if let Some(inner) = block_inner(&c.body, m) {
            try_replace(c, ev, m.span.clone(), inner, PatchKind::StripFunction, false);
        }
    }
}

fn cursor_in_main(ev: &Evaluator) -> bool {
    let at = ev.context.cursor_offset();
    let (cu, _) = parse(&ev.context.unit);
    cu.items.iter().any(|item| match item {
        Item::Class(cls) => cls.members.iter().any(|m| match m {
            Member::Method(m) => {
                m.name.name == "main" && m.body.as_ref().is_some_and(|b| b.span.start < at && at <= b.span.end)
            }
            _ => false,
        }),
        _ => false,
    })
}

/// Removes the snippet's own `main` header and closing brace when it is
/// inserted into an existing `main`. Kept only if errors drop.
pub fn unwrap_main_in_main(c: &mut Candidate, ev: &Evaluator) {
    if !cursor_in_main(ev) {
        return;
    }
    let items = snippet_items(&c.body);
    let Some(m) = items.iter().find_map(|i| match i {
        Item::Method(m) if m.name.name == "main" => Some(m),
        _ => None,
    }) else {
        return;
    };
    if let Some(inner) = block_inner(&c.body, m) {
        try_replace(c, ev, m.span.clone(), inner, PatchKind::UnwrapMain, true);
    }
}
