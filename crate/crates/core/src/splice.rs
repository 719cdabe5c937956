//! Places a candidate into the user's file: imports after the existing
//! imports, body at the cursor re-indented to the cursor column. The spliced
//! regions are kept as byte ranges so the context can be recovered exactly and
//! diagnostics can be mapped back onto the candidate body.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use snipfit_minij::frontend::ast::Item;
use snipfit_minij::frontend::{parse, Origin, Position};
use snipfit_minij::SourceUnit;

pub const HARNESS: &str = "public class Main {\n    public static void main(String[] args) {\n        \n    }\n}\n";
pub const HARNESS_CURSOR: Cursor = Cursor { line: 3, col: 9 };

/// 1-based insertion point; `col` may be one past the end of the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor {
    pub line: usize,
    pub col: usize,
}

impl From<Cursor> for Position {
    fn from(c: Cursor) -> Self {
        Position { line: c.line, col: c.col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpliceError {
    #[error("cursor {line}:{col} is outside the file")]
    CursorOutside { line: usize, col: usize },
}

#[derive(Debug, Clone, Copy)]
struct LineMap {
    spliced_start: usize,
    prefix: usize,
    body_start: usize,
    dedent: usize,
    body_len: usize,
}

/// The user's file with one candidate inserted.
#[derive(Debug, Clone)]
pub struct Spliced {
    pub unit: SourceUnit,
    pub imports: Range<usize>,
    pub body: Range<usize>,
    lines: Vec<LineMap>,
    body_text_len: usize,
}

/// The user's file and insertion point a candidate is evaluated against.
#[derive(Debug, Clone)]
pub struct Context {
    pub unit: SourceUnit,
    pub cursor: Cursor,
    cursor_offset: usize,
    import_offset: usize,
}

impl Context {
    pub fn new(text: impl Into<String>, cursor: Cursor) -> Result<Self, SpliceError> {
        let unit = SourceUnit::new(text, Origin::UserFile);
        let outside = SpliceError::CursorOutside {
            line: cursor.line,
            col: cursor.col,
        };
        let cursor_offset = unit.offset(cursor.into()).ok_or(outside)?;
        let import_offset = import_offset(&unit);
        Ok(Self {
            unit,
            cursor,
            cursor_offset,
            import_offset,
        })
    }

    /// An empty class with a main method, cursor inside main.
    pub fn harness() -> Self {
        Self::new(HARNESS, HARNESS_CURSOR).expect("harness cursor is valid")
    }

    pub fn text(&self) -> &str {
        self.unit.text()
    }

    pub fn cursor_offset(&self) -> usize {
        self.cursor_offset
    }

    /// Whitespace that prefixes continuation lines of the body.
    fn indent(&self) -> String {
        let line = self.unit.line(self.cursor.line).unwrap_or("");
        let before: String = line.chars().take(self.cursor.col - 1).collect();
        if before.chars().all(char::is_whitespace) {
            before
        } else {
            " ".repeat(self.cursor.col - 1)
        }
    }

    fn rest_of_line_is_blank(&self) -> bool {
        let text = self.unit.text();
        let end = text[self.cursor_offset..].find('\n').map_or(text.len(), |i| self.cursor_offset + i);
        text[self.cursor_offset..end].trim().is_empty()
    }

    pub fn splice(&self, imports: &[String], body: &str) -> Spliced {
        let text = self.unit.text();
        let mut import_text = String::new();
        if !imports.is_empty() {
            if self.import_offset > 0 && !text[..self.import_offset].ends_with('\n') {
                import_text.push('\n');
            }
            for i in imports {
                import_text.push_str(i.trim());
                import_text.push('\n');
            }
        }
        let (body_text, lines_rel) = self.reindent(body);

        let mut out = String::with_capacity(text.len() + import_text.len() + body_text.len());
        let (imports_range, body_range, shift);
        if self.import_offset <= self.cursor_offset {
            out.push_str(&text[..self.import_offset]);
            imports_range = out.len()..out.len() + import_text.len();
            out.push_str(&import_text);
            out.push_str(&text[self.import_offset..self.cursor_offset]);
            shift = out.len();
            body_range = out.len()..out.len() + body_text.len();
            out.push_str(&body_text);
            out.push_str(&text[self.cursor_offset..]);
        } else {
            out.push_str(&text[..self.cursor_offset]);
            shift = out.len();
            body_range = out.len()..out.len() + body_text.len();
            out.push_str(&body_text);
            out.push_str(&text[self.cursor_offset..self.import_offset]);
            imports_range = out.len()..out.len() + import_text.len();
            out.push_str(&import_text);
            out.push_str(&text[self.import_offset..]);
        }
        let lines = lines_rel
            .into_iter()
            .map(|mut l| {
                l.spliced_start += shift;
                l
            })
            .collect();
        Spliced {
            unit: SourceUnit::new(out, Origin::Spliced),
            imports: imports_range,
            body: body_range,
            lines,
            body_text_len: body.len(),
        }
    }

    fn reindent(&self, body: &str) -> (String, Vec<LineMap>) {
        if body.is_empty() {
            return (String::new(), Vec::new());
        }
        let dedent = body
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.len() - l.trim_start().len())
            .min()
            .unwrap_or(0);
        let indent = self.indent();
        let mut out = String::new();
        let mut maps = Vec::new();
        let mut body_start = 0;
        for (i, line) in body.split('\n').enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let cut = dedent.min(line.len() - line.trim_start().len());
            let prefix = if i > 0 && !line.trim().is_empty() { indent.as_str() } else { "" };
            maps.push(LineMap {
                spliced_start: out.len(),
                prefix: prefix.len(),
                body_start,
                dedent: cut,
                body_len: line.len(),
            });
            out.push_str(prefix);
            out.push_str(&line[cut..]);
            body_start += line.len() + 1;
        }
        if !self.rest_of_line_is_blank() {
            out.push('\n');
            out.push_str(&indent);
        }
        (out, maps)
    }
}

fn import_offset(unit: &SourceUnit) -> usize {
    let (cu, _) = parse(unit);
    let text = unit.text();
    let line_end = |at: usize| text[at..].find('\n').map_or(text.len(), |i| at + i + 1);
    let mut offset = 0;
    for item in &cu.items {
        match item {
            Item::Import(i) => offset = line_end(i.span.end),
            Item::Package(s) if offset == 0 => offset = line_end(s.end),
            _ => {}
        }
    }
    offset
}

impl Spliced {
    pub fn text(&self) -> &str {
        self.unit.text()
    }

    /// The original context, with both spliced regions removed.
    pub fn recover_context(&self) -> String {
        let text = self.unit.text();
        let (a, b) = if self.imports.start <= self.body.start {
            (&self.imports, &self.body)
        } else {
            (&self.body, &self.imports)
        };
        format!("{}{}{}", &text[..a.start], &text[a.end..b.start], &text[b.end..])
    }

    /// Maps a spliced byte offset onto the candidate body, if it falls inside it.
    pub fn to_body_offset(&self, offset: usize) -> Option<usize> {
        if offset < self.body.start || offset > self.body.end || self.lines.is_empty() {
            return None;
        }
        let idx = self.lines.partition_point(|l| l.spliced_start <= offset).saturating_sub(1);
        let l = self.lines[idx];
        let rel = offset - l.spliced_start;
        let within = if rel < l.prefix { 0 } else { l.dedent + rel - l.prefix };
        Some((l.body_start + within.min(l.body_len)).min(self.body_text_len))
    }

    pub fn to_body_range(&self, range: &Range<usize>) -> Option<Range<usize>> {
        Some(self.to_body_offset(range.start)?..self.to_body_offset(range.end)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_context_and_maps_offsets() {
        let ctx = Context::new("import java.util.List;\nclass A {\n  void f() {\n    \n  }\n}\n", Cursor { line: 4, col: 5 })
            .unwrap();
        let body = "  int x = 1;\n  x = x + 1;";
        let s = ctx.splice(&["import java.util.Optional;".into()], body);
        assert!(s.text().starts_with("import java.util.List;\nimport java.util.Optional;\nclass A"));
        assert!(s.text().contains("    int x = 1;\n    x = x + 1;"));
        assert_eq!(s.recover_context(), ctx.text());
        let at = s.text().find("x + 1").unwrap();
        assert_eq!(s.to_body_offset(at), body.find("x + 1"));
    }

    #[test]
    fn cursor_outside_is_rejected() {
        assert!(Context::new("class A {}\n", Cursor { line: 9, col: 1 }).is_err());
        assert!(Context::new("class A {}\n", Cursor { line: 1, col: 30 }).is_err());
    }

    #[test]
    fn empty_body_leaves_context() {
        let ctx = Context::harness();
        assert_eq!(ctx.splice(&[], "").text(), HARNESS);
    }

    #[test]
    fn non_blank_rest_of_line_moves_to_a_new_line() {
        let ctx = Context::new("class A { void f() { } }", Cursor { line: 1, col: 22 }).unwrap();
        let s = ctx.splice(&[], "int x = 1;");
        assert_eq!(s.recover_context(), ctx.text());
        assert!(s.text().contains("int x = 1;\n"));
    }
}
