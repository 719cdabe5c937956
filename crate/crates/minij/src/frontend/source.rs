use serde::{Deserialize, Serialize};

/// Where a compilation unit came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    UserFile,
    Snippet,
    Spliced,
}

/// A piece of Mini-J source text with a precomputed line map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    text: String,
    origin: Origin,
    line_starts: Vec<usize>,
}

/// 1-based line/column position. Columns count characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

/// Half-open line/column range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl SourceUnit {
    pub fn new(text: impl Into<String>, origin: Origin) -> Self {
        let text = text.into();
        let line_starts = line_starts(&text);
        Self {
            text,
            origin,
            line_starts,
        }
    }

    pub fn snippet(text: impl Into<String>) -> Self {
        Self::new(text, Origin::Snippet)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn line_starts(&self) -> &[usize] {
        &self.line_starts
    }

    /// Number of physical lines (a trailing newline opens one more, empty, line).
    pub fn line_count(&self) -> usize {
        self.line_starts.len()
    }

    /// Text of a 1-based line without its newline.
    pub fn line(&self, line: usize) -> Option<&str> {
        let start = *self.line_starts.get(line.checked_sub(1)?)?;
        let end = self
            .line_starts
            .get(line)
            .map(|next| next - 1)
            .unwrap_or(self.text.len());
        Some(&self.text[start..end])
    }

    /// Byte offset to position. Offsets past the end clamp to the end of text.
    pub fn position(&self, offset: usize) -> Position {
        let offset = offset.min(self.text.len());
        let idx = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[idx];
        let col = self.text[start..offset].chars().count() + 1;
        Position { line: idx + 1, col }
    }

    pub fn span(&self, start: usize, end: usize) -> LineSpan {
        let a = self.position(start);
        let b = self.position(end.max(start));
        LineSpan {
            start_line: a.line,
            start_col: a.col,
            end_line: b.line,
            end_col: b.col,
        }
    }

    /// Position to byte offset; `col` may point one past the last character.
    pub fn offset(&self, pos: Position) -> Option<usize> {
        let text = self.line(pos.line)?;
        let start = self.line_starts[pos.line - 1];
        if pos.col == 0 {
            return None;
        }
        let mut chars = text.char_indices();
        for _ in 1..pos.col {
            chars.next()?;
        }
        Some(start + chars.next().map(|(i, _)| i).unwrap_or(text.len()))
    }

    /// True when the span indexes into this unit.
    pub fn contains_span(&self, span: &LineSpan) -> bool {
        let ok = |line: usize, col: usize| {
            self.line(line)
                .map(|l| col >= 1 && col <= l.chars().count() + 1)
                .unwrap_or(false)
        };
        ok(span.start_line, span.start_col)
            && ok(span.end_line, span.end_col)
            && (span.start_line, span.start_col) <= (span.end_line, span.end_col)
    }
}

fn line_starts(text: &str) -> Vec<usize> {
    let mut starts = vec![0];
    starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
    starts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_map_is_reconstructible() {
        let unit = SourceUnit::snippet("a\nbc\n\nd");
        let rebuilt: Vec<&str> = (1..=unit.line_count())
            .map(|l| unit.line(l).unwrap())
            .collect();
        assert_eq!(rebuilt.join("\n"), unit.text());
        assert_eq!(unit.line_count(), 4);
    }

    #[test]
    fn positions_round_trip() {
        let unit = SourceUnit::snippet("int x;\n  é = 1;\n");
        for (off, _) in unit.text().char_indices() {
            let pos = unit.position(off);
            assert_eq!(unit.offset(pos), Some(off));
        }
        assert_eq!(unit.position(unit.text().len()), Position { line: 3, col: 1 });
    }
}
