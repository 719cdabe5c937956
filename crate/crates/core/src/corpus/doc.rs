use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::CorpusError;

pub type PostId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocKind {
    Question,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDoc {
    pub id: PostId,
    pub kind: DocKind,
    #[serde(default)]
    pub parent_id: Option<PostId>,
    #[serde(default)]
    pub title: Option<String>,
    pub body: String,
    #[serde(default)]
    pub score: i64,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawSnippet {
    pub source_answer: PostId,
    pub block_index: usize,
    pub text: String,
    pub answer_score: i64,
}

/// Fenced blocks of an answer, in order. Whitespace-only blocks are dropped.
pub fn extract_snippets(doc: &CorpusDoc) -> Vec<RawSnippet> {
    if doc.kind != DocKind::Answer {
        return Vec::new();
    }
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in doc.body.lines() {
        let fence = line.trim_start().starts_with("```");
        match (&mut current, fence) {
            (None, true) => current = Some(Vec::new()),
            (Some(_), true) => blocks.push(current.take().unwrap_or_default().join("\n")),
            (Some(lines), false) => lines.push(line),
            (None, false) => {}
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
        .into_iter()
        .filter(|b| !b.trim().is_empty())
        .enumerate()
        .map(|(block_index, text)| RawSnippet {
            source_answer: doc.id,
            block_index,
            text,
            answer_score: doc.score,
        })
        .collect()
}

/// Parses a JSON-lines corpus. Blank lines are skipped; line numbers are 1-based.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<CorpusDoc>, CorpusError> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: CorpusDoc = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

pub(crate) fn validate(docs: &[CorpusDoc]) -> Result<(), CorpusError> {
    let mut kinds = BTreeMap::new();
    for d in docs {
        if kinds.insert(d.id, d.kind).is_some() {
            return Err(CorpusError::DuplicateId(d.id));
        }
    }
    for d in docs {
        match d.kind {
            DocKind::Question => {
                if d.title.as_deref().is_none_or(|t| t.trim().is_empty()) {
                    return Err(CorpusError::MissingTitle(d.id));
                }
            }
            DocKind::Answer => {
                let parent = d.parent_id.ok_or(CorpusError::OrphanAnswer { id: d.id, parent: None })?;
                if kinds.get(&parent) != Some(&DocKind::Question) {
                    return Err(CorpusError::OrphanAnswer {
                        id: d.id,
                        parent: Some(parent),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn answer(body: &str) -> CorpusDoc {
        CorpusDoc {
            id: 2,
            kind: DocKind::Answer,
            parent_id: Some(1),
            title: None,
            body: body.into(),
            score: 3,
            tags: vec![],
        }
    }

    #[test]
    fn blocks_in_order() {
        let s = extract_snippets(&answer("Try:\n```java\nint a = 1;\n```\ntext\n```\n  \n```\n```\nb();\nc();\n```"));
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].text, "int a = 1;");
        assert_eq!((s[1].block_index, s[1].text.as_str()), (1, "b();\nc();"));
    }

    #[test]
    fn no_blocks() {
        assert!(extract_snippets(&answer("just prose")).is_empty());
    }

    #[test]
    fn malformed_line_is_reported_with_its_number() {
        let input = "{\"id\":1,\"kind\":\"question\",\"title\":\"t\",\"body\":\"\",\"score\":0,\"tags\":[]}\n\n{oops\n";
        match read_corpus(input.as_bytes()) {
            Err(CorpusError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
