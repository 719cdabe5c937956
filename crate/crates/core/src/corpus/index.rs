use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::doc::{extract_snippets, validate, CorpusDoc, DocKind, PostId, RawSnippet};
use super::keywords::{keys, KeywordMode};
use super::CorpusError;

pub const MAGIC: &str = "SNIPFIT-IDX";
pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SUGGESTIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexConfig {
    pub mode: KeywordMode,
    pub omit_stop: bool,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            mode: KeywordMode::Lemma,
            omit_stop: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertedIndex {
    pub config: IndexConfig,
    pub postings: BTreeMap<String, BTreeSet<PostId>>,
    pub doc_store: BTreeMap<PostId, CorpusDoc>,
    /// question id -> answer ids in corpus order
    pub answers: BTreeMap<PostId, Vec<PostId>>,
    pub task_titles: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStats {
    pub docs: usize,
    pub questions: usize,
    pub answers: usize,
    pub keywords: usize,
    pub postings: usize,
    pub snippets: usize,
}

impl InvertedIndex {
    pub fn empty(config: IndexConfig) -> Self {
        Self {
            config,
            postings: BTreeMap::new(),
            doc_store: BTreeMap::new(),
            answers: BTreeMap::new(),
            task_titles: Vec::new(),
        }
    }

    /// Replaces the suggestion list. Without one, question titles are used.
    pub fn with_tasks(mut self, titles: impl IntoIterator<Item = String>) -> Self {
        self.task_titles = titles.into_iter().collect();
        self
    }

    pub fn stats(&self) -> IndexStats {
        let questions = self.doc_store.values().filter(|d| d.kind == DocKind::Question).count();
        IndexStats {
            docs: self.doc_store.len(),
            questions,
            answers: self.doc_store.len() - questions,
            keywords: self.postings.len(),
            postings: self.postings.values().map(BTreeSet::len).sum(),
            snippets: self
                .doc_store
                .values()
                .map(|d| extract_snippets(d).len())
                .sum(),
        }
    }

    pub fn keys(&self, text: &str) -> Vec<String> {
        keys(text, self.config.mode, self.config.omit_stop)
    }

    /// Questions whose title carries every query keyword.
    pub fn matching_questions(&self, task: &str) -> Result<Vec<PostId>, CorpusError> {
        let keys = self.keys(task);
        if keys.is_empty() {
            return Err(CorpusError::EmptyQuery(task.to_string()));
        }
        let mut sets: Vec<&BTreeSet<PostId>> = Vec::with_capacity(keys.len());
        for k in &keys {
            match self.postings.get(k) {
                Some(s) => sets.push(s),
                None => return Ok(Vec::new()),
            }
        }
        sets.sort_by_key(|s| s.len());
        let (first, rest) = sets.split_first().expect("non-empty");
        Ok(first
            .iter()
            .filter(|id| rest.iter().all(|s| s.contains(id)))
            .copied()
            .collect())
    }

    /// Snippets of every answer in matching threads, best-scored first.
    pub fn query(&self, task: &str) -> Result<Vec<RawSnippet>, CorpusError> {
        let mut out: Vec<RawSnippet> = Vec::new();
        for q in self.matching_questions(task)? {
            for a in self.answers.get(&q).into_iter().flatten() {
                out.extend(extract_snippets(&self.doc_store[a]));
            }
        }
        out.sort_by(|x, y| {
            y.answer_score
                .cmp(&x.answer_score)
                .then(x.source_answer.cmp(&y.source_answer))
                .then(x.block_index.cmp(&y.block_index))
        });
        Ok(out)
    }

    pub fn suggest_tasks(&self, prefix: &str, limit: usize) -> Vec<String> {
        let titles = self.task_titles.iter();
        if prefix.trim().is_empty() {
            return titles.take(limit).cloned().collect();
        }
        let wanted = self.keys(prefix);
        if wanted.is_empty() {
            return Vec::new();
        }
        titles
            .filter(|t| {
                let have = self.keys(t);
                wanted.iter().all(|k| have.contains(k))
            })
            .take(limit)
            .cloned()
            .collect()
    }

    pub fn parent_of(&self, answer: PostId) -> Option<&CorpusDoc> {
        let parent = self.doc_store.get(&answer)?.parent_id?;
        self.doc_store.get(&parent)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), CorpusError> {
        writeln!(w, "{MAGIC} {FORMAT_VERSION}").map_err(|e| CorpusError::Io(e.to_string()))?;
        serde_json::to_writer(&mut w, self).map_err(|e| CorpusError::Io(e.to_string()))?;
        writeln!(w).map_err(|e| CorpusError::Io(e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn read_from(mut r: impl BufRead) -> Result<Self, CorpusError> {
        let mut header = String::new();
        r.read_line(&mut header).map_err(|e| CorpusError::Io(e.to_string()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(CorpusError::BadIndex("missing SNIPFIT-IDX header".into()));
        }
        let version: u32 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| CorpusError::BadIndex("missing format version".into()))?;
        if version != FORMAT_VERSION {
            return Err(CorpusError::BadIndex(format!(
                "format version {version} is not supported (expected {FORMAT_VERSION})"
            )));
        }
        serde_json::from_reader(r).map_err(|e| CorpusError::BadIndex(e.to_string()))
    }
}

pub fn build_index(
    docs: impl IntoIterator<Item = CorpusDoc>,
    config: IndexConfig,
) -> Result<InvertedIndex, CorpusError> {
    let docs: Vec<CorpusDoc> = docs.into_iter().collect();
    validate(&docs)?;
    let mut index = InvertedIndex::empty(config);
    for d in docs {
        match d.kind {
            DocKind::Question => {
                let title = d.title.clone().unwrap_or_default();
                for k in index.keys(&title) {
                    index.postings.entry(k).or_default().insert(d.id);
                }
                index.answers.entry(d.id).or_default();
                index.task_titles.push(title);
            }
            DocKind::Answer => {
                if let Some(p) = d.parent_id {
                    index.answers.entry(p).or_default().push(d.id);
                }
            }
        }
        index.doc_store.insert(d.id, d);
    }
    Ok(index)
}
