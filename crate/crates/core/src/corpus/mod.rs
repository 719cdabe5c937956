//! Offline Q&A corpus: ingestion, snippet extraction, keyword index, retrieval.

mod doc;
mod index;
mod keywords;
pub mod porter;

pub use doc::{extract_snippets, read_corpus, CorpusDoc, DocKind, PostId, RawSnippet};
pub use index::{build_index, IndexConfig, IndexStats, InvertedIndex, DEFAULT_SUGGESTIONS, FORMAT_VERSION, MAGIC};
pub use keywords::{is_stop_word, keys, normalize, process_keywords, stem_key, tokenize, Keyword, KeywordMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("duplicate post id {0}")]
    DuplicateId(PostId),
    #[error("question {0} has no title")]
    MissingTitle(PostId),
    #[error("answer {id} does not reference an existing question (parent {parent:?})")]
    OrphanAnswer { id: PostId, parent: Option<PostId> },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no keyword survives processing of {0:?}")]
    EmptyQuery(String),
    #[error("invalid index file: {0}")]
    BadIndex(String),
    #[error("i/o: {0}")]
    Io(String),
}
