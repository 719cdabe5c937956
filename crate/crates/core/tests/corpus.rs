use std::collections::BTreeSet;

use proptest::prelude::*;
use snipfit_core::corpus::{
    build_index, porter, process_keywords, stem_key, CorpusDoc, CorpusError, DocKind, IndexConfig, InvertedIndex,
    KeywordMode,
};

const ORACLE: &str = include_str!("data/porter_oracle.tsv");

#[test]
fn porter_matches_reference_stems() {
    let mut mismatches = Vec::new();
    for line in ORACLE.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        let (word, once, fixed) = (cols[0], cols[1], cols[2]);
        if porter::stem(word) != once || stem_key(word) != fixed {
            mismatches.push((word, porter::stem(word), once, stem_key(word), fixed));
        }
    }
    assert!(ORACLE.lines().count() > 2000);
    assert!(mismatches.is_empty(), "{} mismatches: {:?}", mismatches.len(), &mismatches[..mismatches.len().min(10)]);
}

fn processed(text: &str, mode: KeywordMode, omit: bool) -> Vec<String> {
    process_keywords(text, mode, omit).into_iter().map(|k| k.processed).collect()
}

#[test]
fn keyword_examples() {
    assert_eq!(
        processed("How to convert string to int in Java?", KeywordMode::Lemma, true),
        ["convert", "string", "int"]
    );
    assert_eq!(
        processed("Splitting a string by whitespaces", KeywordMode::Stem, true),
        ["split", "string", "whitespac"]
    );
    for mode in KeywordMode::ALL {
        assert!(processed("", mode, true).is_empty());
        assert!(processed("", mode, false).is_empty());
    }
    assert_eq!(processed("Java java JAVA", KeywordMode::None, false), ["java"]);
    assert!(processed("Java java JAVA", KeywordMode::None, true).is_empty());
}

fn q(id: u64, title: &str) -> CorpusDoc {
    CorpusDoc {
        id,
        kind: DocKind::Question,
        parent_id: None,
        title: Some(title.into()),
        body: String::new(),
        score: 0,
        tags: vec![],
    }
}

fn a(id: u64, parent: u64, score: i64, body: &str) -> CorpusDoc {
    CorpusDoc {
        id,
        kind: DocKind::Answer,
        parent_id: Some(parent),
        title: None,
        body: body.into(),
        score,
        tags: vec![],
    }
}

fn small_corpus() -> Vec<CorpusDoc> {
    vec![
        q(1, "Convert string to int"),
        a(2, 1, 5, "```\nint x = Integer.parseInt(s);\n```"),
        a(3, 1, 9, "```\nint y = 0;\n```\nor\n```\nint z = 1;\n```"),
        q(4, "Parse int from a string"),
        a(5, 4, 9, "```\nint w = 2;\n```"),
        q(6, "Sort an array"),
        a(7, 6, 1, "```\nArrays.sort(a);\n```"),
    ]
}

#[test]
fn query_orders_by_score_then_id_then_block() {
    let idx = build_index(small_corpus(), IndexConfig::default()).unwrap();
    let got: Vec<(u64, usize)> = idx
        .query("string int")
        .unwrap()
        .iter()
        .map(|s| (s.source_answer, s.block_index))
        .collect();
    assert_eq!(got, [(3, 0), (3, 1), (5, 0), (2, 0)]);
    assert!(idx.query("hovercraft eels").unwrap().is_empty());
    assert!(matches!(idx.query("the of and"), Err(CorpusError::EmptyQuery(_))));
}

#[test]
fn suggestions() {
    let idx = build_index(small_corpus(), IndexConfig::default())
        .unwrap()
        .with_tasks(["convert string to integer".to_string(), "sort an array".to_string()]);
    assert_eq!(idx.suggest_tasks("convert string", 10), ["convert string to integer"]);
    assert_eq!(idx.suggest_tasks("", 1), ["convert string to integer"]);
    assert!(idx.suggest_tasks("the a of", 10).is_empty());
}

#[test]
fn empty_stream_gives_empty_index() {
    let idx = build_index(Vec::new(), IndexConfig::default()).unwrap();
    assert!(idx.postings.is_empty() && idx.doc_store.is_empty());
}

#[test]
fn orphans_are_rejected() {
    let err = build_index(vec![a(2, 1, 0, "")], IndexConfig::default()).unwrap_err();
    assert!(matches!(err, CorpusError::OrphanAnswer { id: 2, .. }));
}

#[test]
fn index_round_trips() {
    let idx = build_index(small_corpus(), IndexConfig::default()).unwrap();
    let bytes = idx.to_bytes();
    assert!(bytes.starts_with(b"SNIPFIT-IDX 1\n"));
    let back = InvertedIndex::read_from(&bytes[..]).unwrap();
    assert_eq!(back, idx);
    for task in ["string int", "sort array", "convert"] {
        assert_eq!(back.query(task).unwrap(), idx.query(task).unwrap());
    }
}

const WORDS: &[&str] = &[
    "convert", "converting", "conversion", "string", "strings", "int", "integer", "the", "a", "to", "in", "how", "is",
    "java", "split", "splitting", "splits", "sort", "sorted", "sorting", "array", "arrays", "wrote", "writing", "write",
    "children", "child", "file", "files", "read", "reading", "has", "having", "was", "being", "list", "lists", "map",
    "don't", "doing", "done", "do", "uppercase", "lowercase", "character", "characters",
];

fn title() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..7).prop_map(|w| w.join(" "))
}

fn retrieved(idx: &InvertedIndex, task: &str) -> BTreeSet<u64> {
    idx.matching_questions(task).map(|v| v.into_iter().collect()).unwrap_or_default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn processing_is_idempotent(text in title(), mode in prop::sample::select(KeywordMode::ALL.to_vec()), omit in any::<bool>()) {
        let once = processed(&text, mode, omit);
        let twice = processed(&once.join(" "), mode, omit);
        prop_assert_eq!(&once, &twice);
        if omit {
            for k in &once {
                prop_assert!(k != "java");
                prop_assert!(!snipfit_core::corpus::is_stop_word(k));
            }
        }
    }

    #[test]
    fn retrieval_is_monotone(titles in prop::collection::vec(title(), 1..20), task in title()) {
        // stop-only queries are an error under omit_stop rather than an empty result
        prop_assume!(!processed(&task, KeywordMode::Lemma, true).is_empty());
        let docs: Vec<CorpusDoc> = titles.iter().enumerate().map(|(i, t)| q(i as u64 + 1, t)).collect();
        let sets: Vec<Vec<BTreeSet<u64>>> = [false, true]
            .iter()
            .map(|&omit_stop| {
                KeywordMode::ALL
                    .iter()
                    .map(|&mode| retrieved(&build_index(docs.clone(), IndexConfig { mode, omit_stop }).unwrap(), &task))
                    .collect()
            })
            .collect();
        for row in &sets {
            prop_assert!(row[0].is_subset(&row[1]) && row[1].is_subset(&row[2]));
        }
        for (keep, omit) in sets[0].iter().zip(&sets[1]) {
            prop_assert!(keep.is_subset(omit));
        }
    }

    #[test]
    fn results_carry_every_query_keyword(titles in prop::collection::vec(title(), 1..20), task in title()) {
        let docs: Vec<CorpusDoc> = titles.iter().enumerate().map(|(i, t)| q(i as u64 + 1, t)).collect();
        let idx = build_index(docs, IndexConfig::default()).unwrap();
        let want = idx.keys(&task);
        for id in retrieved(&idx, &task) {
            let have = idx.keys(idx.doc_store[&id].title.as_deref().unwrap());
            prop_assert!(want.iter().all(|k| have.contains(k)));
        }
    }
}
