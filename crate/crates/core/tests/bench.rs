use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;

use proptest::prelude::*;
use snipfit_core::bench::{
    error_histogram, golden_diff, read_tasks, render_text, retrieval_matrix, run_eval, BenchConfig, BenchError,
    EvalReport, TaskSpec,
};
use snipfit_core::corpus::{build_index, keys, read_corpus, CorpusDoc, DocKind, IndexConfig, KeywordMode};
use snipfit_core::pipeline::normalize_task;
use snipfit_core::repair::{Candidate, DeletionConfig, Evaluator, Loops, Order};
use snipfit_core::splice::Context;
use snipfit_minij::frontend::{check, Origin};
use snipfit_minij::{SourceUnit, TypeRegistry};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn corpus() -> Vec<CorpusDoc> {
    read_corpus(BufReader::new(File::open(data("corpus.jsonl")).unwrap())).unwrap()
}

fn tasks() -> Vec<TaskSpec> {
    read_tasks(BufReader::new(File::open(data("tasks.jsonl")).unwrap())).unwrap()
}

fn report() -> EvalReport {
    run_eval(&corpus(), &tasks(), &BenchConfig::default()).unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = data("golden").join(name);
    if std::env::var_os("SNIPFIT_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap();
    let diff = golden_diff(&expected, actual);
    assert!(diff.is_empty(), "{name} differs:\n{}", diff.join("\n"));
}

#[test]
fn report_matches_golden() {
    let r = report();
    golden("report.json", &r.to_json());
    golden("report.txt", &render_text(&r));
}

#[test]
fn two_runs_are_byte_identical() {
    assert_eq!(report().to_json(), report().to_json());
}

#[test]
fn matrix_matches_the_independent_recount() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/retrieval_matrix.json");
    let oracle: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let docs = corpus();
    let tasks = tasks();
    let m = retrieval_matrix(&docs, &tasks).unwrap();
    for cell in oracle["cells"].as_array().unwrap() {
        let omit_stop = cell["omit_stop"].as_bool().unwrap();
        let mode: KeywordMode = cell["mode"].as_str().unwrap().parse().unwrap();
        assert_eq!(m.get(omit_stop, mode) as u64, cell["total"].as_u64().unwrap(), "{omit_stop} {mode:?}");
        let index = build_index(docs.clone(), IndexConfig { mode, omit_stop }).unwrap();
        let stats = index.stats();
        assert_eq!(stats.keywords as u64, cell["keywords"].as_u64().unwrap(), "{omit_stop} {mode:?}");
        assert_eq!(stats.postings as u64, cell["postings"].as_u64().unwrap(), "{omit_stop} {mode:?}");
        for t in &tasks {
            let n = index.query(&normalize_task(&t.task)).map_or(0, |v| v.len());
            assert_eq!(n as u64, cell["per_task"][&t.task].as_u64().unwrap(), "{} {omit_stop} {mode:?}", t.task);
        }
    }
    assert!(m.is_monotone());
    assert!(m.get(true, KeywordMode::Lemma) > m.get(true, KeywordMode::Stem));
    assert!(m.get(true, KeywordMode::Stem) > m.get(true, KeywordMode::None));
    assert!(m.get(true, KeywordMode::None) > m.get(false, KeywordMode::None));
}

const WORDS: &[&str] = &[
    "convert", "converting", "converted", "string", "strings", "int", "integer", "split", "splits", "splitting", "by",
    "the", "a", "to", "is", "are", "be", "index", "indices", "indexes", "write", "wrote", "writing", "file", "files",
    "read", "reading", "children", "child", "how", "do", "i", "array", "arrays", "sort", "sorted", "sorting",
];

fn title() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 1..6).prop_map(|w| w.join(" "))
}

fn synthetic() -> impl Strategy<Value = (Vec<CorpusDoc>, Vec<TaskSpec>)> {
    (
        prop::collection::vec((title(), 1usize..3), 1..10),
        prop::collection::vec(title().prop_filter("needs a keyword", |t| {
            KeywordMode::ALL.iter().all(|&m| !keys(t, m, true).is_empty())
        }), 1..6),
    )
        .prop_map(|(questions, tasks)| {
            let mut docs = Vec::new();
            let mut id = 1;
            for (t, answers) in questions {
                let q = id;
                docs.push(CorpusDoc {
                    id: q,
                    kind: DocKind::Question,
                    parent_id: None,
                    title: Some(t),
                    body: String::new(),
                    score: 0,
                    tags: vec![],
                });
                id += 1;
                for _ in 0..answers {
                    docs.push(CorpusDoc {
                        id,
                        kind: DocKind::Answer,
                        parent_id: Some(q),
                        title: None,
                        body: "```\nint x = 1;\n```".into(),
                        score: 0,
                        tags: vec![],
                    });
                    id += 1;
                }
            }
            let tasks = tasks
                .into_iter()
                .map(|task| TaskSpec {
                    task,
                    signature: None,
                    test: None,
                })
                .collect();
            (docs, tasks)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matrix_is_monotone_on_synthetic_corpora((docs, tasks) in synthetic()) {
        let m = retrieval_matrix(&docs, &tasks).unwrap();
        prop_assert!(m.is_monotone(), "{:?}", m);
    }
}

/// Recount of initial diagnostics without the splice module: the snippet is
/// pasted between the harness lines as is.
#[test]
fn histogram_matches_a_plain_recount() {
    let docs = corpus();
    let reg = TypeRegistry::builtin();
    let index = build_index(docs.clone(), IndexConfig::default()).unwrap();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in tasks() {
        for s in index.query(&normalize_task(&t.task)).unwrap_or_default() {
            let text = format!("public class Main {{\n    public static void main(String[] args) {{\n{}\n    }}\n}}\n", s.text);
            for d in check(&SourceUnit::new(text, Origin::Spliced), &reg).diagnostics {
                *counts.entry(d.code.name().to_string()).or_default() += 1;
            }
        }
    }
    let r = report();
    let got: BTreeMap<String, usize> = r.error_histogram.iter().map(|h| (h.code.clone(), h.count)).collect();
    assert_eq!(got, counts);
    assert!(r.error_histogram.windows(2).all(|w| w[0].count >= w[1].count));
}

#[test]
fn one_missing_semicolon() {
    let ctx = Context::harness();
    let reg = TypeRegistry::builtin();
    let ev = Evaluator::new(&ctx, &reg);
    let c = Candidate::retrieved("int x = 1", &ev);
    let h = error_histogram([&c]);
    assert_eq!(h.len(), 1);
    assert_eq!((h[0].code.as_str(), h[0].count), ("E_MISSING_TOKEN", 1));
    let ok = Candidate::retrieved("int x = 1;", &ev);
    assert!(error_histogram([&ok]).is_empty());
}

#[test]
fn empty_task_list_gives_an_empty_report() {
    let r = run_eval(&corpus(), &[], &BenchConfig::default()).unwrap();
    assert!(r.tasks.is_empty());
    assert!(r.error_histogram.is_empty());
    assert_eq!(r.totals.counts, Default::default());
    assert!(r.retrieval_matrix.cells.iter().all(|c| c.retrieved == 0));
    assert_eq!(r.deletion_variants.len(), 8);
    assert_eq!(r.oracle.fixtures, 0);
}

#[test]
fn stages_never_lose_snippets() {
    let r = report();
    assert_eq!(r.totals.monotonicity_violations, 0);
    for t in &r.tasks {
        assert!(t.counts.is_monotone(), "{t:?}");
        assert!(t.counts.type_suggestible <= t.counts.after_deletion);
        assert!(t.counts.passing <= t.counts.after_deletion);
    }
    let c = r.totals.counts;
    assert!(c.initial_compilable < c.after_integration && c.after_integration < c.after_fixes);
    assert!(c.after_fixes < c.after_deletion);
}

#[test]
fn bottom_up_rows_are_not_worse() {
    let r = report();
    assert_eq!(r.deletion_variants.len(), 8);
    for cfg in DeletionConfig::ALL.iter().filter(|c| c.order == Order::BottomUp) {
        let mirror = DeletionConfig {
            order: Order::TopDown,
            ..*cfg
        };
        let row = |c: DeletionConfig| r.deletion_variants.iter().find(|v| v.config == c.to_string()).unwrap().compilable;
        assert!(row(*cfg) >= row(mirror), "{cfg}");
    }
}

#[test]
fn oracle_is_never_beaten() {
    let r = report();
    assert!(r.oracle.fixtures > 0);
    for row in &r.oracle.rows {
        assert_eq!(row.violations, 0, "{}", row.config);
        assert!(row.attains + row.degenerate <= r.oracle.fixtures);
    }
    let multi = r.oracle.row(DeletionConfig::default()).unwrap();
    let single = r
        .oracle
        .row(DeletionConfig {
            loops: Loops::Single,
            ..DeletionConfig::default()
        })
        .unwrap();
    assert!(single.gap >= multi.gap);
}

#[test]
fn task_lines_report_their_number() {
    let input = "{\"task\": \"a\"}\n\n{\"task\": 3}\n";
    match read_tasks(input.as_bytes()) {
        Err(BenchError::Malformed { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(read_tasks("{\"task\": \"a\", \"extra\": 1}".as_bytes()).is_err());
}

#[test]
fn stop_word_tasks_are_rejected() {
    let tasks = vec![TaskSpec {
        task: "how to do it".into(),
        signature: None,
        test: None,
    }];
    assert!(matches!(run_eval(&corpus(), &tasks, &BenchConfig::default()), Err(BenchError::EmptyTask(_))));
}

#[test]
fn bad_signature_names_the_task() {
    let tasks = vec![TaskSpec {
        task: "convert string to int".into(),
        signature: Some(snipfit_core::bench::SignatureSpec {
            args: vec!["Foo".into()],
            ret: "int".into(),
        }),
        test: None,
    }];
    let err = run_eval(&corpus(), &tasks, &BenchConfig::default()).unwrap_err();
    assert!(err.to_string().contains("convert string to int"));
}
