use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Mutex;

use snipfit_core::corpus::{build_index, read_corpus, IndexConfig};
use snipfit_core::pipeline::{
    normalize_task, Context, Cursor, Direction, Engine, PipelineConfig, PipelineError, SessionStatus, TaskSession,
    TestStatus,
};
use snipfit_core::testkit::{test_from_statements, TypeSignature};
use snipfit_minij::Budget;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn engine() -> Engine {
    let docs = read_corpus(BufReader::new(File::open(data("corpus.jsonl")).unwrap())).unwrap();
    Engine::new(build_index(docs, IndexConfig::default()).unwrap(), PipelineConfig::default())
}

fn ids(s: &TaskSession) -> Vec<usize> {
    s.candidates.iter().map(|p| p.id).collect()
}

#[test]
fn string_to_int_presents_a_compiling_snippet() {
    let s = engine().process_task("convert string to int", Context::harness()).unwrap();
    assert_eq!(s.status, SessionStatus::Complete);
    let best = s.presented().unwrap();
    assert_eq!(best.candidate.error_count, 0);
    assert!(!best.candidate.is_degenerate());
    assert!(s.preview().unwrap().contains("Integer.parseInt"));
}

#[test]
fn ranking_follows_the_key() {
    let s = engine().process_task("convert int to string", Context::harness()).unwrap();
    let keys: Vec<_> = s.candidates.iter().map(|p| p.key()).collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(s.candidates.len(), s.expected);
}

#[test]
fn trailing_question_mark_is_stripped() {
    assert_eq!(normalize_task("convert string to int?"), "convert string to int");
    let e = engine();
    let a = e.process_task("convert string to int?", Context::harness()).unwrap();
    let b = e.process_task("convert string to int", Context::harness()).unwrap();
    assert_eq!(a.view(), b.view());
}

#[test]
fn unknown_words_give_no_results() {
    let s = engine().process_task("frobnicate the quux", Context::harness()).unwrap();
    assert_eq!(s.status, SessionStatus::NoResults);
    assert!(s.presented().is_none());
}

#[test]
fn cycling_wraps_both_ways() {
    let mut s = engine().process_task("convert string to integer", Context::harness()).unwrap();
    let n = s.candidates.len();
    assert!(n > 2);
    let last = s.candidates[n - 1].id;
    assert_eq!(s.cycle(Direction::Prev).unwrap().id, last);
    for _ in 0..n {
        s.cycle(Direction::Next).unwrap();
    }
    assert_eq!(s.cursor_index, n - 1);
    s.cycle(Direction::Next).unwrap();
    assert_eq!(s.cursor_index, 0);
    let mut empty = TaskSession::new("x", Context::harness(), 0);
    assert_eq!(empty.cycle(Direction::Next).unwrap_err(), PipelineError::NoCandidates);
}

#[test]
fn streaming_arrivals_end_in_the_blocking_order() {
    let e = engine();
    let blocking = e.process_task("convert string to integer", Context::harness()).unwrap();
    let (session, snippets) = e.open_session("convert string to integer", Context::harness()).unwrap();
    let session = Mutex::new(session);
    e.process_streaming(&blocking.context, &snippets, &|c| session.lock().unwrap().insert(c));
    let session = session.into_inner().unwrap();
    assert_eq!(ids(&session), ids(&blocking));
    assert_eq!(session.status, SessionStatus::Complete);
}

#[test]
fn presented_candidate_stays_put_while_others_arrive() {
    let e = engine();
    let full = e.process_task("convert string to integer", Context::harness()).unwrap();
    let mut arrivals = full.candidates.clone();
    arrivals.reverse();
    let mut s = TaskSession::new("convert string to integer", Context::harness(), arrivals.len());
    s.insert(arrivals.remove(0));
    s.insert(arrivals.remove(0));
    s.cycle(Direction::Next).unwrap();
    let shown = s.presented().unwrap().id;
    for c in arrivals {
        s.insert(c);
        assert_eq!(s.presented().unwrap().id, shown);
    }
}

#[test]
fn suggestions_follow_the_compiling_majority() {
    let e = engine();
    for (task, want) in [
        ("split string by whitespaces", "(String)->String[]"),
        ("convert string to integer", "(String)->int"),
        ("convert uppercase to lowercase", "(char)->char"),
    ] {
        let s = e.process_task(task, Context::harness()).unwrap();
        let top = &s.suggest_types()[0];
        assert_eq!(top.signature.display(), want, "{task}");
    }
}

#[test]
fn passing_candidates_move_to_the_front() {
    let e = engine();
    let mut s = e.process_task("convert int to string", Context::harness()).unwrap();
    let before = s.presented().unwrap().id;
    let sig = TypeSignature::parse(&["int"], "String").unwrap();
    let test = test_from_statements("assertEquals(snippet(7), \"7\");");
    let out = s.test_candidates(&test, &sig, None, &e.registry, &Budget::default()).unwrap();
    assert!(out.iter().any(|o| o.status == TestStatus::Passed));
    assert!(out.iter().any(|o| o.status != TestStatus::Passed));
    let passed: Vec<bool> = s.candidates.iter().map(|p| p.passed_tests > 0).collect();
    let first_fail = passed.iter().position(|p| !p).unwrap();
    assert!(passed[first_fail..].iter().all(|p| !p));
    assert!(s.presented().unwrap().passed_tests > 0);
    assert_ne!(s.presented().unwrap().id, before);
    assert!(s.tested);
}

#[test]
fn timeouts_are_reported_and_ranked_below_passes() {
    let e = engine();
    let mut s = e.process_task("find maximum of two numbers", Context::harness()).unwrap();
    let sig = TypeSignature::parse(&["int", "int"], "int").unwrap();
    let test = test_from_statements("assertEquals(snippet(3, 9), 9);");
    let out = s.test_candidates(&test, &sig, None, &e.registry, &Budget::with_wall_ms(300)).unwrap();
    let timeouts: Vec<_> = out.iter().filter(|o| o.status == TestStatus::Timeout).collect();
    assert_eq!(timeouts.len(), 1);
    assert!(timeouts[0].elapsed_ms <= 400);
    assert_eq!(s.candidates.last().unwrap().id, timeouts[0].candidate);
}

#[test]
fn malformed_test_is_rejected_before_running() {
    let e = engine();
    let mut s = e.process_task("convert string to integer", Context::harness()).unwrap();
    let sig = TypeSignature::parse(&["String"], "int").unwrap();
    let test = test_from_statements("assertEquals(snippet(1, 2), 0);");
    assert!(matches!(
        s.test_candidates(&test, &sig, None, &e.registry, &Budget::default()),
        Err(PipelineError::BadTest(_))
    ));
    assert!(!s.tested);
}

#[test]
fn context_changes_the_ranking_inputs() {
    let e = engine();
    let ctx = Context::new(
        "class Main {\n    public static void main(String[] args) {\n        String myString = \"5\";\n        \n    }\n}\n",
        Cursor { line: 4, col: 9 },
    )
    .unwrap();
    let s = e.process_task("convert string to integer", ctx).unwrap();
    let guava = s.candidates.iter().find(|p| p.source_answer == 3).unwrap();
    assert!(guava.candidate.body.starts_with("int foo = 0;"));
    assert_eq!(guava.candidate.error_count, 0);
}

#[test]
fn views_serialize() {
    let s = engine().process_task("convert string to integer", Context::harness()).unwrap();
    let v = s.view();
    let json = serde_json::to_string(&v).unwrap();
    let back: snipfit_core::pipeline::SessionView = serde_json::from_str(&json).unwrap();
    assert_eq!(back, v);
    assert_eq!(v.processed, v.candidates.len());
    assert!(v.candidates.iter().any(|c| !c.patch_summary.is_empty()));
}
