use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use snipfit_core::corpus::{build_index, read_corpus, IndexConfig};
use snipfit_core::pipeline::{Context, Engine, PipelineConfig, SessionView};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn snipfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snipfit"))
        .current_dir(root())
        .args(args)
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn engine() -> Engine {
    let docs = read_corpus(BufReader::new(File::open(root().join("data/corpus.jsonl")).unwrap())).unwrap();
    Engine::new(build_index(docs, IndexConfig::default()).unwrap(), PipelineConfig::default())
}

#[test]
fn task_json_is_the_session_json() {
    let out = snipfit(&["task", "convert string to integer?", "--json"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let cli: SessionView = serde_json::from_slice(&out.stdout).unwrap();
    let direct = engine().process_task("convert string to integer", Context::harness()).unwrap().view();
    assert_eq!(cli, direct);
    assert_eq!(cli.candidates[0].error_count, 0);
}

#[test]
fn text_output_shows_preview_and_ranking() {
    let out = snipfit(&["task", "convert string to int"]);
    assert!(out.status.success());
    let s = text(&out.stdout);
    assert!(s.contains("Integer.parseInt"));
    assert!(s.contains("extract_import x2"));
    assert!(s.lines().any(|l| l.starts_with(">  1")));
}

#[test]
fn cycle_two_previews_the_third() {
    let out = snipfit(&["task", "convert string to integer", "--cycle", "2", "--json"]);
    let v: SessionView = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.cursor_index, 2);
    let third = &v.candidates[2];
    assert!(v.preview.unwrap().contains(third.body.lines().next().unwrap()));
}

#[test]
fn no_results_has_its_own_exit_code() {
    let out = snipfit(&["task", "frobnicate the quux"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("no results"));
    assert_eq!(snipfit(&["task", "how to do it"]).status.code(), Some(3));
}

#[test]
fn user_file_and_cursor() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("Main.java");
    fs::write(&f, "class Main {\n    public static void main(String[] args) {\n        String myString = \"5\";\n        \n    }\n}\n").unwrap();
    let out = snipfit(&["task", "convert string to integer", "--file", f.to_str().unwrap(), "--at", "4:9", "--json"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let v: SessionView = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v.cursor.line, v.cursor.col), (4, 9));
    assert!(v.context.contains("myString = \"5\""));
    assert_ne!(snipfit(&["task", "x", "--file", f.to_str().unwrap()]).status.code(), Some(0));
    assert_ne!(snipfit(&["task", "convert string to integer", "--file", f.to_str().unwrap(), "--at", "40:1"]).status.code(), Some(0));
}

#[test]
fn index_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let idx = dir.path().join("mini.idx");
    let out = snipfit(&["index", "--corpus", "data/corpus.jsonl", "--out", idx.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("31 keywords, 52 postings"), "{}", text(&out.stdout));
    let out = snipfit(&["task", "convert string to integer", "--index", idx.to_str().unwrap(), "--json"]);
    let v: SessionView = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, engine().process_task("convert string to integer", Context::harness()).unwrap().view());
    let out = snipfit(&["task", "convert string to integer", "--index", idx.to_str().unwrap(), "--mode", "stem"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("built with mode"));
    let out = snipfit(&["index", "--corpus", "data/corpus.jsonl", "--out", idx.to_str().unwrap(), "--mode", "none", "--omit-stop", "false"]);
    assert!(text(&out.stdout).contains("50 keywords, 95 postings"), "{}", text(&out.stdout));
}

#[test]
fn index_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_idx = dir.path().join("x.idx");
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = snipfit(&["index", "--corpus", empty.to_str().unwrap(), "--out", out_idx.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(text(&out.stderr).contains("warning"));
    let dup = dir.path().join("dup.jsonl");
    fs::write(&dup, "{\"id\":5,\"kind\":\"question\",\"title\":\"a\",\"body\":\"\"}\n{\"id\":5,\"kind\":\"question\",\"title\":\"b\",\"body\":\"\"}\n").unwrap();
    let out = snipfit(&["index", "--corpus", dup.to_str().unwrap(), "--out", out_idx.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("duplicate post id 5"), "{}", text(&out.stderr));
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\":1,\"kind\":\"question\",\"title\":\"a\",\"body\":\"\"}\n{oops\n").unwrap();
    let out = snipfit(&["index", "--corpus", bad.to_str().unwrap(), "--out", out_idx.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("line 2"), "{}", text(&out.stderr));
}

#[test]
fn bench_matches_golden_and_flags_a_diff() {
    let dir = tempfile::tempdir().unwrap();
    let out = snipfit(&["bench", "--corpus", "data/corpus.jsonl", "--tasks", "data/tasks.jsonl", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(json, fs::read_to_string(root().join("data/golden/report.json")).unwrap());
    let golden = dir.path().join("golden");
    fs::create_dir(&golden).unwrap();
    fs::write(golden.join("report.json"), json.replace("\"corpus_docs\": 49", "\"corpus_docs\": 48")).unwrap();
    fs::copy(dir.path().join("report.txt"), golden.join("report.txt")).unwrap();
    let out2 = dir.path().join("again");
    let out = snipfit(&[
        "bench",
        "--out",
        out2.to_str().unwrap(),
        "--golden",
        golden.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("corpus_docs"), "{}", text(&out.stderr));
}

#[test]
fn task_against_a_running_server() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_snipfit"))
        .current_dir(root())
        .args(["serve", "--port", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let url = line.trim().strip_prefix("listening on ").unwrap().to_string();
    assert!(url.starts_with("http://127.0.0.1:"));
    let remote = snipfit(&["task", "split string by whitespaces", "--json", "--server", &url]);
    let local = snipfit(&["task", "split string by whitespaces", "--json"]);
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(remote.status.success(), "{}", text(&remote.stderr));
    assert_eq!(remote.stdout, local.stdout);
}
