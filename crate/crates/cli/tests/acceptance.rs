//! One line per acceptance criterion. Exits non-zero when any is red.

use std::fs::{self, File};
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use snipfit_client::Client;
use snipfit_core::api::{CreateSession, TestRequest};
use snipfit_core::bench::{read_tasks, retrieval_matrix, run_eval, BenchConfig, SignatureSpec, TaskSpec};
use snipfit_core::corpus::{build_index, extract_snippets, keys, read_corpus, CorpusDoc, DocKind, IndexConfig, KeywordMode};
use snipfit_core::pipeline::{Context, Cursor, Engine, PipelineConfig, TestStatus};
use snipfit_core::repair::{
    delete_lines, repair, Acceptance, Candidate, DeletionConfig, Evaluator, Loops, Order, PatchKind, ORACLE_MAX_LINES,
};
use snipfit_core::testkit::{check_test, generate_test_skeleton, suggest_types, test_from_statements, TypeSignature};
use snipfit_minij::{Budget, TypeRegistry};
use snipfit_service::{bind, loopback, AppState, Settings};

const RETRIEVAL_LIMIT: Duration = Duration::from_secs(10);
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_ATTAIN_RATE: f64 = 0.90;
const SYNTHETIC_CORPORA: u32 = 100;
const SANDBOX_WALL_MS: u64 = 300;
const SANDBOX_GRACE_MS: u64 = 100;
const SANDBOX_REPS: usize = 10;
const RESPONSIVE_MS: u128 = 250;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus() -> Vec<CorpusDoc> {
    read_corpus(BufReader::new(File::open(root().join("data/corpus.jsonl")).unwrap())).unwrap()
}

fn tasks() -> Vec<TaskSpec> {
    read_tasks(BufReader::new(File::open(root().join("data/tasks.jsonl")).unwrap())).unwrap()
}

fn engine(cfg: PipelineConfig) -> Engine {
    Engine::new(build_index(corpus(), IndexConfig::default()).unwrap(), cfg)
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const WORDS: &[&str] = &[
    "convert", "converting", "converted", "string", "strings", "int", "integer", "split", "splits", "splitting", "by",
    "the", "a", "to", "is", "are", "be", "index", "indices", "indexes", "write", "wrote", "writing", "file", "files",
    "read", "reading", "children", "child", "how", "do", "i", "array", "arrays", "sort", "sorted", "sorting",
];

fn synthetic(runner: &mut TestRunner) -> (Vec<CorpusDoc>, Vec<TaskSpec>) {
    let title = || proptest::collection::vec(proptest::sample::select(WORDS), 1..6).prop_map(|w| w.join(" "));
    let keyed = title().prop_filter("needs a keyword", |t| KeywordMode::ALL.iter().all(|&m| !keys(t, m, true).is_empty()));
    let strat = (
        proptest::collection::vec((title(), 1usize..3), 1..10),
        proptest::collection::vec(keyed, 1..6),
    );
    let (questions, task_titles) = strat.new_tree(runner).unwrap().current();
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
    let tasks = task_titles
        .into_iter()
        .map(|task| TaskSpec {
            task,
            signature: None,
            test: None,
        })
        .collect();
    (docs, tasks)
}

fn retrieval_monotonicity() -> Verdict {
    let t = Instant::now();
    let golden: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root().join("crates/core/tests/data/retrieval_matrix.json")).unwrap())
            .unwrap();
    let m = retrieval_matrix(&corpus(), &tasks()).unwrap();
    let mut mismatches = 0;
    for cell in golden["cells"].as_array().unwrap() {
        let mode: KeywordMode = cell["mode"].as_str().unwrap().parse().unwrap();
        let got = m.get(cell["omit_stop"].as_bool().unwrap(), mode) as u64;
        mismatches += usize::from(got != cell["total"].as_u64().unwrap());
    }
    let mut runner = TestRunner::deterministic();
    let mut bad = 0;
    for _ in 0..SYNTHETIC_CORPORA {
        let (docs, tasks) = synthetic(&mut runner);
        bad += usize::from(!retrieval_matrix(&docs, &tasks).unwrap().is_monotone());
    }
    let elapsed = t.elapsed();
    let cells: Vec<String> = [false, true]
        .iter()
        .map(|&o| KeywordMode::ALL.iter().map(|&k| m.get(o, k).to_string()).collect::<Vec<_>>().join("/"))
        .collect();
    check(
        m.is_monotone() && mismatches == 0 && bad == 0 && elapsed < RETRIEVAL_LIMIT,
        format!(
            "keep-stop {} omit-stop {}; {mismatches} cells off golden; {bad}/{SYNTHETIC_CORPORA} synthetic non-monotone; {:.2}s < {}s",
            cells[0],
            cells[1],
            elapsed.as_secs_f64(),
            RETRIEVAL_LIMIT.as_secs()
        ),
    )
}

fn repair_monotonicity() -> Verdict {
    let mut candidates = 0;
    let mut violations = 0;
    for cfg in DeletionConfig::ALL {
        let e = engine(PipelineConfig {
            deletion: cfg,
            ..PipelineConfig::default()
        });
        for t in tasks() {
            let s = e.process_task(&t.task, Context::harness()).unwrap();
            let mut per_stage = [0usize; 4];
            for p in &s.candidates {
                candidates += 1;
                violations += usize::from(p.trace.errors.windows(2).any(|w| w[1] > w[0]));
                violations += usize::from(p.trace.errors[3] != p.candidate.error_count);
                for (k, &c) in p.trace.compilable.iter().enumerate() {
                    per_stage[k] += usize::from(c);
                }
            }
            violations += usize::from(per_stage.windows(2).any(|w| w[1] < w[0]));
        }
    }
    let report = run_eval(&corpus(), &tasks(), &BenchConfig::default()).unwrap();
    violations += report.totals.monotonicity_violations;
    violations += report.tasks.iter().filter(|t| !t.counts.is_monotone()).count();
    let c = report.totals.counts;
    check(
        violations == 0,
        format!(
            "{candidates} candidate runs over 8 configs, {violations} violations; compilable {} <= {} <= {} <= {}",
            c.initial_compilable, c.after_integration, c.after_fixes, c.after_deletion
        ),
    )
}

fn worked_example() -> Verdict {
    let golden = fs::read_to_string(root().join("crates/core/tests/data/worked_example.java")).unwrap();
    let ctx = Context::new(
        "public class Main{\n    public static void \n    main(String[] args){\n        \n    }\n}\n",
        Cursor { line: 4, col: 9 },
    )
    .unwrap();
    let reg = TypeRegistry::builtin();
    let ev = Evaluator::new(&ctx, &reg);
    let doc = corpus().into_iter().find(|d| d.id == 3).unwrap();
    let snippet = &extract_snippets(&doc)[0];
    let c = repair(Candidate::retrieved(snippet.text.as_str(), &ev), &ev, DeletionConfig::default());
    let kinds: Vec<PatchKind> = c.patches.iter().map(|p| p.kind).collect();
    let text = ev.compile(&c.imports, &c.body).0.unit.text().to_string();
    let want = [PatchKind::ExtractImport, PatchKind::ExtractImport, PatchKind::DeclareVar];
    check(
        kinds == want && c.error_count == 0 && text == golden,
        format!(
            "patches {kinds:?}, {} errors, spliced text {} golden",
            c.error_count,
            if text == golden { "matches" } else { "differs from" }
        ),
    )
}

/// Fewest errors over every subset of lines, the empty one included.
fn subset_minimum(c: &Candidate, ev: &Evaluator) -> usize {
    let lines: Vec<&str> = c.body.split('\n').collect();
    (0u32..1 << lines.len())
        .map(|mask| {
            let kept: Vec<&str> = (0..lines.len()).filter(|j| mask & (1 << j) != 0).map(|j| lines[j]).collect();
            ev.errors(&c.imports, &kept.join("\n"))
        })
        .min()
        .unwrap()
}

fn bundled_snippets() -> Vec<String> {
    let mut texts: Vec<String> = corpus().iter().flat_map(extract_snippets).map(|s| s.text).collect();
    texts.sort();
    texts.dedup();
    texts
}

fn oracle() -> Verdict {
    let t = Instant::now();
    let ctx = Context::harness();
    let reg = TypeRegistry::builtin();
    let ev = Evaluator::new(&ctx, &reg);
    let fixtures: Vec<Candidate> = bundled_snippets()
        .into_iter()
        .map(|s| Candidate::retrieved(s, &ev))
        .filter(|c| c.body.split('\n').count() <= ORACLE_MAX_LINES)
        .collect();
    let mut below = 0;
    let mut attained = 0;
    for c in &fixtures {
        let floor = subset_minimum(c, &ev);
        for cfg in DeletionConfig::ALL {
            let mut d = c.clone();
            delete_lines(&mut d, &ev, cfg);
            below += usize::from(d.error_count < floor);
            if cfg == DeletionConfig::default() {
                attained += usize::from(d.error_count == floor);
            }
        }
    }
    let elapsed = t.elapsed();
    let rate = attained as f64 / fixtures.len() as f64;
    check(
        below == 0 && rate >= ORACLE_ATTAIN_RATE && elapsed < ORACLE_LIMIT,
        format!(
            "{} fixtures, {below} results below the minimum, bottom_up/multi/non_strict attains {attained}/{} = {:.1}% >= {:.0}%; {:.2}s < {}s",
            fixtures.len(),
            fixtures.len(),
            rate * 100.0,
            ORACLE_ATTAIN_RATE * 100.0,
            elapsed.as_secs_f64(),
            ORACLE_LIMIT.as_secs()
        ),
    )
}

fn strict_local_optimality() -> Verdict {
    let ctx = Context::harness();
    let reg = TypeRegistry::builtin();
    let ev = Evaluator::new(&ctx, &reg);
    let cfg = DeletionConfig {
        order: Order::BottomUp,
        loops: Loops::Multi,
        acceptance: Acceptance::Strict,
    };
    let mut probes = 0;
    let mut violations = 0;
    for text in bundled_snippets() {
        let mut c = Candidate::retrieved(text, &ev);
        delete_lines(&mut c, &ev, cfg);
        let lines: Vec<&str> = c.body.split('\n').collect();
        for i in 0..lines.len() {
            if lines[i].trim().is_empty() {
                continue;
            }
            probes += 1;
            let rest: Vec<&str> = (0..lines.len()).filter(|&j| j != i).map(|j| lines[j]).collect();
            violations += usize::from(ev.errors(&c.imports, &rest.join("\n")) < c.error_count);
        }
    }
    check(violations == 0, format!("{probes} single-line probes, {violations} strict improvements"))
}

fn type_suggestion() -> Verdict {
    let rows = [
        ("String str = \"a b\";\nString[] parts = str.split(\"\\\\s+\");", "(String)->String[]"),
        ("String myString = \"1234\";\nint foo = Integer.parseInt(myString);", "(String)->int"),
        ("char c = 'A';\nchar lower = Character.toLowerCase(c);", "(char)->char"),
    ];
    let got: Vec<String> = rows.iter().map(|(b, _)| suggest_types(b).map(|s| s.display()).unwrap_or_default()).collect();
    let want: Vec<&str> = rows.iter().map(|r| r.1).collect();
    check(got == want, got.join(", "))
}

fn test_skeleton() -> Verdict {
    let sig = TypeSignature::parse(&["String"], "int").unwrap();
    let t = generate_test_skeleton(&sig).unwrap();
    let want = squash("assertEquals(snippet(\"empty\"), 0);");
    let asserts: Vec<String> = t.source.lines().map(squash).filter(|l| l.starts_with("assert")).collect();
    let errors = check_test(&t, &sig, &TypeRegistry::builtin()).unwrap();
    check(
        asserts == [want.clone()] && errors == 0,
        format!("assertions {asserts:?}, {errors} errors against the stub"),
    )
}

async fn sandbox_async() -> Verdict {
    let e = engine(PipelineConfig {
        budget: Budget::with_wall_ms(SANDBOX_WALL_MS),
        ..PipelineConfig::default()
    });
    let (addr, server) = bind(AppState::new(e, Settings::default()), loopback(0)).await.unwrap();
    let handle = tokio::spawn(server);
    let client = Client::new(format!("http://{addr}"));
    let s = client
        .create_session(&CreateSession {
            task: "find maximum of two numbers".into(),
            file: None,
            cursor: None,
            wait: true,
        })
        .await
        .unwrap();
    let req = TestRequest {
        signature: SignatureSpec {
            args: vec!["int".into(), "int".into()],
            ret: "int".into(),
        },
        test_source: Some("assertEquals(snippet(3, 9), 9);".into()),
        limit: None,
    };
    let mut ok = 0;
    let mut worst_elapsed = 0;
    let mut worst_health = 0;
    for _ in 0..SANDBOX_REPS {
        let c = client.clone();
        let id = s.id.clone();
        let r = req.clone();
        let run = tokio::spawn(async move { c.run_tests(&id, &r).await });
        tokio::time::sleep(Duration::from_millis(SANDBOX_WALL_MS / 3)).await;
        let t = Instant::now();
        let during = client.health().await.is_ok();
        let during_ms = t.elapsed().as_millis();
        let r = run.await.unwrap().unwrap();
        let t = Instant::now();
        let after = client.health().await.is_ok();
        let after_ms = t.elapsed().as_millis();
        worst_health = worst_health.max(during_ms).max(after_ms);
        let timeouts: Vec<u64> = r.outcomes.iter().filter(|o| o.status == TestStatus::Timeout).map(|o| o.elapsed_ms).collect();
        let within = timeouts.len() == 1 && timeouts[0] <= SANDBOX_WALL_MS + SANDBOX_GRACE_MS;
        worst_elapsed = worst_elapsed.max(timeouts.iter().copied().max().unwrap_or(u64::MAX));
        ok += usize::from(within && during && after && during_ms < RESPONSIVE_MS && after_ms < RESPONSIVE_MS);
    }
    handle.abort();
    check(
        ok == SANDBOX_REPS,
        format!(
            "{ok}/{SANDBOX_REPS} runs; slowest timeout {worst_elapsed} ms <= {} ms; slowest health reply {worst_health} ms",
            SANDBOX_WALL_MS + SANDBOX_GRACE_MS
        ),
    )
}

fn sandbox() -> Verdict {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .unwrap()
        .block_on(sandbox_async())
}

fn rerank_partition() -> Verdict {
    let e = engine(PipelineConfig::default());
    let mut checked = 0;
    let mut bad = Vec::new();
    for t in tasks() {
        let (Some(sig), Some(test)) = (&t.signature, &t.test) else {
            continue;
        };
        let sig = sig.parse().unwrap();
        let mut s = e.process_task(&t.task, Context::harness()).unwrap();
        let out = s
            .test_candidates(&test_from_statements(test), &sig, None, &e.registry, &e.config.budget)
            .unwrap();
        let passing = out.iter().filter(|o| o.status == TestStatus::Passed).count();
        let flags: Vec<bool> = s.candidates.iter().map(|p| p.passed_tests > 0).collect();
        let partitioned = flags.windows(2).all(|w| w[0] || !w[1]);
        let best = s.presented().is_some_and(|p| p.passed_tests > 0);
        checked += 1;
        if !partitioned || !best || passing != flags.iter().filter(|f| **f).count() {
            bad.push(t.task.clone());
        }
    }
    check(checked > 0 && bad.is_empty(), format!("{checked} tested tasks, off: {bad:?}"))
}

fn determinism() -> Verdict {
    let a = run_eval(&corpus(), &tasks(), &BenchConfig::default()).unwrap().to_json();
    let b = run_eval(&corpus(), &tasks(), &BenchConfig::default()).unwrap().to_json();
    let golden = fs::read_to_string(root().join("data/golden/report.json")).unwrap();
    check(a == b && a == golden, format!("{} bytes, identical: {}, golden: {}", a.len(), a == b, a == golden))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("retrieval monotonicity", retrieval_monotonicity),
        ("repair monotonicity", repair_monotonicity),
        ("worked example", worked_example),
        ("deletion oracle", oracle),
        ("strict local optimality", strict_local_optimality),
        ("type suggestion", type_suggestion),
        ("test skeleton", test_skeleton),
        ("sandbox timeout", sandbox),
        ("re-rank partition", rerank_partition),
        ("determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", n + 1);
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
