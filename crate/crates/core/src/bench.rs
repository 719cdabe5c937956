//! Evaluation over a corpus and task list: retrieval matrix, per-stage
//! compilable counts, initial error histogram, deletion variants and the
//! exhaustive deletion oracle.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use snipfit_minij::{Budget, TypeRegistry};

use crate::corpus::{
    build_index, extract_snippets, keys, CorpusDoc, CorpusError, IndexConfig, InvertedIndex, KeywordMode, RawSnippet,
};
use crate::pipeline::{normalize_task, ProcessedCandidate, TaskSession, TestStatus};
use crate::repair::{
    exhaustive_minimum, finish_deletion, integrate_and_fix, Candidate, DeletionConfig, Evaluator, Stage, StageTrace,
    ORACLE_MAX_LINES,
};
use crate::splice::Context;
use crate::testkit::{generate_test_skeleton, suggest_types, test_from_statements, SignatureError, TypeSignature};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("tasks line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("task {0:?} has no keyword once stop words are removed")]
    EmptyTask(String),
    #[error("task {task:?}: {source}")]
    Signature {
        task: String,
        #[source]
        source: SignatureError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSpec {
    pub args: Vec<String>,
    pub ret: String,
}

impl SignatureSpec {
    pub fn parse(&self) -> Result<TypeSignature, SignatureError> {
        TypeSignature::parse(&self.args, &self.ret)
    }
}

/// One line of the task list. `test` holds assertion statements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
}

pub fn read_tasks(reader: impl BufRead) -> Result<Vec<TaskSpec>, BenchError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| BenchError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| BenchError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub omit_stop: bool,
    pub mode: KeywordMode,
    pub retrieved: usize,
}

/// Retrieved snippets summed over all tasks, keep-stop row first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalMatrix {
    pub cells: Vec<MatrixCell>,
}

impl RetrievalMatrix {
    pub fn get(&self, omit_stop: bool, mode: KeywordMode) -> usize {
        self.cells
            .iter()
            .find(|c| c.omit_stop == omit_stop && c.mode == mode)
            .map_or(0, |c| c.retrieved)
    }

    /// none <= stem <= lemma in each row, keep-stop <= omit-stop in each column.
    pub fn is_monotone(&self) -> bool {
        let rows = [false, true].map(|o| KeywordMode::ALL.map(|m| self.get(o, m)));
        rows.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])) && (0..3).all(|j| rows[0][j] <= rows[1][j])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub retrieved: usize,
    pub initial_compilable: usize,
    pub after_integration: usize,
    pub after_fixes: usize,
    pub after_deletion: usize,
    pub type_suggestible: usize,
    pub passing: usize,
}

impl StageCounts {
    pub fn stages(&self) -> [usize; 4] {
        [self.initial_compilable, self.after_integration, self.after_fixes, self.after_deletion]
    }

    pub fn is_monotone(&self) -> bool {
        self.stages().windows(2).all(|w| w[0] <= w[1]) && self.after_deletion <= self.retrieved
    }

    fn add(&mut self, o: &StageCounts) {
        self.retrieved += o.retrieved;
        self.initial_compilable += o.initial_compilable;
        self.after_integration += o.after_integration;
        self.after_fixes += o.after_fixes;
        self.after_deletion += o.after_deletion;
        self.type_suggestible += o.type_suggestible;
        self.passing += o.passing;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: String,
    pub counts: StageCounts,
    /// A signature was given, so candidates were tested.
    pub testable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_suggestion: Option<String>,
    /// Test status name -> candidates.
    pub outcomes: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub code: String,
    pub code_id: u16,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantRow {
    pub config: String,
    pub compilable: usize,
    pub degenerate: usize,
    pub remaining_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub config: String,
    /// Non-degenerate result with exactly the minimum error count.
    pub attains: usize,
    pub degenerate: usize,
    /// Non-degenerate result below the minimum. Always zero for a sound oracle.
    pub violations: usize,
    /// Sum of (result - minimum) over non-degenerate results.
    pub gap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleStats {
    pub max_lines: usize,
    /// Distinct corpus snippets that reach deletion with at most `max_lines` lines.
    pub fixtures: usize,
    pub rows: Vec<OracleRow>,
}

impl OracleStats {
    pub fn row(&self, cfg: DeletionConfig) -> Option<&OracleRow> {
        let name = cfg.to_string();
        self.rows.iter().find(|r| r.config == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub tasks: usize,
    pub testable_tasks: usize,
    pub counts: StageCounts,
    /// Candidates whose error count rose between stages, or whose
    /// compilability was lost, under any deletion config.
    pub monotonicity_violations: usize,
}

/// Counts from the original full-scale evaluation. Metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleReference {
    pub retrieved: usize,
    pub initial_compilable: usize,
    pub after_integration: usize,
    pub after_fixes: usize,
    pub after_deletion: usize,
    pub type_suggestible: usize,
}

pub const SCALE_REFERENCE: ScaleReference = ScaleReference {
    retrieved: 6954,
    initial_compilable: 327,
    after_integration: 470,
    after_fixes: 968,
    after_deletion: 2037,
    type_suggestible: 316,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub corpus_docs: usize,
    pub index: IndexConfig,
    pub deletion: String,
    pub retrieval_matrix: RetrievalMatrix,
    pub tasks: Vec<TaskReport>,
    pub error_histogram: Vec<HistogramEntry>,
    pub deletion_variants: Vec<VariantRow>,
    pub oracle: OracleStats,
    pub totals: Totals,
    pub reference: ScaleReference,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn task(&self, task: &str) -> Option<&TaskReport> {
        self.tasks.iter().find(|t| t.task == task)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[derive(Default)]
pub struct BenchConfig {
    pub index: IndexConfig,
    pub deletion: DeletionConfig,
    pub budget: Budget,
}


/// Every task must keep a keyword in every mode with stop words omitted.
pub fn validate_tasks(tasks: &[TaskSpec]) -> Result<(), BenchError> {
    for t in tasks {
        let task = normalize_task(&t.task);
        if KeywordMode::ALL.iter().any(|&m| keys(&task, m, true).is_empty()) {
            return Err(BenchError::EmptyTask(t.task.clone()));
        }
    }
    Ok(())
}

fn retrieve(index: &InvertedIndex, task: &str) -> Result<Vec<RawSnippet>, CorpusError> {
    index.query(&normalize_task(task))
}

pub fn retrieval_matrix(docs: &[CorpusDoc], tasks: &[TaskSpec]) -> Result<RetrievalMatrix, BenchError> {
    validate_tasks(tasks)?;
    let configs: Vec<IndexConfig> = [false, true]
        .iter()
        .flat_map(|&omit_stop| KeywordMode::ALL.map(|mode| IndexConfig { mode, omit_stop }))
        .collect();
    let cells = configs
        .par_iter()
        .map(|&cfg| {
            let index = build_index(docs.iter().cloned(), cfg)?;
            let mut retrieved = 0;
            for t in tasks {
                retrieved += retrieve(&index, &t.task)?.len();
            }
            Ok(MatrixCell {
                omit_stop: cfg.omit_stop,
                mode: cfg.mode,
                retrieved,
            })
        })
        .collect::<Result<Vec<_>, CorpusError>>()?;
    Ok(RetrievalMatrix { cells })
}

/// Initial diagnostics by code, most frequent first.
pub fn error_histogram<'a>(candidates: impl IntoIterator<Item = &'a Candidate>) -> Vec<HistogramEntry> {
    let mut counts: BTreeMap<(u16, &'static str), usize> = BTreeMap::new();
    for c in candidates {
        for d in &c.diagnostics {
            *counts.entry((d.code.id(), d.code.name())).or_default() += 1;
        }
    }
    let mut out: Vec<HistogramEntry> = counts
        .into_iter()
        .map(|((code_id, code), count)| HistogramEntry {
            code: code.to_string(),
            code_id,
            count,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then(a.code_id.cmp(&b.code_id)));
    out
}

fn trace_ok(t: &StageTrace) -> bool {
    t.errors.windows(2).all(|w| w[1] <= w[0]) && t.compilable.windows(2).all(|w| w[0] <= w[1])
}

/// One retrieved snippet run through integration and fixes once, then
/// through deletion under every config.
struct Run {
    initial: Candidate,
    variants: Vec<(Candidate, StageTrace)>,
}

fn run_snippet(s: &RawSnippet, ev: &Evaluator) -> Run {
    let initial = Candidate::retrieved(s.text.clone(), ev);
    let mut trace = StageTrace::default();
    let fixed = integrate_and_fix(initial.clone(), ev, &mut trace);
    let variants = DeletionConfig::ALL
        .iter()
        .map(|&cfg| {
            let mut t = trace;
            let c = finish_deletion(fixed.clone(), ev, cfg, &mut t);
            (c, t)
        })
        .collect();
    Run { initial, variants }
}

struct TaskRun {
    report: TaskReport,
    runs: Vec<Run>,
    violations: usize,
}

fn run_task(
    index: &InvertedIndex,
    spec: &TaskSpec,
    ctx: &Context,
    reg: &TypeRegistry,
    cfg: &BenchConfig,
) -> Result<TaskRun, BenchError> {
    let snippets = retrieve(index, &spec.task)?;
    let ev = Evaluator::new(ctx, reg);
    let runs: Vec<Run> = snippets.iter().map(|s| run_snippet(s, &ev)).collect();
    let chosen = DeletionConfig::ALL.iter().position(|c| *c == cfg.deletion).unwrap_or(0);
    let violations = runs
        .iter()
        .map(|r| r.variants.iter().filter(|(_, t)| !trace_ok(t)).count())
        .sum();

    let mut session = TaskSession::new(&spec.task, ctx.clone(), snippets.len());
    for (id, s) in snippets.iter().enumerate() {
        let (c, t) = &runs[id].variants[chosen];
        session.insert(ProcessedCandidate {
            id,
            source_answer: s.source_answer,
            block_index: s.block_index,
            answer_score: s.answer_score,
            initial_errors: runs[id].initial.error_count,
            trace: *t,
            candidate: c.clone(),
            passed_tests: 0,
            outcome: None,
        });
    }

    let mut counts = StageCounts {
        retrieved: snippets.len(),
        ..StageCounts::default()
    };
    for r in &runs {
        let t = &r.variants[chosen].1;
        counts.initial_compilable += usize::from(t.compilable[Stage::Retrieved as usize]);
        counts.after_integration += usize::from(t.compilable[Stage::Integrated as usize]);
        counts.after_fixes += usize::from(t.compilable[Stage::Fixed as usize]);
        counts.after_deletion += usize::from(t.compilable[Stage::Deleted as usize]);
        let c = &r.variants[chosen].0;
        counts.type_suggestible += usize::from(c.compiles() && suggest_types(&c.body).is_some());
    }

    let top_suggestion = session.suggest_types().first().map(|s| s.signature.display());
    let mut outcomes = BTreeMap::new();
    if let Some(sig) = &spec.signature {
        let err = |source| BenchError::Signature {
            task: spec.task.clone(),
            source,
        };
        let sig = sig.parse().map_err(err)?;
        let test = match &spec.test {
            Some(t) => test_from_statements(t),
            None => generate_test_skeleton(&sig).map_err(err)?,
        };
        let results = session.test_candidates(&test, &sig, None, reg, &cfg.budget).map_err(|e| BenchError::Malformed {
            line: 0,
            message: format!("{}: {e}", spec.task),
        })?;
        for o in results {
            let name = serde_json::to_value(o.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            *outcomes.entry(name).or_insert(0) += 1;
            counts.passing += usize::from(o.status == TestStatus::Passed);
        }
    }
    Ok(TaskRun {
        report: TaskReport {
            task: normalize_task(&spec.task),
            counts,
            testable: spec.signature.is_some(),
            top_suggestion,
            outcomes,
        },
        runs,
        violations,
    })
}

/// Exhaustive line-subset minimum against each deletion config, over the
/// distinct corpus snippets that still have errors when deletion starts.
pub fn oracle_stats(docs: &[CorpusDoc], ctx: &Context, reg: &TypeRegistry) -> OracleStats {
    let ev = Evaluator::new(ctx, reg);
    let snippets: Vec<RawSnippet> = docs.iter().flat_map(extract_snippets).collect();
    let mut texts: Vec<&str> = snippets.iter().map(|s| s.text.as_str()).collect();
    texts.sort_unstable();
    texts.dedup();
    let per_fixture: Vec<(usize, Vec<Candidate>)> = texts
        .par_iter()
        .filter_map(|text| {
            let mut trace = StageTrace::default();
            let fixed = integrate_and_fix(Candidate::retrieved(*text, &ev), &ev, &mut trace);
            if fixed.error_count == 0 {
                return None;
            }
            let floor = exhaustive_minimum(&fixed, &ev)?;
            let results = DeletionConfig::ALL
                .iter()
                .map(|&cfg| finish_deletion(fixed.clone(), &ev, cfg, &mut trace.clone()))
                .collect();
            Some((floor, results))
        })
        .collect();
    let rows = DeletionConfig::ALL
        .iter()
        .enumerate()
        .map(|(i, cfg)| {
            let mut row = OracleRow {
                config: cfg.to_string(),
                attains: 0,
                degenerate: 0,
                violations: 0,
                gap: 0,
            };
            for (floor, results) in &per_fixture {
                let c = &results[i];
                if c.is_degenerate() {
                    row.degenerate += 1;
                } else if c.error_count < *floor {
                    row.violations += 1;
                } else {
                    row.gap += c.error_count - floor;
                    row.attains += usize::from(c.error_count == *floor);
                }
            }
            row
        })
        .collect();
    OracleStats {
        max_lines: ORACLE_MAX_LINES,
        fixtures: per_fixture.len(),
        rows,
    }
}

/// Runs the whole evaluation in the empty class-and-main context.
pub fn run_eval(docs: &[CorpusDoc], tasks: &[TaskSpec], cfg: &BenchConfig) -> Result<EvalReport, BenchError> {
    let ctx = Context::harness();
    let reg = TypeRegistry::builtin();
    let index = build_index(docs.iter().cloned(), cfg.index)?;
    let retrieval_matrix = retrieval_matrix(docs, tasks)?;
    let runs: Vec<TaskRun> = tasks
        .par_iter()
        .map(|t| run_task(&index, t, &ctx, &reg, cfg))
        .collect::<Result<_, _>>()?;

    let all: Vec<&Run> = runs.iter().flat_map(|t| &t.runs).collect();
    let error_histogram = error_histogram(all.iter().map(|r| &r.initial));
    let deletion_variants = DeletionConfig::ALL
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let results = all.iter().map(|r| &r.variants[i].0);
            VariantRow {
                config: c.to_string(),
                compilable: results.clone().filter(|c| c.compiles()).count(),
                degenerate: results.clone().filter(|c| c.is_degenerate()).count(),
                remaining_errors: results.map(|c| c.error_count).sum(),
            }
        })
        .collect();
    let oracle = if tasks.is_empty() {
        OracleStats {
            max_lines: ORACLE_MAX_LINES,
            fixtures: 0,
            rows: DeletionConfig::ALL
                .iter()
                .map(|c| OracleRow {
                    config: c.to_string(),
                    attains: 0,
                    degenerate: 0,
                    violations: 0,
                    gap: 0,
                })
                .collect(),
        }
    } else {
        oracle_stats(docs, &ctx, &reg)
    };

    let mut counts = StageCounts::default();
    let mut violations = 0;
    for t in &runs {
        counts.add(&t.report.counts);
        violations += t.violations + usize::from(!t.report.counts.is_monotone());
    }
    let reports: Vec<TaskReport> = runs.into_iter().map(|t| t.report).collect();
    Ok(EvalReport {
        corpus_docs: docs.len(),
        index: cfg.index,
        deletion: cfg.deletion.to_string(),
        retrieval_matrix,
        totals: Totals {
            tasks: reports.len(),
            testable_tasks: reports.iter().filter(|t| t.testable).count(),
            counts,
            monotonicity_violations: violations,
        },
        tasks: reports,
        error_histogram,
        deletion_variants,
        oracle,
        reference: SCALE_REFERENCE,
    })
}

fn pct(a: usize, b: usize) -> String {
    if b == 0 {
        "-".into()
    } else {
        format!("{:.1}%", 100.0 * a as f64 / b as f64)
    }
}

/// Plain-text tables.
pub fn render_text(r: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "corpus docs: {}   tasks: {}   deletion: {}", r.corpus_docs, r.totals.tasks, r.deletion);
    let _ = writeln!(s, "\nretrieved snippets");
    let _ = writeln!(s, "{:<12}{:>8}{:>8}{:>8}", "", "none", "stem", "lemma");
    for (label, omit) in [("keep-stop", false), ("omit-stop", true)] {
        let _ = writeln!(
            s,
            "{label:<12}{:>8}{:>8}{:>8}",
            r.retrieval_matrix.get(omit, KeywordMode::None),
            r.retrieval_matrix.get(omit, KeywordMode::Stem),
            r.retrieval_matrix.get(omit, KeywordMode::Lemma)
        );
    }

    let _ = writeln!(s, "\ncompilable snippets per stage");
    let w = r.tasks.iter().map(|t| t.task.len()).max().unwrap_or(4).max(5);
    let _ = writeln!(
        s,
        "{:<w$}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}  top suggestion",
        "task", "retr", "init", "integ", "fixes", "del", "types", "pass"
    );
    let row = |s: &mut String, name: &str, c: &StageCounts, extra: &str| {
        let _ = writeln!(
            s,
            "{name:<w$}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}{:>6}  {extra}",
            c.retrieved,
            c.initial_compilable,
            c.after_integration,
            c.after_fixes,
            c.after_deletion,
            c.type_suggestible,
            c.passing
        );
    };
    for t in &r.tasks {
        let pass = if t.testable { "" } else { " (untested)" };
        row(&mut s, &t.task, &t.counts, &format!("{}{pass}", t.top_suggestion.as_deref().unwrap_or("-")));
    }
    row(&mut s, "total", &r.totals.counts, "");
    let c = &r.totals.counts;
    let _ = writeln!(
        s,
        "compilable share: initial {}  integration {}  fixes {}  deletion {}",
        pct(c.initial_compilable, c.retrieved),
        pct(c.after_integration, c.retrieved),
        pct(c.after_fixes, c.retrieved),
        pct(c.after_deletion, c.retrieved)
    );
    let _ = writeln!(
        s,
        "testable tasks: {}/{}   monotonicity violations: {}",
        r.totals.testable_tasks, r.totals.tasks, r.totals.monotonicity_violations
    );

    let _ = writeln!(s, "\ninitial errors by code");
    for h in &r.error_histogram {
        let _ = writeln!(s, "{:<24}{:>6}", h.code, h.count);
    }

    let _ = writeln!(s, "\ndeletion variants");
    let _ = writeln!(s, "{:<28}{:>11}{:>11}{:>8}", "config", "compilable", "degenerate", "errors");
    for v in &r.deletion_variants {
        let _ = writeln!(s, "{:<28}{:>11}{:>11}{:>8}", v.config, v.compilable, v.degenerate, v.remaining_errors);
    }

    let _ = writeln!(s, "\nexhaustive oracle ({} fixtures, <= {} lines)", r.oracle.fixtures, r.oracle.max_lines);
    let _ = writeln!(s, "{:<28}{:>8}{:>11}{:>11}{:>6}", "config", "attains", "degenerate", "violations", "gap");
    for o in &r.oracle.rows {
        let _ = writeln!(s, "{:<28}{:>8}{:>11}{:>11}{:>6}", o.config, o.attains, o.degenerate, o.violations, o.gap);
    }

    let f = &r.reference;
    let _ = writeln!(
        s,
        "\nfull-scale reference: retrieved {}, compilable {} -> {} -> {} -> {}, type-suggestible {}",
        f.retrieved, f.initial_compilable, f.after_integration, f.after_fixes, f.after_deletion, f.type_suggestible
    );
    s
}

/// Lines that differ between two renderings, as `-expected` / `+actual`.
pub fn golden_diff(expected: &str, actual: &str) -> Vec<String> {
    let (e, a): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    let mut out = Vec::new();
    for i in 0..e.len().max(a.len()) {
        match (e.get(i), a.get(i)) {
            (Some(x), Some(y)) if x == y => {}
            (x, y) => {
                if let Some(x) = x {
                    out.push(format!("{}: -{x}", i + 1));
                }
                if let Some(y) = y {
                    out.push(format!("{}: +{y}", i + 1));
                }
            }
        }
    }
    out
}
