//! Task to ranked candidates: retrieve, splice and check, repair, rank,
//! cycle, and re-rank after tests.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use snipfit_minij::{Budget, RunStatus, TypeRegistry};

use crate::corpus::{CorpusError, InvertedIndex, PostId, RawSnippet};
pub use crate::repair::{Candidate, DeletionConfig, Evaluator, PatchKind, PatchRecord, Stage, StageTrace};
use crate::repair::repair_traced;
pub use crate::splice::{Context, Cursor, SpliceError, Spliced};
use crate::testkit::{check_test, run_candidate_test, suggest_types, synthesize_function, SignatureError, TestCase, TypeSignature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Splice(#[from] SpliceError),
    #[error("the session has no candidates")]
    NoCandidates,
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("the test does not check against a stub snippet function ({0} errors)")]
    BadTest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[derive(Default)]
pub struct PipelineConfig {
    pub deletion: DeletionConfig,
    pub budget: Budget,
}


/// Ordering of the processed set. Degenerate bodies sort after everything
/// else with the same test count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankKey {
    pub passed_tests: usize,
    pub degenerate: bool,
    pub error_count: usize,
    pub retrieval_rank: usize,
    pub post_id: PostId,
}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = |r: &RankKey| (Reverse(r.passed_tests), r.degenerate, r.error_count, r.retrieval_rank, r.post_id);
        k(self).cmp(&k(other))
    }
}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestStatus {
    Passed,
    Failed,
    RuntimeError,
    Timeout,
    CompileError,
    /// No function of the signature could be built from the snippet.
    Untestable,
}

impl From<RunStatus> for TestStatus {
    fn from(s: RunStatus) -> Self {
        match s {
            RunStatus::Passed => TestStatus::Passed,
            RunStatus::Failed => TestStatus::Failed,
            RunStatus::RuntimeError => TestStatus::RuntimeError,
            RunStatus::Timeout => TestStatus::Timeout,
            RunStatus::CompileError => TestStatus::CompileError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub candidate: usize,
    pub status: TestStatus,
    pub detail: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessedCandidate {
    /// Position in retrieval order; unique within a session.
    pub id: usize,
    pub source_answer: PostId,
    pub block_index: usize,
    pub answer_score: i64,
    pub initial_errors: usize,
    pub trace: StageTrace,
    pub candidate: Candidate,
    pub passed_tests: usize,
    pub outcome: Option<TestOutcome>,
}

impl ProcessedCandidate {
    pub fn key(&self) -> RankKey {
        RankKey {
            passed_tests: self.passed_tests,
            degenerate: self.candidate.is_degenerate(),
            error_count: self.candidate.error_count,
            retrieval_rank: self.id,
            post_id: self.source_answer,
        }
    }
}

/// Checks and repairs one retrieved snippet in the given context.
pub fn process_snippet(id: usize, s: &RawSnippet, ev: &Evaluator, cfg: DeletionConfig) -> ProcessedCandidate {
    let start = Candidate::retrieved(s.text.clone(), ev);
    let initial_errors = start.error_count;
    let (candidate, trace) = repair_traced(start, ev, cfg);
    ProcessedCandidate {
        id,
        source_answer: s.source_answer,
        block_index: s.block_index,
        answer_score: s.answer_score,
        initial_errors,
        trace,
        candidate,
        passed_tests: 0,
        outcome: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Processing,
    Complete,
    NoResults,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Next,
    Prev,
}

#[derive(Debug, Clone)]
pub struct TaskSession {
    pub task: String,
    pub context: Context,
    pub candidates: Vec<ProcessedCandidate>,
    pub cursor_index: usize,
    pub tested: bool,
    pub status: SessionStatus,
    /// Snippets retrieved for the task.
    pub expected: usize,
    /// Arrival order of candidate ids.
    pub arrivals: Vec<usize>,
}

/// A trailing question mark ends a custom task.
pub fn normalize_task(task: &str) -> String {
    task.trim().trim_end_matches('?').trim_end().to_string()
}

impl TaskSession {
    pub fn new(task: &str, context: Context, expected: usize) -> Self {
        Self {
            task: normalize_task(task),
            context,
            candidates: Vec::new(),
            cursor_index: 0,
            tested: false,
            status: if expected == 0 {
                SessionStatus::NoResults
            } else {
                SessionStatus::Processing
            },
            expected,
            arrivals: Vec::new(),
        }
    }

    /// Adds a candidate at its rank. The presented candidate stays the same
    /// unless it was the best and a better one arrives.
    pub fn insert(&mut self, c: ProcessedCandidate) {
        let key = c.key();
        let at = self.candidates.partition_point(|x| x.key() <= key);
        if self.cursor_index > 0 && at <= self.cursor_index {
            self.cursor_index += 1;
        }
        self.arrivals.push(c.id);
        self.candidates.insert(at, c);
        if self.candidates.len() >= self.expected {
            self.status = SessionStatus::Complete;
        }
    }

    pub fn presented(&self) -> Option<&ProcessedCandidate> {
        self.candidates.get(self.cursor_index)
    }

    /// The user's file with the presented candidate inserted.
    pub fn preview(&self) -> Option<String> {
        self.presented()
            .map(|p| self.context.splice(&p.candidate.imports, &p.candidate.body).text().to_string())
    }

    pub fn cycle(&mut self, direction: Direction) -> Result<&ProcessedCandidate, PipelineError> {
        let n = self.candidates.len();
        if n == 0 {
            return Err(PipelineError::NoCandidates);
        }
        self.cursor_index = match direction {
            Direction::Next => (self.cursor_index + 1) % n,
            Direction::Prev => (self.cursor_index + n - 1) % n,
        };
        Ok(&self.candidates[self.cursor_index])
    }

    fn resort(&mut self) {
        self.candidates.sort_by_key(ProcessedCandidate::key);
        self.cursor_index = 0;
    }

    /// Distinct signatures suggested by compilable candidates, most common first.
    pub fn suggest_types(&self) -> Vec<SuggestedSignature> {
        let mut counts: Vec<SuggestedSignature> = Vec::new();
        for p in self.candidates.iter().filter(|p| p.candidate.compiles()) {
            if let Some(sig) = suggest_types(&p.candidate.body) {
                match counts.iter_mut().find(|s| s.signature == sig) {
                    Some(s) => s.candidates.push(p.id),
                    None => counts.push(SuggestedSignature {
                        signature: sig,
                        candidates: vec![p.id],
                    }),
                }
            }
        }
        counts.sort_by_key(|s| Reverse(s.candidates.len()));
        counts
    }

    /// Runs the test on compilable candidates (the first `limit` in rank
    /// order) and moves passing ones above the rest.
    pub fn test_candidates(
        &mut self,
        test: &TestCase,
        sig: &TypeSignature,
        limit: Option<usize>,
        registry: &TypeRegistry,
        budget: &Budget,
    ) -> Result<Vec<TestOutcome>, PipelineError> {
        let errors = check_test(test, sig, registry)?;
        if errors > 0 {
            return Err(PipelineError::BadTest(errors));
        }
        let targets: Vec<(usize, Vec<String>, String)> = self
            .candidates
            .iter()
            .filter(|p| p.candidate.compiles())
            .take(limit.unwrap_or(usize::MAX))
            .map(|p| (p.id, p.candidate.imports.clone(), p.candidate.body.clone()))
            .collect();
        let outcomes: BTreeMap<usize, TestOutcome> = targets
            .par_iter()
            .map(|(id, imports, body)| {
                let outcome = match synthesize_function(imports, body, sig, registry) {
                    None => TestOutcome {
                        candidate: *id,
                        status: TestStatus::Untestable,
                        detail: format!("no function {} can be built", sig.display()),
                        elapsed_ms: 0,
                    },
                    Some(f) => {
                        let r = run_candidate_test(&f, test, registry, budget);
                        TestOutcome {
                            candidate: *id,
                            status: r.status.into(),
                            detail: r.detail,
                            elapsed_ms: r.elapsed_ms,
                        }
                    }
                };
                (*id, outcome)
            })
            .collect();
        for p in &mut self.candidates {
            p.outcome = outcomes.get(&p.id).cloned();
            p.passed_tests = usize::from(p.outcome.as_ref().is_some_and(|o| o.status == TestStatus::Passed));
        }
        self.tested = true;
        self.resort();
        Ok(outcomes.into_values().collect())
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            task: self.task.clone(),
            status: self.status,
            expected: self.expected,
            processed: self.candidates.len(),
            cursor_index: self.cursor_index,
            tested: self.tested,
            context: self.context.text().to_string(),
            cursor: self.context.cursor,
            preview: self.preview(),
            candidates: self.candidates.iter().enumerate().map(|(rank, p)| CandidateView::of(rank, p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestedSignature {
    pub signature: TypeSignature,
    pub candidates: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    pub id: usize,
    pub rank: usize,
    pub source_answer: PostId,
    pub block_index: usize,
    pub answer_score: i64,
    pub initial_errors: usize,
    pub error_count: usize,
    pub degenerate: bool,
    pub stage: Stage,
    pub imports: Vec<String>,
    pub body: String,
    pub original: String,
    pub patches: Vec<PatchRecord>,
    pub patch_summary: String,
    pub deleted_lines: Vec<usize>,
    pub passed_tests: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<TestOutcome>,
}

/// `declare_var x1, delete_line x2`
pub fn patch_summary(patches: &[PatchRecord]) -> String {
    let mut counts: Vec<(PatchKind, usize)> = Vec::new();
    for p in patches {
        match counts.iter_mut().find(|(k, _)| *k == p.kind) {
            Some((_, n)) => *n += 1,
            None => counts.push((p.kind, 1)),
        }
    }
    counts
        .iter()
        .map(|(k, n)| {
            let name = serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            format!("{name} x{n}")
        })
        .collect::<Vec<_>>()
        .join(", ")
}

impl CandidateView {
    fn of(rank: usize, p: &ProcessedCandidate) -> Self {
        let c = &p.candidate;
        Self {
            id: p.id,
            rank,
            source_answer: p.source_answer,
            block_index: p.block_index,
            answer_score: p.answer_score,
            initial_errors: p.initial_errors,
            error_count: c.error_count,
            degenerate: c.is_degenerate(),
            stage: c.stage,
            imports: c.imports.clone(),
            body: c.body.clone(),
            original: c.original.clone(),
            patches: c.patches.clone(),
            patch_summary: patch_summary(&c.patches),
            deleted_lines: c.deleted_lines.iter().copied().collect(),
            passed_tests: p.passed_tests,
            outcome: p.outcome.clone(),
        }
    }
}

/// Serializable state of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub task: String,
    pub status: SessionStatus,
    pub expected: usize,
    pub processed: usize,
    pub cursor_index: usize,
    pub tested: bool,
    pub context: String,
    pub cursor: Cursor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preview: Option<String>,
    pub candidates: Vec<CandidateView>,
}

/// Retrieval, repair and ranking over one index.
#[derive(Debug, Clone)]
pub struct Engine {
    pub index: InvertedIndex,
    pub registry: TypeRegistry,
    pub config: PipelineConfig,
}

impl Engine {
    pub fn new(index: InvertedIndex, config: PipelineConfig) -> Self {
        Self {
            index,
            registry: TypeRegistry::builtin(),
            config,
        }
    }

    pub fn retrieve(&self, task: &str) -> Result<Vec<RawSnippet>, PipelineError> {
        Ok(self.index.query(&normalize_task(task))?)
    }

    /// Starts a session; candidates are added by [`Engine::process_streaming`].
    pub fn open_session(&self, task: &str, context: Context) -> Result<(TaskSession, Vec<RawSnippet>), PipelineError> {
        let snippets = self.retrieve(task)?;
        Ok((TaskSession::new(task, context, snippets.len()), snippets))
    }

    /// Processes snippets in parallel, handing each result to `sink` as soon
    /// as it is ready.
    pub fn process_streaming(&self, context: &Context, snippets: &[RawSnippet], sink: &(dyn Fn(ProcessedCandidate) + Sync)) {
        let ev = Evaluator::new(context, &self.registry);
        snippets
            .par_iter()
            .enumerate()
            .for_each(|(id, s)| sink(process_snippet(id, s, &ev, self.config.deletion)));
    }

    /// Blocking: the whole processed set, ranked.
    pub fn process_task(&self, task: &str, context: Context) -> Result<TaskSession, PipelineError> {
        let (mut session, snippets) = self.open_session(task, context)?;
        let ev = Evaluator::new(&session.context, &self.registry);
        let done: Vec<ProcessedCandidate> = snippets
            .par_iter()
            .enumerate()
            .map(|(id, s)| process_snippet(id, s, &ev, self.config.deletion))
            .collect();
        for c in done {
            session.insert(c);
        }
        Ok(session)
    }
}
