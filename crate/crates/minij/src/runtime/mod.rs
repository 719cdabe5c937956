//! Sandboxed execution of checked Mini-J programs. Every run is bounded by a
//! step budget and a wall-clock limit and happens on a dedicated thread.

mod interp;
pub mod value;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::frontend::ast::{Item, Member};
use crate::frontend::{check, parse, parse_snippet, Diagnostic, SourceUnit, TypeRegistry};
use interp::Interp;
pub use value::{structural_eq, Value, FLOAT_TOLERANCE};

const STACK_SIZE: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_steps: u64,
    #[serde(with = "millis")]
    pub wall: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_steps: 10_000_000,
            wall: Duration::from_millis(2000),
        }
    }
}

impl Budget {
    pub fn with_wall_ms(ms: u64) -> Self {
        Self {
            wall: Duration::from_millis(ms),
            ..Self::default()
        }
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Fault {
    #[error("java.lang.ArithmeticException: {0}")]
    Arithmetic(String),
    #[error("java.lang.NumberFormatException: {0}")]
    NumberFormat(String),
    #[error("java.lang.ArrayIndexOutOfBoundsException: Index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: i64, len: usize },
    #[error("java.lang.StringIndexOutOfBoundsException: {0}")]
    StringIndex(String),
    #[error("java.lang.NullPointerException: {0}")]
    NullPointer(String),
    #[error("java.lang.NegativeArraySizeException: {0}")]
    NegativeArraySize(i64),
    #[error("java.util.NoSuchElementException: {0}")]
    NoSuchElement(String),
    #[error("java.lang.ClassCastException: {0}")]
    ClassCast(String),
    #[error("java.util.regex.PatternSyntaxException: {0}")]
    PatternSyntax(String),
    #[error("java.lang.StackOverflowError")]
    StackOverflow,
    #[error("java.lang.OutOfMemoryError: {0}")]
    OutOfMemory(String),
    #[error("java.lang.AssertionError: {0}")]
    AssertionFailed(String),
    #[error("execution budget exhausted after {steps} steps")]
    Timeout { steps: u64 },
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Passed,
    Failed,
    RuntimeError,
    Timeout,
    CompileError,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Passed => "passed",
            RunStatus::Failed => "failed",
            RunStatus::RuntimeError => "runtime_error",
            RunStatus::Timeout => "timeout",
            RunStatus::CompileError => "compile_error",
        }
    }

    fn of(fault: &Fault) -> Self {
        match fault {
            Fault::AssertionFailed(_) => RunStatus::Failed,
            Fault::Timeout { .. } => RunStatus::Timeout,
            _ => RunStatus::RuntimeError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub detail: String,
    pub elapsed_ms: u64,
    pub steps: u64,
    /// Captured standard output, truncated.
    pub output: String,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: Value,
    pub steps: u64,
    pub output: String,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum EvalError {
    #[error("program does not compile ({} errors)", .0.len())]
    NotCompilable(Vec<Diagnostic>),
    #[error("no method {0} with the given arity")]
    NoEntry(String),
    #[error("{fault}")]
    Fault { fault: Fault, steps: u64, output: String },
}

fn on_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .name("minij-eval".into())
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawn evaluation thread")
        .join()
        .unwrap_or_else(|p| std::panic::resume_unwind(p))
}

/// Runs `entry` (`name` or `Class.name`) of a compilable program.
pub fn evaluate(
    program: &SourceUnit,
    registry: &TypeRegistry,
    entry: &str,
    args: Vec<Value>,
    budget: &Budget,
) -> Result<Evaluation, EvalError> {
    let result = check(program, registry);
    if result.error_count > 0 {
        return Err(EvalError::NotCompilable(result.diagnostics));
    }
    let program = program.clone();
    let entry = entry.to_string();
    let budget = *budget;
    on_big_stack(move || {
        let (cu, _) = parse(&program);
        let mut it = Interp::new(&cu, budget);
        let (class, name) = match entry.rsplit_once('.') {
            Some((c, n)) => (Some(c), n),
            None => (None, entry.as_str()),
        };
        let Some((class, m)) = it.find_entry(class, name, args.len()) else {
            return Err(EvalError::NoEntry(entry.clone()));
        };
        let res = it.init_statics().and_then(|_| it.invoke(class, m, args));
        match res {
            Ok(value) => Ok(Evaluation {
                value,
                steps: it.steps,
                output: it.output,
            }),
            Err(fault) => Err(EvalError::Fault {
                fault,
                steps: it.steps,
                output: it.output,
            }),
        }
    })
}

fn class_bodies(unit: &SourceUnit) -> Option<String> {
    let (cu, _) = parse_snippet(unit);
    let mut out = String::new();
    let mut any = false;
    for item in &cu.items {
        if let Item::Class(c) = item {
            let end = c.close.as_ref().map_or(unit.text().len(), |s| s.start);
            out.push_str(&unit.text()[c.header.end..end]);
            out.push('\n');
            any = true;
        }
    }
    any.then_some(out)
}

/// Places the test methods inside the last class of the function unit.
pub fn combine_test(function_unit: &SourceUnit, test_unit: &SourceUnit) -> SourceUnit {
    let members = class_bodies(test_unit).unwrap_or_else(|| test_unit.text().to_string());
    let text = function_unit.text();
    let (cu, _) = parse(function_unit);
    let close = cu.items.iter().rev().find_map(|i| match i {
        Item::Class(c) => c.close.clone(),
        _ => None,
    });
    let combined = match close {
        Some(close) => format!("{}\n{}\n{}", &text[..close.start], members.trim_end(), &text[close.start..]),
        None => format!("{text}\npublic class SnippetTest {{\n{}\n}}\n", members.trim_end()),
    };
    SourceUnit::new(combined, function_unit.origin())
}

/// Names of test methods: annotated with `@Test` or named `test*`.
pub fn test_method_names(test_unit: &SourceUnit) -> Vec<String> {
    let (cu, _) = parse_snippet(test_unit);
    let mut names = Vec::new();
    let mut push = |m: &crate::frontend::ast::MethodDecl| {
        if m.params.is_empty() && (m.is_test() || m.name.name.starts_with("test")) {
            names.push(m.name.name.clone());
        }
    };
    for item in &cu.items {
        match item {
            Item::Method(m) => push(m),
            Item::Class(c) => {
                for member in &c.members {
                    if let Member::Method(m) = member {
                        push(m);
                    }
                }
            }
            _ => {}
        }
    }
    names
}

/// Compiles the test together with the function and runs every test method
/// under one shared budget.
pub fn run_test(
    function_unit: &SourceUnit,
    test_unit: &SourceUnit,
    registry: &TypeRegistry,
    budget: &Budget,
) -> RunOutcome {
    let started = Instant::now();
    let combined = combine_test(function_unit, test_unit);
    let result = check(&combined, registry);
    let outcome = |status, detail: String, steps, output| RunOutcome {
        status,
        detail,
        elapsed_ms: started.elapsed().as_millis() as u64,
        steps,
        output,
    };
    if result.error_count > 0 {
        let detail = result
            .diagnostics
            .iter()
            .take(5)
            .map(|d| format!("{}: {}", d.code.name(), d.message))
            .collect::<Vec<_>>()
            .join("; ");
        return outcome(RunStatus::CompileError, detail, 0, String::new());
    }
    let names = test_method_names(test_unit);
    if names.is_empty() {
        return outcome(RunStatus::CompileError, "no test methods found".into(), 0, String::new());
    }
    let budget = *budget;
    let (status, detail, steps, output) = on_big_stack(move || {
        let (cu, _) = parse(&combined);
        let mut it = Interp::new(&cu, budget);
        it.start_clock();
        if let Err(f) = it.init_statics() {
            return (RunStatus::of(&f), f.to_string(), it.steps, it.output);
        }
        for name in &names {
            let Some((class, m)) = it.find_entry(None, name, 0) else {
                return (RunStatus::CompileError, format!("test {name} not found"), it.steps, it.output);
            };
            if let Err(f) = it.invoke(class, m, Vec::new()) {
                let status = RunStatus::of(&f);
                return (status, format!("{name}: {f}"), it.steps, it.output);
            }
        }
        let detail = format!("{} test(s) passed", names.len());
        (RunStatus::Passed, detail, it.steps, it.output)
    });
    outcome(status, detail, steps, output)
}
