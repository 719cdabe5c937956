use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use snipfit_client::{Client, ClientError};
use snipfit_core::api::{CreateSession, CycleRequest, SessionResponse};
use snipfit_core::bench::{golden_diff, read_tasks, render_text, run_eval, BenchConfig};
use snipfit_core::corpus::{build_index, read_corpus, IndexConfig, InvertedIndex, KeywordMode};
use snipfit_core::pipeline::{Cursor, Direction, Engine, PipelineConfig, SessionStatus};
use snipfit_core::repair::{Acceptance, DeletionConfig, Loops, Order};
use snipfit_minij::Budget;
use snipfit_service::{AppState, Settings, DEFAULT_PORT};

const EXIT_NO_RESULTS: u8 = 3;
const EXIT_GOLDEN_DIFF: u8 = 1;

#[derive(Parser)]
#[command(name = "snipfit", version, about = "Find, repair and test code snippets for a task")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from a corpus.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        keywords: KeywordArgs,
    },
    /// Run one task and print the ranked snippets.
    Task(TaskArgs),
    /// Serve the HTTP API on loopback.
    Serve {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Idle minutes before a session is dropped.
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        ttl_minutes: u64,
    },
    /// Evaluate every task and compare the report with a golden copy.
    Bench {
        #[arg(long, default_value = "data/corpus.jsonl")]
        corpus: PathBuf,
        #[arg(long, default_value = "data/tasks.jsonl")]
        tasks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory holding report.json and report.txt to diff against.
        #[arg(long, default_value = "data/golden")]
        golden: PathBuf,
        #[command(flatten)]
        keywords: KeywordArgs,
        #[command(flatten)]
        deletion: DeletionArgs,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        timeout_ms: u64,
    },
}

#[derive(Args, Clone, Copy)]
struct KeywordArgs {
    #[arg(long, default_value = "lemma")]
    mode: KeywordMode,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    omit_stop: bool,
}

impl KeywordArgs {
    fn config(self) -> IndexConfig {
        IndexConfig {
            mode: self.mode,
            omit_stop: self.omit_stop,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct DeletionArgs {
    #[arg(long, default_value = "bottom_up")]
    deletion_order: Order,
    #[arg(long, default_value = "multi")]
    deletion_loops: Loops,
    #[arg(long, default_value = "non_strict")]
    deletion_accept: Acceptance,
}

impl DeletionArgs {
    fn config(self) -> DeletionConfig {
        DeletionConfig {
            order: self.deletion_order,
            loops: self.deletion_loops,
            acceptance: self.deletion_accept,
        }
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Corpus to index at startup. Ignored when --index is given.
    #[arg(long, default_value = "data/corpus.jsonl")]
    corpus: PathBuf,
    #[arg(long)]
    index: Option<PathBuf>,
    /// Keyword processing; with --index, only checked against the file.
    #[arg(long)]
    mode: Option<KeywordMode>,
    #[arg(long, action = clap::ArgAction::Set)]
    omit_stop: Option<bool>,
    #[command(flatten)]
    deletion: DeletionArgs,
    /// Wall-clock budget of one test run.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_ms: u64,
}

#[derive(Args)]
struct TaskArgs {
    /// Task text; a trailing question mark is ignored.
    task: String,
    /// File to splice into; defaults to an empty main method.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Insertion point as line:col, 1-based.
    #[arg(long, value_parser = parse_cursor)]
    at: Option<Cursor>,
    /// Number of cycle steps before printing.
    #[arg(long, default_value_t = 0)]
    cycle: usize,
    /// Print the session JSON.
    #[arg(long)]
    json: bool,
    /// Use a running service instead of an embedded one.
    #[arg(long)]
    server: Option<String>,
    #[command(flatten)]
    engine: EngineArgs,
}

fn parse_cursor(s: &str) -> Result<Cursor, String> {
    let (l, c) = s.split_once(':').ok_or("expected line:col")?;
    let line = l.parse().map_err(|_| format!("bad line {l:?}"))?;
    let col = c.parse().map_err(|_| format!("bad column {c:?}"))?;
    Ok(Cursor { line, col })
}

/// Resolved settings shared by `task` and `serve`.
struct Config {
    index: InvertedIndex,
    pipeline: PipelineConfig,
}

impl EngineArgs {
    fn load(&self) -> Result<Config> {
        let index = match &self.index {
            Some(p) => {
                let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                let idx = InvertedIndex::read_from(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))?;
                if self.mode.is_some_and(|m| m != idx.config.mode) || self.omit_stop.is_some_and(|o| o != idx.config.omit_stop) {
                    bail!(
                        "{} was built with mode {:?} and omit_stop {}; rebuild it or drop the flags",
                        p.display(),
                        idx.config.mode,
                        idx.config.omit_stop
                    );
                }
                idx
            }
            None => {
                let cfg = IndexConfig {
                    mode: self.mode.unwrap_or_default(),
                    omit_stop: self.omit_stop.unwrap_or(true),
                };
                build_index(load_corpus(&self.corpus)?, cfg)?
            }
        };
        Ok(Config {
            index,
            pipeline: PipelineConfig {
                deletion: self.deletion.config(),
                budget: Budget::with_wall_ms(self.timeout_ms),
            },
        })
    }
}

fn load_corpus(path: &Path) -> Result<Vec<snipfit_core::corpus::CorpusDoc>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_corpus(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn engine(cfg: Config) -> Engine {
    Engine::new(cfg.index, cfg.pipeline)
}

fn cmd_index(corpus: &Path, out: &Path, keywords: KeywordArgs) -> Result<ExitCode> {
    let docs = load_corpus(corpus)?;
    if docs.is_empty() {
        eprintln!("warning: {} holds no documents; writing an empty index", corpus.display());
    }
    let index = build_index(docs, keywords.config())?;
    let mut w = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
    index.write_to(&mut w)?;
    w.flush()?;
    let s = index.stats();
    println!(
        "{} docs ({} questions, {} answers), {} keywords, {} postings, {} snippets -> {}",
        s.docs,
        s.questions,
        s.answers,
        s.keywords,
        s.postings,
        s.snippets,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

async fn start_embedded(cfg: Config) -> Result<String> {
    let state = AppState::new(engine(cfg), Settings::default());
    let (addr, server) = snipfit_service::bind(state, snipfit_service::loopback(0)).await?;
    tokio::spawn(server);
    Ok(format!("http://{addr}"))
}

async fn cmd_task(args: TaskArgs) -> Result<ExitCode> {
    let file = match &args.file {
        Some(p) => Some(fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    if file.is_some() && args.at.is_none() {
        bail!("--file needs --at line:col");
    }
    let base = match &args.server {
        Some(url) => url.clone(),
        None => start_embedded(args.engine.load()?).await?,
    };
    let client = Client::new(base);
    let req = CreateSession {
        task: args.task.clone(),
        file,
        cursor: args.at,
        wait: true,
    };
    let mut resp = match client.create_session(&req).await {
        Ok(r) => r,
        Err(ClientError::Api { body, .. }) if body.fields.iter().any(|f| f.field == "task") => {
            eprintln!("no results: {}", body.error);
            return Ok(ExitCode::from(EXIT_NO_RESULTS));
        }
        Err(e) => return Err(e.into()),
    };
    if resp.session.status == SessionStatus::NoResults {
        if args.json {
            println!("{}", serde_json::to_string_pretty(&resp.session)?);
        } else {
            eprintln!("no results for {:?}", resp.session.task);
        }
        return Ok(ExitCode::from(EXIT_NO_RESULTS));
    }
    if args.cycle > 0 {
        let step = CycleRequest {
            direction: Direction::Next,
            steps: args.cycle,
        };
        resp = client.cycle(&resp.id, &step).await?;
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&resp.session)?);
    } else {
        print!("{}", render_session(&resp));
    }
    Ok(ExitCode::SUCCESS)
}

fn render_session(r: &SessionResponse) -> String {
    let s = &r.session;
    let mut out = String::new();
    let shown = &s.candidates[s.cursor_index];
    out.push_str(&format!(
        "task: {}\ncandidate {} of {} (answer {}, {} errors)\n\n",
        s.task,
        s.cursor_index + 1,
        s.candidates.len(),
        shown.source_answer,
        shown.error_count
    ));
    out.push_str(s.preview.as_deref().unwrap_or(""));
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str(&format!("\n{:>4}  {:>6}  {:>6}  {:>6}  {:<10}  patches\n", "rank", "answer", "before", "after", "stage"));
    for c in &s.candidates {
        let mark = if c.rank == s.cursor_index { '>' } else { ' ' };
        out.push_str(&format!(
            "{mark}{:>3}  {:>6}  {:>6}  {:>6}  {:<10}  {}{}\n",
            c.rank + 1,
            c.source_answer,
            c.initial_errors,
            c.error_count,
            format!("{:?}", c.stage).to_lowercase(),
            if c.patch_summary.is_empty() { "-" } else { &c.patch_summary },
            if c.degenerate { " (empty)" } else { "" }
        ));
    }
    out
}

async fn cmd_serve(engine_args: EngineArgs, port: u16, ttl_minutes: u64) -> Result<ExitCode> {
    let cfg = engine_args.load()?;
    let settings = Settings {
        ttl: Duration::from_secs(ttl_minutes * 60),
        ..Settings::default()
    };
    let state = AppState::new(engine(cfg), settings);
    let addr: SocketAddr = snipfit_service::loopback(port);
    let (local, server) = snipfit_service::bind(state, addr).await?;
    eprintln!("listening on http://{local}");
    server.await?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    corpus: &Path,
    tasks: &Path,
    out: &Path,
    golden: &Path,
    keywords: KeywordArgs,
    deletion: DeletionArgs,
    timeout_ms: u64,
) -> Result<ExitCode> {
    let docs = load_corpus(corpus)?;
    let f = File::open(tasks).with_context(|| format!("opening {}", tasks.display()))?;
    let tasks = read_tasks(BufReader::new(f)).with_context(|| format!("reading {}", tasks.display()))?;
    let cfg = BenchConfig {
        index: keywords.config(),
        deletion: deletion.config(),
        budget: Budget::with_wall_ms(timeout_ms),
    };
    let report = run_eval(&docs, &tasks, &cfg)?;
    fs::create_dir_all(out)?;
    let files = [("report.json", report.to_json()), ("report.txt", render_text(&report))];
    let mut differs = false;
    for (name, text) in &files {
        fs::write(out.join(name), text)?;
        match fs::read_to_string(golden.join(name)) {
            Ok(expected) => {
                let diff = golden_diff(&expected, text);
                if !diff.is_empty() {
                    differs = true;
                    eprintln!("{name} differs from {}:", golden.join(name).display());
                    for d in diff.iter().take(40) {
                        eprintln!("  {d}");
                    }
                }
            }
            Err(_) => {
                differs = true;
                eprintln!("no golden {} to compare with", golden.join(name).display());
            }
        }
    }
    print!("{}", files[1].1);
    Ok(if differs { ExitCode::from(EXIT_GOLDEN_DIFF) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Index { corpus, out, keywords } => cmd_index(&corpus, &out, keywords),
        Cmd::Bench {
            corpus,
            tasks,
            out,
            golden,
            keywords,
            deletion,
            timeout_ms,
        } => cmd_bench(&corpus, &tasks, &out, &golden, keywords, deletion, timeout_ms),
        Cmd::Task(args) => runtime().and_then(|rt| rt.block_on(cmd_task(args))),
        Cmd::Serve {
            engine,
            port,
            ttl_minutes,
        } => runtime().and_then(|rt| rt.block_on(cmd_serve(engine, port, ttl_minutes))),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}
