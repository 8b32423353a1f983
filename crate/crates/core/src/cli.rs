//! Command-line front end.
//!
//! Exit status: 0 success, 1 other error, 2 every attempt failed,
//! 3 infeasible configuration, 4 budget exceeded. Failures also print a
//! one-line JSON record `{"error": {"code", "exit", "message"}}` on stderr
//! (and to `--record` when given).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::bipartite::{bip_generate_with_retries, BipConfig, BipError, DegreeSequence, DEFAULT_CYCLE_BUDGET};
use crate::counting::{enumerate_bipartite, exact_enumerate_with, janson_log_count, CountError, DEFAULT_ENUMERATION_BUDGET};
use crate::graph::{girth, Graph, GraphError, Length};
use crate::sampler::{generate_with_retries, regime_advisory, theorem_regime, time_steps, Params, SamplerError};
use crate::seed::seeded;
use crate::validation::{
    uniformity_campaign, BipartiteRejection, BipartiteSequential, GroundTruth, Instance, RejectionBaseline,
    SequentialSampler, ValidationError,
};

/// Overrides the default enumeration budget when `--budget` is absent.
pub const BUDGET_ENV: &str = "GIRTHGEN_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "girthgen", version, about = "Random graphs with girth greater than k")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Edgelist,
    Alist,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one graph on n vertices with m edges and girth > k.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        retries: usize,
        #[arg(long, value_enum, default_value_t = Format::Edgelist)]
        format: Format,
        /// Graph file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// JSON run record.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Generate a bipartite graph with the degrees in a two-line file.
    GenBip {
        #[arg(long)]
        degrees: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        retries: usize,
        #[arg(long, value_enum, default_value_t = Format::Alist)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
        /// Cap on cycle sequences enumerated per candidate pair.
        #[arg(long, default_value_t = DEFAULT_CYCLE_BUDGET)]
        cycle_budget: u64,
    },
    /// Estimate the number of such graphs, optionally with the exact count.
    Estimate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Count all such graphs exhaustively.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        budget: Option<u64>,
        /// Write every member as an edge list, separated by blank lines.
        #[arg(long)]
        list: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Paired uniformity campaign against the exact rejection baseline.
    Validate {
        #[arg(long, required_unless_present = "degrees")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "degrees")]
        m: Option<usize>,
        #[arg(long)]
        k: usize,
        /// Validate the bipartite sampler on this degree file instead.
        #[arg(long, conflicts_with_all = ["n", "m"])]
        degrees: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_attempts: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mean per-step time across a ladder of n at fixed k.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Steps timed per size; defaults to all m steps.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Edgelist)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Infeasible(String),
    #[error("all {attempts} attempts failed (last failure at step {last_failed_at})")]
    FailExhausted { attempts: usize, last_failed_at: usize },
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Infeasible(_) => "infeasible-config",
            CliError::FailExhausted { .. } => "fail-exhausted",
            CliError::Budget(_) => "budget-exceeded",
            CliError::Other(_) => "error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::FailExhausted { .. } => 2,
            CliError::Infeasible(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": {"code": self.code(), "exit": self.exit_code(), "message": self.to_string()}})
    }
}

impl From<SamplerError> for CliError {
    fn from(e: SamplerError) -> Self {
        match e {
            SamplerError::RetriesExhausted { attempts, last_failed_at } => {
                CliError::FailExhausted { attempts, last_failed_at }
            }
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<BipError> for CliError {
    fn from(e: BipError) -> Self {
        match e {
            BipError::RetriesExhausted { attempts, last_failed_at } => {
                CliError::FailExhausted { attempts, last_failed_at }
            }
            BipError::EnumerationCap { .. } => CliError::Budget(e.to_string()),
            BipError::Graph(g) => CliError::Other(g.to_string()),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::BudgetExceeded { .. } | CountError::AttemptsExhausted(_) => CliError::Budget(e.to_string()),
            CountError::InvalidParams(_) => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Reads a degree file: left degrees on the first line, right degrees on
/// the second.
pub fn parse_degree_file(path: &Path) -> Result<DegreeSequence, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    DegreeSequence::parse(&text).map_err(|e| match e {
        BipError::Graph(g) => CliError::Other(format!("{}: {g}", path.display())),
        other => CliError::Infeasible(other.to_string()),
    })
}

fn budget(flag: Option<u64>) -> Result<u64, CliError> {
    let b = match flag {
        Some(b) => b,
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Infeasible(format!("{BUDGET_ENV}={v:?} is not a positive integer")))?,
            Err(_) => DEFAULT_ENUMERATION_BUDGET,
        },
    };
    if b == 0 {
        return Err(CliError::Infeasible("budget must be positive".into()));
    }
    Ok(b)
}

/// JSON record of one generation command.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub attempts: usize,
    /// Step at which the last unsuccessful attempt stopped.
    pub failed_at: Option<usize>,
    pub failed_steps: Vec<usize>,
    pub wall_time_ms: f64,
    pub girth: Length,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
}

fn graph_record(
    g: &Graph,
    params: (usize, usize, usize),
    seed: u64,
    attempts: usize,
    failed_steps: Vec<usize>,
    started: Instant,
) -> RunRecord {
    RunRecord {
        n: params.0,
        m: params.1,
        k: params.2,
        seed,
        attempts,
        failed_at: failed_steps.last().copied(),
        failed_steps,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        girth: girth(g),
        edges: None,
    }
}

/// Runs one parsed command.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen { n, m, k, seed, retries, format, output, record } => {
            Params::new(n, m, k)?;
            if format == Format::Alist {
                return Err(CliError::Infeasible("alist output is only available for gen-bip".into()));
            }
            if let Some(msg) = regime_advisory(n, m, k) {
                eprintln!("warning: {msg}");
            }
            let started = Instant::now();
            let mut rng = seeded(seed);
            let report = generate_with_retries(n, m, k, &mut rng, retries)?;
            let mut rec = graph_record(&report.graph, (n, m, k), seed, report.attempts, report.failed_at, started);
            if format == Format::Json {
                rec.edges = Some(report.graph.edges().collect());
                emit(output.as_deref(), &to_json_line(&rec))?;
            } else {
                emit(output.as_deref(), &report.graph.to_edge_list_string())?;
            }
            if let Some(p) = record {
                write_atomic(&p, to_json_line(&rec).as_bytes())?;
            }
            Ok(())
        }
        Command::GenBip { degrees, k, seed, retries, format, output, record, cycle_budget } => {
            let deg = parse_degree_file(&degrees)?;
            let config = BipConfig::new(k)?.with_cycle_budget(cycle_budget);
            if !deg.is_graphical() {
                eprintln!("warning: degree sequence fails the Gale-Ryser condition; no simple realization exists");
            }
            let started = Instant::now();
            let mut rng = seeded(seed);
            let report = bip_generate_with_retries(&deg, config, &mut rng, retries)?;
            let g = &report.graph;
            let mut rec = graph_record(
                g.graph(),
                (g.left_count() + g.right_count(), deg.edges(), k),
                seed,
                report.attempts,
                report.failed_at.clone(),
                started,
            );
            let body = match format {
                Format::Alist => g.to_alist_string(),
                Format::Edgelist => g.graph().to_edge_list_string(),
                Format::Json => {
                    rec.edges = Some(g.edges());
                    to_json_line(&json!({"left": g.left_count(), "right": g.right_count(), "record": rec}))
                }
            };
            emit(output.as_deref(), &body)?;
            if let Some(p) = record {
                write_atomic(&p, to_json_line(&rec).as_bytes())?;
            }
            Ok(())
        }
        Command::Estimate { n, m, k, exact, budget: b, output } => {
            Params::new(n, m, k)?;
            let est = janson_log_count(n, m, k);
            let exact_count = if exact {
                Some(exact_enumerate_with(n, m, k, budget(b)?, |_| {})?.count.to_string())
            } else {
                None
            };
            let regime = theorem_regime(n, m, k);
            let body = json!({
                "n": n, "m": m, "k": k,
                "log_count_estimate": est.log_count,
                "log_binom": est.log_binom,
                "correction": est.correction,
                "exact_count": exact_count,
                "alpha": finite_or_null(est.alpha),
                "regime_ok": est.regime_ok,
                "sampler_regime_ok": est.sampler_regime_ok && regime.in_regime,
            });
            emit(output.as_deref(), &to_json_line(&body))
        }
        Command::Enumerate { n, m, k, budget: b, list, output } => {
            Params::new(n, m, k)?;
            let mut listing = String::new();
            let result = exact_enumerate_with(n, m, k, budget(b)?, |edges| {
                if list.is_some() {
                    let g = Graph::from_edges(n, edges.iter().copied()).expect("enumerated edges are valid");
                    listing.push_str(&g.to_edge_list_string());
                    listing.push('\n');
                }
            })?;
            if let Some(p) = list {
                write_atomic(&p, listing.as_bytes())?;
            }
            let body = json!({
                "n": n, "m": m, "k": k,
                "count": result.count.to_string(),
                "subsets": result.subsets.to_string(),
            });
            emit(output.as_deref(), &to_json_line(&body))
        }
        Command::Validate { n, m, k, degrees, samples, seed, budget: b, max_attempts, output } => {
            let b = budget(b)?;
            let report = match degrees {
                Some(path) => {
                    let deg = parse_degree_file(&path)?;
                    let config = BipConfig::new(k)?;
                    let members = enumerate_bipartite(&deg, k, b)?;
                    let truth = GroundTruth::from_graphs(members.iter().map(|g| g.graph()));
                    if truth.is_empty() {
                        return Err(CliError::Infeasible("no realization with the requested girth".into()));
                    }
                    uniformity_campaign(
                        Instance::Bipartite { left: deg.left().to_vec(), right: deg.right().to_vec(), k },
                        &BipartiteSequential { degrees: deg.clone(), config },
                        &BipartiteRejection { degrees: deg.clone(), k, max_attempts },
                        &truth,
                        samples,
                        seed,
                    )?
                }
                None => {
                    let (n, m) = (n.expect("required by clap"), m.expect("required by clap"));
                    let params = Params::new(n, m, k)?;
                    if let Some(msg) = regime_advisory(n, m, k) {
                        eprintln!("warning: {msg}");
                    }
                    let mut keys = Vec::new();
                    exact_enumerate_with(n, m, k, b, |edges| {
                        let g = Graph::from_edges(n, edges.iter().copied()).expect("enumerated edges are valid");
                        keys.push(crate::validation::canonical_key(&g));
                    })?;
                    let truth = GroundTruth::from_keys(keys);
                    if truth.is_empty() {
                        return Err(CliError::Infeasible("no graph with the requested girth".into()));
                    }
                    uniformity_campaign(
                        Instance::Simple { n, m, k },
                        &SequentialSampler(params),
                        &RejectionBaseline { params, max_attempts },
                        &truth,
                        samples,
                        seed,
                    )?
                }
            };
            emit(output.as_deref(), &to_json_line(&report))
        }
        Command::Bench { ns, k, steps, seed, format, output } => {
            let mut rows = Vec::new();
            for (idx, &n) in ns.iter().enumerate() {
                let m = theorem_regime(n, 0, k).m_max.min(crate::graph::pair_count(n));
                let params = Params::new(n, m, k)?;
                let timing = time_steps(params, steps.unwrap_or(m), &mut crate::seed::run_rng(seed, 0, idx as u64));
                rows.push(timing);
            }
            let body = match format {
                Format::Json => to_json_line(&rows),
                _ => {
                    let mut s = String::from("n\tm\tk\tsteps\tmean_step_ms\tratio\tgirth\n");
                    for (i, r) in rows.iter().enumerate() {
                        let ratio = if i == 0 {
                            "-".to_string()
                        } else {
                            format!("{:.2}", r.mean_step_ms / rows[i - 1].mean_step_ms)
                        };
                        s.push_str(&format!(
                            "{}\t{}\t{}\t{}\t{:.3}\t{}\t{}\n",
                            r.n, r.m, r.k, r.steps, r.mean_step_ms, ratio, r.girth
                        ));
                    }
                    s
                }
            };
            emit(output.as_deref(), &body)
        }
    }
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn record_path(command: &Command) -> Option<PathBuf> {
    match command {
        Command::Gen { record, .. } | Command::GenBip { record, .. } => record.clone(),
        _ => None,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let record = record_path(&cli.command);
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let line = e.to_json().to_string();
            eprintln!("{line}");
            if let Some(p) = record {
                let _ = write_atomic(&p, format!("{line}\n").as_bytes());
            }
            e.exit_code()
        }
    }
}
