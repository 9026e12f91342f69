//! Command-line front-end.
//!
//! Exit codes:
//! - `0`: success (or inconsistencies found without `--fail-on-inconsistency`)
//! - `1`: the tool failed (bad flags, unreadable or malformed input, I/O)
//! - `2`: `--fail-on-inconsistency` was given and inconsistencies were found

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::bench::{run_benchmark, BenchResult, DEFAULT_REPETITIONS};
use crate::graph::{ElementKind, Graph};
use crate::ingest::{generate_synthetic, load_csv, load_jsonl, write_jsonl, SyntheticSpec};
use crate::inspector::{inspect, InspectConfig, StderrProgress, DEFAULT_CONCURRENCY};
use crate::report::{find_inconsistencies, summarize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "graph-inspect",
    version,
    about = "Profile every property type in a property graph"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile node properties per label.
    InspectNodes(InspectArgs),
    /// Profile relationship properties per relationship type.
    InspectRels(InspectArgs),
    /// Generate a synthetic graph with injected type faults.
    Generate(GenerateArgs),
    /// Time full inspections at several concurrency levels.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Nodes file (typed JSONL).
    #[arg(long, value_name = "PATH")]
    pub nodes: Option<PathBuf>,
    /// Relationships file (typed JSONL).
    #[arg(long, value_name = "PATH", requires = "nodes")]
    pub rels: Option<PathBuf>,
    /// Node CSV files.
    #[arg(long, value_name = "PATH", num_args = 1.., conflicts_with_all = ["nodes", "rels"])]
    pub csv_nodes: Vec<PathBuf>,
    /// Relationship CSV files.
    #[arg(long, value_name = "PATH", num_args = 1.., requires = "csv_nodes")]
    pub csv_rels: Vec<PathBuf>,
}

impl InputArgs {
    fn has_relationships(&self) -> bool {
        self.rels.is_some() || !self.csv_rels.is_empty()
    }

    fn load(&self) -> Result<Graph> {
        if let Some(nodes) = &self.nodes {
            return Ok(load_jsonl(nodes, self.rels.as_deref())?);
        }
        if !self.csv_nodes.is_empty() {
            return Ok(load_csv(&self.csv_nodes, &self.csv_rels)?);
        }
        bail!("no input graph: pass --nodes or --csv-nodes")
    }
}

fn positive() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::new().range(1..)
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Scan batches on worker threads.
    #[arg(long)]
    pub parallel: bool,
    /// Worker threads when --parallel is set.
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY, value_parser = positive())]
    pub concurrency: usize,
    /// Inspect only the first N elements (0 = all).
    #[arg(long, default_value_t = 0)]
    pub limit: usize,
    /// Elements per batch (0 = automatic).
    #[arg(long, default_value_t = 0)]
    pub batch_size: usize,
    /// Print one progress line per batch to stderr.
    #[arg(long)]
    pub debug: bool,
}

impl From<&ConfigArgs> for InspectConfig {
    fn from(a: &ConfigArgs) -> Self {
        InspectConfig {
            parallel: a.parallel,
            concurrency: a.concurrency,
            limit: a.limit,
            batch_size: a.batch_size,
            debug: a.debug,
        }
    }
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Report destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Exit with status 2 when any property has more than one type.
    #[arg(long)]
    pub fail_on_inconsistency: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator spec (JSON).
    #[arg(long, value_name = "PATH")]
    pub spec: PathBuf,
    /// Overrides the seed in the spec.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub out_nodes: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out_rels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated concurrency levels for the parallel runs.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8", value_parser = positive())]
    pub concurrencies: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS, value_parser = positive())]
    pub repetitions: usize,
    /// CSV destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::InspectNodes(args) => run_inspect(ElementKind::Nodes, &args),
        Command::InspectRels(args) => run_inspect(ElementKind::Relationships, &args),
        Command::Generate(args) => run_generate(&args),
        Command::Bench(args) => run_bench(&args),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", p.display()))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .context("cannot write to stdout")
        }
    }
}

fn run_inspect(kind: ElementKind, args: &InspectArgs) -> Result<i32> {
    let graph = args.input.load()?;
    let config = InspectConfig::from(&args.config);
    let report = inspect(&graph, kind, &config, &StderrProgress);
    write_output(args.output.as_deref(), report.to_json().as_bytes())?;

    let found = find_inconsistencies(&report);
    eprintln!("summary kind={kind} {}", summarize(&report));
    for finding in &found {
        eprintln!("inconsistent {finding}");
    }
    if args.fail_on_inconsistency && !found.is_empty() {
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(EXIT_OK)
}

fn run_generate(args: &GenerateArgs) -> Result<i32> {
    let file =
        File::open(&args.spec).with_context(|| format!("cannot read {}", args.spec.display()))?;
    let mut spec: SyntheticSpec = serde_json::from_reader(io::BufReader::new(file))
        .with_context(|| format!("{}: invalid generator spec", args.spec.display()))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let (graph, ledger) = generate_synthetic(&spec)?;

    let mut nodes = create(&args.out_nodes)?;
    let mut rels = args.out_rels.as_deref().map(create).transpose()?;
    write_jsonl(&graph, &mut nodes, rels.as_mut()).context("cannot write generated graph")?;
    nodes.flush().context("cannot write generated nodes")?;
    if let Some(r) = rels.as_mut() {
        r.flush().context("cannot write generated relationships")?;
    }
    eprintln!(
        "generated nodes={} relationships={} faults={}",
        graph.node_count(),
        graph.relationship_count(),
        ledger.len()
    );
    Ok(EXIT_OK)
}

fn run_bench(args: &BenchArgs) -> Result<i32> {
    let graph = args.input.load()?;
    let mut kinds = vec![ElementKind::Nodes];
    if args.input.has_relationships() {
        kinds.push(ElementKind::Relationships);
    }
    let mut result = BenchResult::default();
    for kind in kinds {
        let part = run_benchmark(&graph, kind, &args.concurrencies, args.repetitions)?;
        result.rows.extend(part.rows);
    }
    for m in result.means() {
        eprintln!(
            "bench kind={} mode={} concurrency={} mean_ms={:.3}",
            m.kind, m.mode, m.concurrency, m.mean_ms
        );
    }
    match &args.csv {
        Some(path) => result.write_csv(path)?,
        None => result.to_csv(io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}
