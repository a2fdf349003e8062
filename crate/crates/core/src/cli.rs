//! Command-line surface: argument parsing, validated run configuration and
//! the `run` driver shared by the binary and the tests.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dist::RngStream;
use crate::error::{Error, Result};
use crate::model::{ErrorFamily, PairDataset, PriorFamily, DEFAULT_NU};
use crate::report::{self, CsvTable, GaussianityReport, JsonLines, PairReport, SummaryRecord};
use crate::search::{aggregate_ordering, estimate_direction, gaussianity_check, GridSpec, PairOutcome};
use crate::synth::{run_experiment, GenConfig, SourcePolicy};

#[derive(Debug, Parser)]
#[command(name = "mixlingam", version, about = "Pairwise causal direction under latent confounding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the causal direction of column pairs in a CSV file.
    Estimate(DataArgs),
    /// Run the synthetic recovery experiment.
    Simulate(SimulateArgs),
    /// Compare Laplace and Gaussian error fits on column pairs.
    CheckGaussian(DataArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Two column names, `A,B`.
    #[arg(long, value_delimiter = ',', conflicts_with = "all_pairs", required_unless_present = "all_pairs")]
    pub pair: Option<Vec<String>>,
    /// Every unordered pair of numeric columns.
    #[arg(long)]
    pub all_pairs: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = SourceArg::Catalog)]
    pub sources: SourceArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Monte Carlo draws per grid cell.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = PriorArg::T)]
    pub prior: PriorArg,
    #[arg(long, value_enum, default_value_t = ErrorsArg::Laplace)]
    pub errors: ErrorsArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reduced grid and sample count.
    #[arg(long)]
    pub fast: bool,
    /// Share random streams between the two directions.
    #[arg(long)]
    pub crn: bool,
    /// Include wall-clock times in machine output.
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    T,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ErrorsArg {
    Laplace,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Catalog,
    Laplace,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairSelection {
    Pair(String, String),
    AllPairs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Estimate { input: PathBuf, pairs: PairSelection },
    CheckGaussian { input: PathBuf, pairs: PairSelection },
    Simulate { trials: usize, gen: GenConfig },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Estimate { .. } => "estimate",
            Task::CheckGaussian { .. } => "check-gaussian",
            Task::Simulate { .. } => "simulate",
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub spec: GridSpec,
    pub seed: u64,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (task, common) = match cli.command {
            Command::Estimate(a) => {
                let pairs = selection(&a)?;
                (Task::Estimate { input: a.input, pairs }, a.common)
            }
            Command::CheckGaussian(a) => {
                let pairs = selection(&a)?;
                (Task::CheckGaussian { input: a.input, pairs }, a.common)
            }
            Command::Simulate(a) => {
                let sources = match a.sources {
                    SourceArg::Catalog => SourcePolicy::Catalog,
                    SourceArg::Laplace => SourcePolicy::Laplace,
                    SourceArg::Gaussian => SourcePolicy::Gaussian,
                };
                let gen = GenConfig { n: a.n, q: a.q, sources, ..GenConfig::default() };
                (Task::Simulate { trials: a.trials, gen }, a.common)
            }
        };
        let mut spec = if common.fast { GridSpec::fast() } else { GridSpec::default() };
        if let Some(s) = common.samples {
            spec.samples = s;
        }
        spec.prior = match common.prior {
            PriorArg::T => PriorFamily::StudentT { nu: DEFAULT_NU },
            PriorArg::Gaussian => PriorFamily::Gaussian,
        };
        spec.errors = match common.errors {
            ErrorsArg::Laplace => ErrorFamily::Laplace,
            ErrorsArg::Gaussian => ErrorFamily::Gaussian,
        };
        if common.crn {
            spec.streams = crate::marginal::StreamMode::Common;
        }
        let config = Self {
            task,
            spec,
            seed: common.seed,
            format: common.format,
            threads: common.threads,
            timing: common.timing,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.threads == Some(0) {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        match &self.task {
            Task::Simulate { trials, gen } => {
                if *trials == 0 {
                    return Err(Error::invalid("--trials must be at least 1"));
                }
                gen.validate()
            }
            Task::Estimate { pairs, .. } | Task::CheckGaussian { pairs, .. } => match pairs {
                PairSelection::Pair(a, b) if a == b => Err(Error::invalid("--pair needs two different columns")),
                _ => Ok(()),
            },
        }
    }
}

fn selection(a: &DataArgs) -> Result<PairSelection> {
    match (&a.pair, a.all_pairs) {
        (Some(p), false) if p.len() == 2 => Ok(PairSelection::Pair(p[0].clone(), p[1].clone())),
        (None, true) => Ok(PairSelection::AllPairs),
        _ => Err(Error::invalid("give either --pair A,B or --all-pairs")),
    }
}

/// Seed for the `k`-th analyzed pair.
pub fn pair_seed(seed: u64, k: usize) -> u64 {
    RngStream::new(seed, k as u64).derive(1).seed
}

#[derive(Serialize)]
struct Header<'a> {
    spec: &'a GridSpec,
    canonical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<&'a GenConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
}

/// Runs one command, writing the complete report to `out` only when every
/// analysis succeeded.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    config.validate()?;
    let mut buf = Vec::new();
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))?;
            pool.install(|| dispatch(config, &mut buf))?;
        }
        None => dispatch(config, &mut buf)?,
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn dispatch(config: &RunConfig, out: &mut Vec<u8>) -> Result<()> {
    match &config.task {
        Task::Estimate { input, pairs } => estimate(config, input, pairs, out),
        Task::CheckGaussian { input, pairs } => check_gaussian(config, input, pairs, out),
        Task::Simulate { trials, gen } => simulate(config, *trials, gen, out),
    }
}

fn load_pairs(input: &PathBuf, pairs: &PairSelection) -> Result<Vec<(PairDataset, usize)>> {
    let table = CsvTable::read(input)?;
    let names: Vec<(String, String)> = match pairs {
        PairSelection::Pair(a, b) => vec![(a.clone(), b.clone())],
        PairSelection::AllPairs => {
            let numeric: Vec<&String> = table.headers().iter().filter(|h| table.column(h).is_ok()).collect();
            if numeric.len() < 2 {
                return Err(Error::invalid("--all-pairs needs at least two numeric columns"));
            }
            let mut v = Vec::new();
            for i in 0..numeric.len() {
                for j in i + 1..numeric.len() {
                    v.push((numeric[i].clone(), numeric[j].clone()));
                }
            }
            v
        }
    };
    names
        .into_iter()
        .map(|(a, b)| {
            let ing = table.pair(&a, &b)?;
            let rejected = ing.rejected;
            Ok((ing.into_pair()?, rejected))
        })
        .collect()
}

fn header<'a>(
    config: &'a RunConfig,
    input: Option<&PathBuf>,
    generator: Option<&'a GenConfig>,
    trials: Option<usize>,
) -> Header<'a> {
    Header {
        spec: &config.spec,
        canonical: config.spec.is_canonical(),
        input: input.map(|p| p.display().to_string()),
        generator,
        trials,
    }
}

fn estimate(config: &RunConfig, input: &PathBuf, pairs: &PairSelection, out: &mut Vec<u8>) -> Result<()> {
    let datasets = load_pairs(input, pairs)?;
    let mut reports = Vec::with_capacity(datasets.len());
    let mut outcomes = Vec::with_capacity(datasets.len());
    for (k, (data, rejected)) in datasets.iter().enumerate() {
        let start = Instant::now();
        let est = estimate_direction(data, &config.spec, pair_seed(config.seed, k))?;
        let mut rep = PairReport::new(data, &est, *rejected);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if config.timing || config.format == OutputFormat::Table {
            rep.wall_ms = Some(ms);
        }
        outcomes.push(PairOutcome::from_estimate(data.labels().clone(), &est));
        reports.push(rep);
    }
    let ordering = match pairs {
        PairSelection::AllPairs => Some(aggregate_ordering(&outcomes)?),
        PairSelection::Pair(..) => None,
    };
    match config.format {
        OutputFormat::Jsonl => {
            let mut w = JsonLines::new(out, "estimate", config.seed);
            w.emit("header", &header(config, Some(input), None, None))?;
            for r in &reports {
                w.emit("pair", r)?;
            }
            if let Some(o) = &ordering {
                w.emit("ordering", o)?;
            }
        }
        OutputFormat::Table => {
            write_banner(out, config)?;
            report::write_pair_table(out, &reports)?;
            if let Some(o) = &ordering {
                report::write_ordering_table(out, o)?;
            }
        }
    }
    Ok(())
}

fn check_gaussian(config: &RunConfig, input: &PathBuf, pairs: &PairSelection, out: &mut Vec<u8>) -> Result<()> {
    let datasets = load_pairs(input, pairs)?;
    let mut reports = Vec::with_capacity(datasets.len());
    for (k, (data, rejected)) in datasets.iter().enumerate() {
        let check = gaussianity_check(data, &config.spec, pair_seed(config.seed, k))?;
        reports.push(GaussianityReport { labels: data.labels().clone(), check, n: data.n(), rejected_rows: *rejected });
    }
    match config.format {
        OutputFormat::Jsonl => {
            let mut w = JsonLines::new(out, "check-gaussian", config.seed);
            w.emit("header", &header(config, Some(input), None, None))?;
            for r in &reports {
                w.emit("gaussianity", r)?;
            }
        }
        OutputFormat::Table => {
            write_banner(out, config)?;
            report::write_gaussianity_table(out, &reports)?;
        }
    }
    Ok(())
}

fn simulate(config: &RunConfig, trials: usize, gen: &GenConfig, out: &mut Vec<u8>) -> Result<()> {
    let start = Instant::now();
    let result = run_experiment(trials, gen, &config.spec, config.seed)?;
    let summary = SummaryRecord::from(&result);
    match config.format {
        OutputFormat::Jsonl => {
            let mut w = JsonLines::new(out, "simulate", config.seed);
            w.emit("header", &header(config, None, Some(gen), Some(trials)))?;
            for r in &result.records {
                w.emit("trial", r)?;
            }
            w.emit("summary", &summary)?;
            if config.timing {
                w.emit("timing", &serde_json::json!({ "wall_ms": start.elapsed().as_secs_f64() * 1e3 }))?;
            }
        }
        OutputFormat::Table => {
            write_banner(out, config)?;
            writeln!(out, "n={} q={} trials={}", gen.n, gen.q, trials)?;
            report::write_trial_table(out, &result.records)?;
            report::write_summary_table(out, &summary)?;
            writeln!(out, "wall clock: {:.1} s", start.elapsed().as_secs_f64())?;
        }
    }
    Ok(())
}

fn write_banner(out: &mut Vec<u8>, config: &RunConfig) -> Result<()> {
    let s = &config.spec;
    writeln!(
        out,
        "{} | prior={} errors={:?} samples={} seed={}{}",
        config.task.name(),
        match s.prior {
            PriorFamily::StudentT { nu } => format!("t{nu}"),
            PriorFamily::Gaussian => "gaussian".into(),
        },
        s.errors,
        s.samples,
        config.seed,
        if s.is_canonical() { "" } else { " (non-canonical settings)" }
    )?;
    Ok(())
}
