//! `eam` — registers, recognizes and retrieves digit images through an
//! entropic associative memory, and reproduces the four recognition and
//! retrieval experiments.
//!
//! Exit codes: 0 success, 1 usage, 2 data/format, 3 internal.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(eam_core::Error),
}

impl From<eam_core::Error> for CliError {
    fn from(e: eam_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use eam_core::Error::*;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Io(_) | Parse { .. } | Format { .. }) => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "eam", version, about = "Entropic associative memory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by data-consuming subcommands; every flag overrides the
/// matching config-file field.
#[derive(clap::Args, Clone, Debug, Default)]
struct CommonOpts {
    /// JSON run config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// IDX image file(s); repeat to concatenate (e.g. train then t10k)
    #[arg(long)]
    images: Vec<PathBuf>,
    /// IDX label file(s), parallel to --images
    #[arg(long)]
    labels: Vec<PathBuf>,
    /// Feature file produced by `extract` (instead of --images/--labels)
    #[arg(long)]
    features: Option<PathBuf>,
    /// Granularity exponent (number of rows is 2^m)
    #[arg(long)]
    m: Option<u32>,
    /// Granularity exponents to sweep, comma separated
    #[arg(long, value_delimiter = ',')]
    m_range: Option<Vec<u32>>,
    /// Fill percentages to sweep, comma separated
    #[arg(long, value_delimiter = ',')]
    fills: Option<Vec<u32>>,
    /// Folds to run, comma separated (0..9)
    #[arg(long, value_delimiter = ',')]
    folds: Option<Vec<usize>>,
    /// Run seed; required for anything randomized
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory or file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampler policy: triangular or identity
    #[arg(long)]
    sampler: Option<eam_core::SamplerPolicy>,
    /// Feature grid side; features per image is grid^2
    #[arg(long)]
    grid: Option<usize>,
    /// Padded frame side images are centered into
    #[arg(long)]
    pad: Option<usize>,
    /// Worker threads (default: all processors)
    #[arg(long)]
    jobs: Option<usize>,
    /// Cues per digit in experiment 4
    #[arg(long)]
    samples_per_digit: Option<usize>,
}

impl CommonOpts {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            images: self.images.clone(),
            labels: self.labels.clone(),
            features: self.features.clone(),
            m: self.m,
            m_range: self.m_range.clone(),
            fills: self.fills.clone(),
            folds: self.folds.clone(),
            seed: self.seed,
            out: self.out.clone(),
            sampler: self.sampler,
            grid: self.grid,
            pad: self.pad,
            jobs: self.jobs,
            samples_per_digit: self.samples_per_digit,
        };
        let merged = base.merged_with(flags);
        if let Some(jobs) = merged.jobs {
            // ignore the error if a pool is already installed
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global();
        }
        Ok(merged)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract block-average features from an image corpus into a feature file
    Extract(CommonOpts),
    /// Run one of the four experiments and write CSV/JSON reports
    Exp {
        /// Experiment number
        #[arg(value_parser = clap::value_parser!(u32).range(1..=4))]
        which: u32,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Register the remembered share of a fold and save the register bank
    Snapshot {
        /// Fold whose remembered share is registered
        #[arg(long, default_value_t = 0)]
        fold: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run the full input protocol, retrieval and output protocol on one image
    DemoRetrieve {
        /// Snapshot directory written by `snapshot`
        #[arg(long)]
        snapshot: PathBuf,
        /// Cue image (PGM, P5)
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Generate a synthetic labeled digit corpus as IDX files
    GenCorpus {
        /// Number of instances
        #[arg(long, default_value_t = 70_000)]
        count: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract(opts) => commands::extract(&opts.resolve()?),
        Command::Exp { which, opts } => commands::experiment(which, &opts.resolve()?),
        Command::Snapshot { fold, opts } => commands::snapshot(fold, &opts.resolve()?),
        Command::DemoRetrieve {
            snapshot,
            image,
            opts,
        } => commands::demo_retrieve(&snapshot, &image, &opts.resolve()?),
        Command::GenCorpus { count, opts } => commands::gen_corpus(count, &opts.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print and exit cleanly; real parse errors are usage
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
