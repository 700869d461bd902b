//! The `edgar-corpus` command line: download, extract, stats, train, nn and
//! eval subcommands sharing one optional TOML config file.
//!
//! Exit codes: 0 on success, 1 when the run finished but some inputs
//! failed (or a runtime error stopped it), 2 on configuration and usage
//! errors. Logs go to standard error; command results go to files, with a
//! short human-readable summary on standard output.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{
    DownloadSection, EvalSection, ExtractSection, NnSection, PipelineConfig, StatsSection, TrainSection,
};

/// Version line printed by `--version`.
pub const VERSION_LINE: &str = concat!(env!("CARGO_PKG_VERSION"), " (record schema 1)");

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "edgar-corpus", version = VERSION_LINE, about = "Build a 10-K corpus from SEC EDGAR and train word vectors on it")]
pub struct Cli {
    /// TOML file with one optional table per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch master indices and 10-K filings from EDGAR.
    Download(DownloadArgs),
    /// Clean downloaded filings and split them into item sections.
    Extract(ExtractArgs),
    /// Corpus summary over extracted records.
    Stats(StatsArgs),
    /// Train skip-gram word vectors on extracted records.
    Train(TrainArgs),
    /// Nearest neighbors of a word by cosine similarity.
    Nn(NnArgs),
    /// Hypernym classification with stratified cross-validation.
    Eval(EvalArgs),
}

#[derive(Debug, Args, Default)]
pub struct DownloadArgs {
    #[arg(long)]
    pub start_year: Option<i32>,
    #[arg(long)]
    pub end_year: Option<i32>,
    /// Comma-separated CIKs to keep; all companies when absent.
    #[arg(long, value_delimiter = ',')]
    pub ciks: Option<Vec<u64>>,
    /// Requests per second, at most 10.
    #[arg(long)]
    pub rate_limit: Option<u32>,
    /// Contact string sent to SEC, e.g. "Jane Doe jane@example.com".
    #[arg(long)]
    pub user_agent: Option<String>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub archive_base_url: Option<String>,
    /// Serve requests from a local mirror of the archive instead of HTTP.
    #[arg(long)]
    pub replay_dir: Option<PathBuf>,
    /// Also fetch 10-K405, 10-KSB, 10-KSB40, 10-KT and 10-K/A.
    #[arg(long)]
    pub include_variants: bool,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ExtractArgs {
    /// Output directory of `download`, or a directory of raw filings.
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Comma-separated item codes to fill, e.g. 1A,7; all when absent.
    #[arg(long)]
    pub items: Option<String>,
    #[arg(long)]
    pub strip_page_numbers: bool,
    #[arg(long)]
    pub strip_repeated_lines: bool,
}

#[derive(Debug, Args, Default)]
pub struct StatsArgs {
    /// Directory of `{year}.jsonl` record files.
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    /// Also write per-item coverage to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    /// Vector file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Maximum vocabulary size.
    #[arg(long)]
    pub vocab: Option<usize>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub initial_lr: Option<f64>,
    #[arg(long)]
    pub subsample_t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Single-threaded, bit-reproducible training.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct NnArgs {
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub query: String,
    #[arg(long)]
    pub k: Option<usize>,
    /// Keep the query's singular/plural form among the neighbors.
    #[arg(long)]
    pub keep_inflections: bool,
}

#[derive(Debug, Args, Default)]
pub struct EvalArgs {
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// JSONL file of {"term": ..., "label": ...} objects.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the full report as JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Inverse L2 regularization strength of the classifier.
    #[arg(long)]
    pub c: Option<f64>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_PARTIAL,
        }
    }
}

fn init_logging(quiet: bool) {
    let default = if quiet { "warn" } else { "info" };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default));
    // A second call (tests run several commands in one process) is a no-op.
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.quiet);
    let config = match &cli.config {
        Some(path) => match PipelineConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => PipelineConfig::default(),
    };
    let result = match cli.command {
        Command::Download(a) => commands::download(a, &config),
        Command::Extract(a) => commands::extract(a, &config),
        Command::Stats(a) => commands::stats(a, &config),
        Command::Train(a) => commands::train(a, &config),
        Command::Nn(a) => commands::nn(a, &config),
        Command::Eval(a) => commands::eval(a, &config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
