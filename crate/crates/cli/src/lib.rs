//! The `samksepa` command line.
//!
//! Each subcommand reads its declared inputs and writes only below the
//! output directory. A one-line summary goes to standard output, logs go to
//! standard error.

mod commands;
mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use samksepa_core::config::PipelineConfig;

pub use files::write_output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] samksepa_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "samksepa", version, about = "Sanskrit summarization corpus and evaluation toolkit")]
pub struct Cli {
    /// Flat key = value pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for shuffling (overrides the config; default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (overrides the config; default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the text inputs of a stage come from: explicit files forming one
/// source, or a source manifest.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input files, treated as one source.
    pub files: Vec<PathBuf>,
    /// Source manifest (`<name>.base_id`, `<name>.inputs`, ...).
    #[arg(long, conflicts_with = "files")]
    pub manifest: Option<PathBuf>,
    /// Source name for explicit files.
    #[arg(long, default_value = "input")]
    pub source: String,
    /// First paragraph ID for explicit files.
    #[arg(long, default_value_t = 100_000)]
    pub base_id: u64,
    /// The explicit files are not paragraph-numbered (one ID per file).
    #[arg(long)]
    pub no_paragraph_ids: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize raw text files, keeping blank-line paragraph breaks.
    Clean(InputArgs),
    /// Split sandhi with the word dictionary and the rule table.
    SplitSandhi {
        /// Rule table (defaults to the shipped table).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Word-specific split dictionary.
        #[arg(long)]
        dict: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Build the sentence corpus for language modelling and split it.
    BuildLm {
        #[command(flatten)]
        input: InputArgs,
        /// Train fraction (overrides train_ratio_lm).
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Build document-summary pairs and split them.
    BuildSum {
        /// Sentence corpus (default: <out>/lm/corpus.tsv).
        #[arg(long)]
        lm: Option<PathBuf>,
        /// Journal CSV with title, document and summary columns.
        #[arg(long)]
        journal: Option<PathBuf>,
        #[arg(long)]
        journal_base_id: Option<u64>,
        /// Train fraction (overrides train_ratio_sum).
        #[arg(long)]
        ratio: Option<f64>,
        /// Expected train size; a different computed size is logged.
        #[arg(long, requires = "expect_test")]
        expect_train: Option<usize>,
        #[arg(long, requires = "expect_train")]
        expect_test: Option<usize>,
    },
    /// Corpus, pair and assessment statistics.
    Stats {
        /// Sentence corpus (default: <out>/lm/corpus.tsv if present).
        #[arg(long)]
        lm: Option<PathBuf>,
        /// Pair CSV (default: <out>/sum/pairs.csv if present).
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// `pair_id,category` assessment file.
        #[arg(long)]
        assessments: Option<PathBuf>,
        /// Count novel n-grams with repeats instead of distinct n-grams.
        #[arg(long)]
        multiset: bool,
    },
    /// ROUGE-1, ROUGE-2 and ROUGE-L.
    Rouge {
        /// TSV with id, reference, hypothesis.
        #[arg(long, conflicts_with_all = ["reference", "hypothesis"])]
        pairs: Option<PathBuf>,
        /// TSV with id, text.
        #[arg(long = "ref", requires = "hypothesis")]
        reference: Option<PathBuf>,
        /// TSV with id, text.
        #[arg(long = "hyp", requires = "reference")]
        hypothesis: Option<PathBuf>,
        /// Also write per-pair scores.
        #[arg(long)]
        detail: bool,
    },
    /// Perplexity check, early stopping and fit labels for loss ledgers.
    Ledger {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        patience: u32,
        #[arg(long, default_value_t = 0.0)]
        min_delta: f64,
        /// Largest |TL - EL| still labelled converged.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Scaled-ranking counts and best-worst scores.
    Humaneval {
        /// `evaluator,system,quality,score` file.
        #[arg(long)]
        ratings: Option<PathBuf>,
        /// `evaluator,system,vote` file.
        #[arg(long)]
        votes: Option<PathBuf>,
        /// Lowest score counted as high.
        #[arg(long, default_value_t = 4)]
        threshold: u8,
    },
    /// clean, split-sandhi, build-lm, build-sum and stats in order.
    Pipeline,
}

/// Settings shared by all subcommands after merging config and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: PipelineConfig,
    pub out: PathBuf,
}

impl Settings {
    fn from_cli(cli: &Cli) -> CliResult<Self> {
        let mut config = match &cli.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        if let Some(out) = &cli.out {
            config.out = out.clone();
        }
        Ok(Settings {
            out: config.out.clone(),
            config,
        })
    }
}

/// Runs the command line, printing summaries to standard output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_output(args, &mut std::io::stdout().lock())
}

/// Like [`run`], with standard output replaced by `stdout`.
pub fn run_with_output<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("samksepa: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let settings = Settings::from_cli(cli)?;
    let summary = commands::dispatch(&cli.command, &settings, stdout)?;
    if summary.is_empty() {
        return Ok(());
    }
    writeln!(stdout, "{summary}").map_err(|e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}
