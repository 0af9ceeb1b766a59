//! The `impact` command line. Each subcommand is a thin wrapper over the
//! library modules; failures print one JSON object on stderr and map to a
//! fixed exit code.

mod commands;
mod corpus;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::config::{AnalysisConfig, ConfigError};
use crate::predictor::{Mode, PredictorError};
use crate::session_store::SessionError;
use crate::stats_report::StatsError;

pub use commands::*;
pub use corpus::{discover, load_corpus, Corpus, CorpusIndex, IndexEntry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Io(_) => EXIT_IO,
            Self::Usage(_) => EXIT_USAGE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation(_) => "validation",
            Self::Io(_) => "io",
            Self::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Out {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error serializes")
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Io { .. } => Self::Io(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Self::Io(e.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<PredictorError> for CliError {
    fn from(e: PredictorError) -> Self {
        match e {
            PredictorError::UnknownFeature(_) | PredictorError::InvalidParameter(_) => Self::Usage(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Io(m) => Self::Io(m),
            other => Self::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "impact", version, about = "Session analytics for human-avatar conversations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for session-level parallelism (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for the synthetic data generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover and ingest every bundle under a corpus root; prints the index.
    Ingest {
        root: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Validate every bundle; unusable bundles are reported, not fatal.
    Validate {
        root: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Extract the feature table of all usable sessions.
    Features {
        root: PathBuf,
        #[arg(long, default_value = "full")]
        mode: Mode,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write `session_id,success` labels from the surveys.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Fit a linear SVM on a feature table.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value = "full")]
        mode: Mode,
        #[arg(long)]
        c: Option<f64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Leave-one-out evaluation per feature mode.
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Comma-separated; defaults to all four modes.
        #[arg(long, value_delimiter = ',')]
        modes: Vec<Mode>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
        /// Per-mode wall-clock timings. Not deterministic, so kept apart.
        #[arg(long)]
        timing_out: Option<PathBuf>,
    },
    /// Cohort statistics and plot-ready files.
    Report {
        root: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Evaluation JSON whose ROC curves are included.
        #[arg(long)]
        evaluation: Option<PathBuf>,
    },
    /// Validate a self-assessment stream and store it in a bundle.
    MergeAnnotations {
        root: PathBuf,
        #[arg(long)]
        session: String,
        /// Exported `self.jsonl`.
        #[arg(long = "self")]
        self_file: PathBuf,
    },
    /// Generate synthetic data.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// A corpus of session bundles with a planted success signal.
    Cohort {
        out: PathBuf,
        #[arg(long, default_value_t = 51)]
        participants: usize,
        /// 0 = no signal, 1 = strong.
        #[arg(long, default_value_t = 1.0)]
        signal: f64,
        #[arg(long, default_value_t = 4.0)]
        duration: f64,
    },
    /// A 53-column feature table with near-duplicate columns.
    Features {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        labels_out: PathBuf,
    },
}

/// Config file (if any) over defaults, validated.
pub fn resolve_config(path: Option<&Path>) -> Result<AnalysisConfig, CliError> {
    let cfg = match path {
        Some(p) => AnalysisConfig::from_file(p)?,
        None => AnalysisConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli.global.config.as_deref())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = cli.global.seed;
    pool.install(|| match cli.command {
        Command::Ingest { root, out } => cmd_ingest(&root, &cfg, out.as_deref()),
        Command::Validate { root, out } => cmd_validate(&root, &cfg, out.as_deref()).map(|_| ()),
        Command::Features {
            root,
            mode,
            out,
            labels_out,
        } => cmd_features(&root, &cfg, mode, &out, labels_out.as_deref()),
        Command::Train {
            features,
            labels,
            mode,
            c,
            out,
        } => {
            let mut cfg = cfg;
            if let Some(c) = c {
                cfg.svm.c = c;
            }
            cfg.validate()?;
            cmd_train(&features, &labels, &cfg, mode, &out)
        }
        Command::Evaluate {
            features,
            labels,
            modes,
            c,
            top_k,
            out,
            timing_out,
        } => {
            let mut cfg = cfg;
            if let Some(c) = c {
                cfg.svm.c = c;
            }
            if let Some(k) = top_k {
                cfg.svm.top_k = k;
            }
            cfg.validate()?;
            let modes = if modes.is_empty() { Mode::ALL.to_vec() } else { modes };
            cmd_evaluate(&features, &labels, &cfg, &modes, &out, timing_out.as_deref())
        }
        Command::Report { root, out, evaluation } => cmd_report(&root, &cfg, &out, evaluation.as_deref()),
        Command::MergeAnnotations {
            root,
            session,
            self_file,
        } => cmd_merge_annotations(&root, &cfg, &session, &self_file).map(|_| ()),
        Command::Synth(SynthCommand::Cohort {
            out,
            participants,
            signal,
            duration,
        }) => cmd_synth_cohort(&out, participants, signal, duration, seed),
        Command::Synth(SynthCommand::Features { out, labels_out }) => cmd_synth_features(&out, &labels_out, seed),
    })
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code. Errors are printed to stderr as one JSON line.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            let err = CliError::Usage(first);
            eprintln!("{}", err.to_json());
            log::debug!("{e}");
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
