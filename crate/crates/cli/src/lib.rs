//! The `mdgi` command line.
//!
//! Exit status is 0 on success, 1 when any input of a batch failed (the
//! others are still processed and written) and 2 on usage or fatal errors.

/// `println!` that ignores a closed stdout, so output files are still
/// written when the reader goes away.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

pub mod commands;
pub mod config;
pub mod format;
pub mod input;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{FileConfig, RunConfig, RunFlags};

#[derive(Debug, Parser)]
#[command(name = "mdgi", version, about = "Granulometric roughness indices for elevation models")]
pub struct Cli {
    /// TOML file with defaults for the run flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pattern spectra and indices per model and structuring element.
    Spectrum(RunFlags),
    /// Normalized indices and order-statistic features, one row per model.
    Features {
        #[command(flatten)]
        run: RunFlags,
        /// CSV with `id` and `label` columns joined onto the features.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Compares spectra from openings with spectra from run tables.
    OracleCheck {
        #[command(flatten)]
        run: RunFlags,
        /// Perturbs the opening spectra so that every check fails.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Fits a depth-capped decision tree to a features CSV.
    TrainTree {
        features: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, default_value_t = 2)]
        max_depth: usize,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Applies a trained tree to a features CSV.
    Classify {
        tree: PathBuf,
        features: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Writes the example models and their equivalence families.
    GenFixtures {
        #[arg(long, short, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, message: String },
    Data(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

/// What a command reports back: how many inputs failed.
pub struct Summary {
    pub failures: usize,
}

fn run_config(config: &Option<PathBuf>, flags: RunFlags) -> Result<RunConfig, CliError> {
    let file = match config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(file, flags)
}

pub fn execute(cli: Cli) -> Result<Summary, CliError> {
    match cli.command {
        Command::Spectrum(flags) => commands::spectrum::run(&run_config(&cli.config, flags)?),
        Command::Features { run, labels } => commands::features::run(&run_config(&cli.config, run)?, labels.as_deref()),
        Command::OracleCheck { run, inject_fault } => {
            commands::oracle::run(&run_config(&cli.config, run)?, inject_fault)
        }
        Command::TrainTree {
            features,
            label_column,
            max_depth,
            out,
        } => commands::tree::train(&features, &label_column, max_depth, &out),
        Command::Classify {
            tree,
            features,
            label_column,
            out,
        } => commands::tree::classify(&tree, &features, &label_column, &out),
        Command::GenFixtures { out } => commands::fixtures::run(&out),
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(s) if s.failures == 0 => 0,
        Ok(s) => {
            eprintln!("{} input(s) failed", s.failures);
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Creates `dir` and writes `name` inside it.
pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub(crate) fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
