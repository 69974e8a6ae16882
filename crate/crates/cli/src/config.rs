//! Run configuration: an optional TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use mdgi_core::dem::Quantization;
use mdgi_core::morphology::NamedSe;
use serde::Deserialize;

use crate::CliError;

/// Keys accepted in the config file; every one is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub inputs: Option<Vec<String>>,
    pub elements: Option<Vec<String>>,
    pub step: Option<f64>,
    pub datum: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub oracle_check: Option<bool>,
    pub max_work: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by the commands that read elevation models.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct RunFlags {
    /// Input files or glob patterns (.asc for ESRI ASCII, anything else is
    /// read as a CSV grid).
    pub inputs: Vec<String>,
    /// Structuring elements, comma separated, from B1 B2 B3 B4 B.
    #[arg(long, value_delimiter = ',')]
    pub elements: Option<Vec<String>>,
    /// Quantization step.
    #[arg(long)]
    pub step: Option<f64>,
    /// Quantization datum.
    #[arg(long)]
    pub datum: Option<f64>,
    /// Output directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Files processed in parallel.
    #[arg(long, short)]
    pub jobs: Option<usize>,
    /// Also compare with the run-table path.
    #[arg(long)]
    pub oracle_check: bool,
    /// Largest cells x levels checked against the run-table path.
    #[arg(long)]
    pub max_work: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<String>,
    pub elements: Vec<NamedSe>,
    pub quantization: Quantization,
    pub out: PathBuf,
    pub format: Format,
    pub jobs: usize,
    pub oracle_check: bool,
    pub max_work: u64,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: RunFlags) -> Result<RunConfig, CliError> {
        let inputs = if flags.inputs.is_empty() {
            file.inputs.unwrap_or_default()
        } else {
            flags.inputs
        };
        if inputs.is_empty() {
            return Err(CliError::Usage("no inputs given".into()));
        }
        let names = flags.elements.or(file.elements);
        let elements = match names {
            None => NamedSe::ALL.to_vec(),
            Some(names) => names
                .iter()
                .map(|n| NamedSe::parse(n.trim()).map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let step = flags.step.or(file.step).unwrap_or(1.0);
        let datum = flags.datum.or(file.datum).unwrap_or(1.0);
        let quantization = Quantization::new(step, datum).map_err(|e| CliError::Usage(e.to_string()))?;
        let jobs = flags.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        Ok(RunConfig {
            inputs,
            elements,
            quantization,
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            jobs,
            oracle_check: flags.oracle_check || file.oracle_check.unwrap_or(false),
            max_work: flags.max_work.or(file.max_work).unwrap_or(1 << 22),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file: FileConfig = toml::from_str(
            "inputs = [\"a.asc\"]\nstep = 2.0\ndatum = 0.5\njobs = 3\nformat = \"json\"\nelements = [\"B4\"]",
        )
        .unwrap();
        let flags = RunFlags {
            step: Some(0.25),
            ..RunFlags::default()
        };
        let cfg = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(cfg.inputs, ["a.asc"]);
        assert_eq!(cfg.quantization.step, 0.25);
        assert_eq!(cfg.quantization.datum, 0.5);
        assert_eq!(cfg.jobs, 3);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.elements, [NamedSe::B4]);
    }

    #[test]
    fn rejects_bad_values() {
        let flags = |step| RunFlags {
            inputs: vec!["x".into()],
            step: Some(step),
            ..RunFlags::default()
        };
        assert!(RunConfig::resolve(FileConfig::default(), flags(0.0)).is_err());
        assert!(RunConfig::resolve(FileConfig::default(), RunFlags::default()).is_err());
        let zero_jobs = RunFlags {
            inputs: vec!["x".into()],
            jobs: Some(0),
            ..RunFlags::default()
        };
        assert!(RunConfig::resolve(FileConfig::default(), zero_jobs).is_err());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
