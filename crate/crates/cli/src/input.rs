//! Expanding inputs, naming them, and reading them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mdgi_core::dem::{parse_grid_csv, read_esri_ascii, Dem, Quantization};
use rayon::prelude::*;

use crate::CliError;

/// An input file and the id its outputs are named by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Input {
    pub id: String,
    pub path: PathBuf,
}

/// Expands globs (patterns matching nothing are dropped) and assigns ids:
/// the file stem, or the whole path flattened when stems collide. Sorted by
/// id.
pub fn expand(patterns: &[String]) -> Result<Vec<Input>, CliError> {
    let mut paths = Vec::new();
    for p in patterns {
        if Path::new(p).exists() || !p.contains(['*', '?', '[']) {
            paths.push(PathBuf::from(p));
            continue;
        }
        let matches = glob::glob(p).map_err(|e| CliError::Usage(format!("bad pattern {p:?}: {e}")))?;
        for m in matches {
            paths.push(m.map_err(|e| CliError::io(e.path(), e.error()))?);
        }
    }
    paths.sort();
    paths.dedup();
    let mut by_stem: BTreeMap<String, usize> = BTreeMap::new();
    for p in &paths {
        *by_stem.entry(stem(p)).or_default() += 1;
    }
    let mut inputs: Vec<Input> = paths
        .into_iter()
        .map(|path| {
            let s = stem(&path);
            let id = if by_stem[&s] > 1 {
                path.with_extension("")
                    .to_string_lossy()
                    .chars()
                    .map(|c| if c.is_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
                    .collect()
            } else {
                s
            };
            Input { id, path }
        })
        .collect();
    inputs.sort();
    Ok(inputs)
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

pub fn read_dem(path: &Path, q: &Quantization) -> Result<Dem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read: {e}"))?;
    let esri = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("asc"));
    let dem = if esri {
        read_esri_ascii(&text, q).map(|g| g.dem)
    } else {
        parse_grid_csv(&text, q)
    };
    dem.map_err(|e| e.to_string())
}

/// Runs `work` on every input with `jobs` threads; results keep the input
/// order.
pub fn map_inputs<T: Send>(
    inputs: &[Input],
    jobs: usize,
    work: impl Fn(&Input) -> T + Sync + Send,
) -> Result<Vec<T>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} threads: {e}")))?;
    Ok(pool.install(|| inputs.par_iter().map(&work).collect()))
}
