//! `spectrum`: per model, a table of volumes and probabilities for each
//! structuring element and a JSON summary.

use mdgi_core::morphology::NamedSe;
use mdgi_core::spectrum::{pattern_spectrum_named, Family, PatternSpectrum};
use serde::Serialize;

use super::oracle::{check, Check};
use crate::config::{Format, RunConfig};
use crate::format::{g6, json_g6, ratio, Metadata};
use crate::input::{expand, map_inputs, read_dem, Input};
use crate::{to_json, write_file, CliError, Summary};

/// Rows `n, volume, p_n` for `n` from the first scale up to the last one
/// with a loss.
pub fn table(ps: &PatternSpectrum) -> String {
    let mut out = String::from("n,volume,p_n\n");
    let total = ps.total();
    for (i, loss) in ps.losses().into_iter().enumerate() {
        let n = ps.first_index() + i;
        out.push_str(&format!("{n},{},{}\n", ps.volumes()[i], ratio(loss, total)));
    }
    out
}

#[derive(Serialize)]
struct SpectrumSummary {
    element: &'static str,
    family: Family,
    n0: usize,
    gi: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    volumes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Check>,
}

#[derive(Serialize)]
struct ModelSummary {
    metadata: Metadata,
    id: String,
    source: String,
    width: usize,
    height: usize,
    cells: usize,
    volume: u64,
    spectra: Vec<SpectrumSummary>,
}

#[derive(Serialize)]
struct BatchEntry {
    id: String,
    source: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Batch {
    metadata: Metadata,
    inputs: Vec<BatchEntry>,
}

fn one(cfg: &RunConfig, input: &Input) -> Result<Vec<String>, String> {
    let dem = read_dem(&input.path, &cfg.quantization)?;
    let mut spectra = Vec::new();
    let mut lines = Vec::new();
    for &se in &cfg.elements {
        let ps = pattern_spectrum_named(&dem, se).map_err(|e| format!("{se}: {e}"))?;
        let oracle = match (cfg.oracle_check, se.direction()) {
            (true, Some(d)) => Some(check(&dem, d, Family::Scaled, cfg.max_work, false)),
            _ => None,
        };
        lines.push(describe(se, &ps));
        let full = cfg.format == Format::Json;
        spectra.push(SpectrumSummary {
            element: se.name(),
            family: ps.family(),
            n0: ps.n0(),
            gi: json_g6(ps.entropy()),
            volumes: full.then(|| ps.volumes().to_vec()),
            p: full.then(|| ps.losses().into_iter().map(|l| ratio(l, ps.total())).collect()),
            oracle,
        });
        if cfg.format == Format::Csv {
            write_file(&cfg.out, &format!("{}.{}.csv", input.id, se.name()), &table(&ps)).map_err(|e| e.to_string())?;
        }
    }
    let summary = ModelSummary {
        metadata: Metadata::new(&cfg.quantization),
        id: input.id.clone(),
        source: input.path.display().to_string(),
        width: dem.width(),
        height: dem.height(),
        cells: dem.cell_count(),
        volume: dem.volume(),
        spectra,
    };
    write_file(&cfg.out, &format!("{}.json", input.id), &to_json(&summary)).map_err(|e| e.to_string())?;
    Ok(lines)
}

pub fn run(cfg: &RunConfig) -> Result<Summary, CliError> {
    let inputs = expand(&cfg.inputs)?;
    let results = map_inputs(&inputs, cfg.jobs, |input| one(cfg, input))?;
    let mut failures = 0;
    let mut entries = Vec::new();
    for (input, result) in inputs.iter().zip(results) {
        let error = match result {
            Ok(lines) => {
                for line in lines {
                    say!("{} {line}", input.id);
                }
                None
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e}", input.path.display());
                Some(e)
            }
        };
        entries.push(BatchEntry {
            id: input.id.clone(),
            source: input.path.display().to_string(),
            status: if error.is_some() { "error" } else { "ok" },
            error,
        });
    }
    let batch = Batch {
        metadata: Metadata::new(&cfg.quantization),
        inputs: entries,
    };
    write_file(&cfg.out, "spectrum_batch.json", &to_json(&batch))?;
    Ok(Summary { failures })
}

/// Index line for the terminal, e.g. `B4 gi=0.661563 n0=3`.
pub fn describe(se: NamedSe, ps: &PatternSpectrum) -> String {
    format!("{se} gi={} n0={}", g6(ps.entropy()), ps.n0())
}
