//! `features`: one row of indices and order-statistic features per model.

use std::collections::BTreeMap;
use std::path::Path;

use mdgi_core::classify::FEATURES;
use mdgi_core::spectrum::{normalized_mdgi, FeatureRecord};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::format::{g6, json_g6, Metadata};
use crate::input::{expand, map_inputs, read_dem};
use crate::{to_json, write_file, CliError, Summary};

pub fn header(labelled: bool) -> Vec<String> {
    let mut h: Vec<String> = ["id", "GI_B1", "GI_B2", "GI_B3", "GI_B4", "GI_B", "Z1", "Z2", "Z3", "Z4"]
        .map(String::from)
        .to_vec();
    h.extend((0..FEATURES).map(|i| format!("X{i}")));
    h.extend(["degenerate", "high", "low"].map(String::from));
    if labelled {
        h.push("label".into());
    }
    h
}

pub fn row(r: &FeatureRecord, labelled: bool) -> Vec<String> {
    let mut row = vec![r.id.clone()];
    row.extend(r.gi.iter().chain(&r.z).chain(&r.x).map(|&v| g6(v)));
    let (high, low) = r.high_low();
    row.push(r.degenerate.to_string());
    row.push(high.name().into());
    row.push(low.name().into());
    if labelled {
        row.push(r.label.clone().unwrap_or_default());
    }
    row
}

/// Reads `id,label` pairs.
fn read_labels(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Data(format!("{}: no {name:?} column", path.display())))
    };
    let (id, label) = (column("id")?, column("label")?);
    let mut labels = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        labels.insert(record[id].trim().to_string(), record[label].trim().to_string());
    }
    Ok(labels)
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    id: &'a str,
    gi: Vec<serde_json::Value>,
    z: Vec<serde_json::Value>,
    x: Vec<serde_json::Value>,
    degenerate: bool,
    high: &'static str,
    low: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonFeatures<'a> {
    metadata: Metadata,
    records: Vec<JsonRecord<'a>>,
}

pub fn run(cfg: &RunConfig, labels: Option<&Path>) -> Result<Summary, CliError> {
    let labels = labels.map(read_labels).transpose()?;
    let inputs = expand(&cfg.inputs)?;
    let results = map_inputs(&inputs, cfg.jobs, |input| {
        let dem = read_dem(&input.path, &cfg.quantization)?;
        let mut record = normalized_mdgi(&dem).map_err(|e| e.to_string())?;
        record.id = input.id.clone();
        record.label = labels.as_ref().and_then(|l| l.get(&input.id).cloned());
        Ok::<_, String>(record)
    })?;
    let mut failures = 0;
    let mut records = Vec::new();
    for (input, result) in inputs.iter().zip(results) {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e}", input.path.display());
            }
        }
    }
    let labelled = labels.is_some();
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header(labelled)).map_err(|e| CliError::Data(e.to_string()))?;
            for r in &records {
                w.write_record(row(r, labelled)).map_err(|e| CliError::Data(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
            write_file(&cfg.out, "features.csv", &String::from_utf8_lossy(&bytes))?;
        }
        Format::Json => {
            let doc = JsonFeatures {
                metadata: Metadata::new(&cfg.quantization),
                records: records
                    .iter()
                    .map(|r| {
                        let (high, low) = r.high_low();
                        JsonRecord {
                            id: &r.id,
                            gi: r.gi.iter().map(|&v| json_g6(v)).collect(),
                            z: r.z.iter().map(|&v| json_g6(v)).collect(),
                            x: r.x.iter().map(|&v| json_g6(v)).collect(),
                            degenerate: r.degenerate,
                            high: high.name(),
                            low: low.name(),
                            label: r.label.as_deref(),
                        }
                    })
                    .collect(),
            };
            write_file(&cfg.out, "features.json", &to_json(&doc))?;
        }
    }
    say!("{} record(s), {failures} failure(s)", records.len());
    Ok(Summary { failures })
}
