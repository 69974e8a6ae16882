//! `train-tree` and `classify`.

use std::path::Path;

use mdgi_core::classify::{train_cart, DecisionTree, FEATURES};
use mdgi_core::spectrum::FeatureRecord;
use serde::Serialize;

use crate::format::{g6, Metadata};
use crate::{to_json, write_file, CliError, Summary};

/// Reads `id` (optional), `X0..X15` and, when present, the label column.
/// Rows with an empty label are unlabeled.
pub fn read_features(path: &Path, label_column: &str) -> Result<Vec<FeatureRecord>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let xs = (0..FEATURES)
        .map(|i| find(&format!("X{i}")).ok_or_else(|| CliError::Data(format!("{}: no X{i} column", path.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let (id, label) = (find("id"), find(label_column));
    let mut records = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let line = record.position().map_or(n + 2, |p| p.line() as usize);
        let mut x = [0.0; FEATURES];
        for (slot, &col) in x.iter_mut().zip(&xs) {
            let field = record.get(col).unwrap_or("").trim();
            *slot = field.parse().map_err(|_| {
                CliError::Data(format!(
                    "{} line {line}: {:?} in column {} is not a number",
                    path.display(),
                    field,
                    &headers[col]
                ))
            })?;
        }
        let id = id.and_then(|c| record.get(c)).map_or_else(|| format!("row{}", n + 1), |s| s.trim().to_string());
        let label = label
            .and_then(|c| record.get(c))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from);
        records.push(FeatureRecord::from_features(id, x, label));
    }
    Ok(records)
}

/// Correct predictions among labeled records, and the number labeled.
fn score(tree: &DecisionTree, records: &[FeatureRecord]) -> (usize, usize) {
    let labeled: Vec<_> = records.iter().filter_map(|r| r.label.as_deref().map(|l| (r, l))).collect();
    let correct = labeled.iter().filter(|(r, l)| tree.predict(&r.x) == *l).count();
    (correct, labeled.len())
}

#[derive(Serialize)]
struct TreeFile {
    metadata: Metadata,
    label_column: String,
    max_depth: usize,
    training_accuracy: String,
    tree: serde_json::Value,
}

pub fn train(features: &Path, label_column: &str, max_depth: usize, out: &Path) -> Result<Summary, CliError> {
    let records = read_features(features, label_column)?;
    if let Some(r) = records.iter().find(|r| r.label.is_none()) {
        return Err(CliError::Data(format!(
            "{}: record {:?} has no {label_column:?} value",
            features.display(),
            r.id
        )));
    }
    let tree = train_cart(&records, max_depth).map_err(|e| CliError::Data(e.to_string()))?;
    let (correct, total) = score(&tree, &records);
    let accuracy = format!("{correct}/{total}");
    let file = TreeFile {
        metadata: Metadata::tables(),
        label_column: label_column.into(),
        max_depth,
        training_accuracy: accuracy.clone(),
        tree: serde_json::from_str(&tree.to_json()).expect("tree JSON"),
    };
    write_file(out, "tree.json", &to_json(&file))?;
    let text = tree.render();
    write_file(out, "tree.txt", &text)?;
    say!("{}", text.trim_end());
    say!("training accuracy {accuracy} = {}", g6(correct as f64 / total as f64));
    Ok(Summary { failures: 0 })
}

/// Reads a tree written by `train-tree`, or a bare tree.
pub fn read_tree(path: &Path) -> Result<DecisionTree, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::io(path, e))?;
    let tree = value.get("tree").unwrap_or(&value);
    DecisionTree::from_json(&tree.to_string()).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct ClassifySummary {
    metadata: Metadata,
    records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<String>,
}

pub fn classify(tree: &Path, features: &Path, label_column: &str, out: &Path) -> Result<Summary, CliError> {
    let tree = read_tree(tree)?;
    let records = read_features(features, label_column)?;
    let labelled = records.iter().any(|r| r.label.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = if labelled { &["id", "predicted", "label"] } else { &["id", "predicted"] };
    w.write_record(header).map_err(|e| CliError::Data(e.to_string()))?;
    for r in &records {
        let mut row = vec![r.id.as_str(), tree.predict(&r.x)];
        if labelled {
            row.push(r.label.as_deref().unwrap_or(""));
        }
        w.write_record(row).map_err(|e| CliError::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    write_file(out, "predictions.csv", &String::from_utf8_lossy(&bytes))?;
    let (correct, total) = score(&tree, &records);
    let accuracy = (total > 0).then(|| format!("{correct}/{total}"));
    if let Some(a) = &accuracy {
        say!("accuracy {a} = {}", g6(correct as f64 / total as f64));
    }
    say!("{} prediction(s)", records.len());
    let summary = ClassifySummary {
        metadata: Metadata::tables(),
        records: records.len(),
        accuracy,
    };
    write_file(out, "classify_summary.json", &to_json(&summary))?;
    Ok(Summary { failures: 0 })
}
