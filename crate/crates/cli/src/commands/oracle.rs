//! `oracle-check`: openings against run tables, per model, direction and
//! family.

use mdgi_core::dem::{Dem, Direction};
use mdgi_core::morphology::NamedSe;
use mdgi_core::oracle::{run_table, spectrum_from_runs};
use mdgi_core::spectrum::{pattern_spectrum_named, segment_spectrum, Family};
use num_rational::Ratio;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::format::Metadata;
use crate::input::{expand, map_inputs, read_dem};
use crate::{to_json, write_file, CliError, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub status: Status,
    /// First scale index where the two probability vectors differ.
    pub first_mismatch: Option<usize>,
    pub detail: String,
}

/// Work of the run-table path, in cells times levels.
pub fn work(dem: &Dem) -> u64 {
    dem.cell_count() as u64 * u64::from(dem.max_elevation())
}

fn first_difference(a: &[Ratio<u64>], b: &[Ratio<u64>]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .or((a.len() != b.len()).then(|| a.len().min(b.len())))
}

/// Compares the two paths for one direction and family. With `fault` the
/// opening spectrum gets an extra zero term, so the check must fail.
pub fn check(dem: &Dem, direction: Direction, family: Family, max_work: u64, fault: bool) -> Check {
    if work(dem) > max_work {
        return Check {
            status: Status::Skip,
            first_mismatch: None,
            detail: format!("work {} exceeds the cap {max_work}", work(dem)),
        };
    }
    let morph = match family {
        Family::Scaled => pattern_spectrum_named(dem, NamedSe::for_direction(direction)),
        Family::Segments => segment_spectrum(dem, direction),
    };
    let runs = spectrum_from_runs(&run_table(dem, direction), family, direction);
    match (morph, runs) {
        (Ok(m), Ok(r)) => {
            let mut p = m.probs();
            if fault {
                p.push(Ratio::new(0, 1));
            }
            match first_difference(&p, &r.probs()) {
                None => Check {
                    status: Status::Pass,
                    first_mismatch: None,
                    detail: format!("{} terms", p.len()),
                },
                Some(i) => Check {
                    status: Status::Fail,
                    first_mismatch: Some(i + m.first_index()),
                    detail: format!(
                        "openings give {}, runs give {}",
                        p.get(i).map_or("nothing".into(), |v| v.to_string()),
                        r.probs().get(i).map_or("nothing".into(), |v| v.to_string())
                    ),
                },
            }
        }
        (m, r) => Check {
            status: Status::Error,
            first_mismatch: None,
            detail: format!("{:?} / {:?}", m.err(), r.err()),
        },
    }
}

#[derive(Debug, Serialize)]
struct Row {
    id: String,
    direction: &'static str,
    family: &'static str,
    #[serde(flatten)]
    check: Check,
}

#[derive(Serialize)]
struct Report<'a> {
    metadata: Metadata,
    checks: &'a [Row],
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Scaled => "scaled",
        Family::Segments => "segments",
    }
}

pub fn run(cfg: &RunConfig, fault: bool) -> Result<Summary, CliError> {
    let inputs = expand(&cfg.inputs)?;
    let results = map_inputs(&inputs, cfg.jobs, |input| {
        let dem = read_dem(&input.path, &cfg.quantization);
        let mut rows = Vec::new();
        for direction in Direction::ALL {
            for family in [Family::Scaled, Family::Segments] {
                let check = match &dem {
                    Ok(dem) => check(dem, direction, family, cfg.max_work, fault),
                    Err(e) => Check {
                        status: Status::Error,
                        first_mismatch: None,
                        detail: e.clone(),
                    },
                };
                rows.push(Row {
                    id: input.id.clone(),
                    direction: direction.name(),
                    family: family_name(family),
                    check,
                });
            }
        }
        rows
    })?;
    let rows: Vec<Row> = results.into_iter().flatten().collect();
    let mut failed_inputs = std::collections::BTreeSet::new();
    for r in &rows {
        say!("{} {} {} {}", r.check.status, r.id, r.direction, r.family);
        match r.check.status {
            Status::Fail | Status::Error => {
                failed_inputs.insert(r.id.clone());
            }
            Status::Skip => eprintln!("notice: {} skipped: {}", r.id, r.check.detail),
            Status::Pass => {}
        }
    }
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "direction", "family", "status", "first_mismatch", "detail"])
                .map_err(|e| CliError::Data(e.to_string()))?;
            for r in &rows {
                let status = r.check.status.to_string();
                let first = r.check.first_mismatch.map(|i| i.to_string()).unwrap_or_default();
                w.write_record([&r.id, r.direction, r.family, &status, &first, &r.check.detail])
                    .map_err(|e| CliError::Data(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
            write_file(&cfg.out, "oracle_report.csv", &String::from_utf8_lossy(&bytes))?;
        }
        Format::Json => {
            let report = Report {
                metadata: Metadata::new(&cfg.quantization),
                checks: &rows,
            };
            write_file(&cfg.out, "oracle_report.json", &to_json(&report))?;
        }
    }
    Ok(Summary {
        failures: failed_inputs.len(),
    })
}
