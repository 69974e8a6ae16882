//! `gen-fixtures`: the example models and families whose spectra coincide.

use std::path::Path;

use mdgi_core::dem::{scale_heights, write_esri_ascii, write_grid_csv, Dem, Quantization};
use mdgi_core::fixtures::{same_runs_pair, small_row, terrain, volume_46};
use mdgi_core::oracle::reflection_family;
use serde::Serialize;

use crate::format::Metadata;
use crate::{to_json, write_file, CliError, Summary};

#[derive(Serialize)]
struct Family {
    name: &'static str,
    /// Members share the spectrum of this element.
    shared: &'static str,
    members: Vec<String>,
}

#[derive(Serialize)]
struct Manifest {
    metadata: Metadata,
    models: Vec<String>,
    families: Vec<Family>,
}

fn save(out: &Path, name: String, dem: &Dem) -> Result<String, CliError> {
    let text = if name.ends_with(".asc") {
        write_esri_ascii(dem, None)
    } else {
        write_grid_csv(dem)
    };
    let (dir, file) = match name.rsplit_once('/') {
        Some((dir, file)) => (out.join(dir), file),
        None => (out.to_path_buf(), name.as_str()),
    };
    write_file(&dir, file, &text)?;
    Ok(name)
}

pub fn run(out: &Path) -> Result<Summary, CliError> {
    let base = volume_46();
    let (a, b) = same_runs_pair();
    let models = vec![
        save(out, "volume_46.asc".into(), &base)?,
        save(out, "small_row.csv".into(), &small_row())?,
        save(out, "terrain_64.asc".into(), &terrain(64, 64, 32, 7))?,
    ];
    let members = reflection_family(&base, 1 << 8).map_err(|e| CliError::Data(e.to_string()))?;
    let reflections = members
        .iter()
        .enumerate()
        .map(|(i, m)| save(out, format!("reflections/volume_46_r{i:02}.asc"), m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut scaled = vec!["volume_46.asc".to_string()];
    for k in [2, 3, 7] {
        let dem = scale_heights(&base, k).map_err(|e| CliError::Data(e.to_string()))?;
        scaled.push(save(out, format!("scaled/volume_46_k{k}.asc"), &dem)?);
    }
    let pair = vec![
        save(out, "same_runs/a.csv".into(), &a)?,
        save(out, "same_runs/b.csv".into(), &b)?,
    ];
    let manifest = Manifest {
        metadata: Metadata::new(&Quantization::default()),
        models,
        families: vec![
            Family {
                name: "row reflections",
                shared: "B4",
                members: reflections,
            },
            Family {
                name: "height scaling",
                shared: "B1 B2 B3 B4 B",
                members: scaled,
            },
            Family {
                name: "same row runs",
                shared: "B4",
                members: pair,
            },
        ],
    };
    write_file(out, "manifest.json", &to_json(&manifest))?;
    say!("fixtures written to {}", out.display());
    Ok(Summary { failures: 0 })
}
