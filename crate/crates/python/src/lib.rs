//! Python bindings: `import mdgi`.
//!
//! Models are lists of rows of non-negative integers, with `None` for cells
//! outside the domain, or files read with `load`.

use mdgi_core::classify::{train_cart, DecisionTree, FEATURES};
use mdgi_core::dem::{parse_grid_csv, read_esri_ascii, Dem, Direction, Quantization};
use mdgi_core::morphology::NamedSe;
use mdgi_core::oracle::{run_table, spectrum_from_runs};
use mdgi_core::spectrum::{
    normalized_mdgi, pattern_spectrum_named, segment_spectrum, Family, FeatureRecord, PatternSpectrum,
};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_family(name: &str) -> PyResult<Family> {
    match name {
        "scaled" => Ok(Family::Scaled),
        "segments" => Ok(Family::Segments),
        _ => Err(value_error(format!("unknown family {name:?}, expected \"scaled\" or \"segments\""))),
    }
}

fn parse_direction(name: &str) -> PyResult<Direction> {
    Direction::parse(name).ok_or_else(|| value_error(format!("unknown direction {name:?}")))
}

/// An elevation model on a masked grid.
#[pyclass(name = "Dem", frozen)]
struct PyDem {
    inner: Dem,
}

#[pymethods]
impl PyDem {
    #[new]
    fn new(rows: Vec<Vec<Option<u32>>>) -> PyResult<Self> {
        Ok(PyDem {
            inner: Dem::from_rows(&rows).map_err(value_error)?,
        })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn cells(&self) -> usize {
        self.inner.cell_count()
    }

    #[getter]
    fn volume(&self) -> u64 {
        self.inner.volume()
    }

    fn rows(&self) -> Vec<Vec<Option<u32>>> {
        self.inner.rows()
    }

    fn __repr__(&self) -> String {
        format!("Dem({}x{}, {} cells)", self.inner.width(), self.inner.height(), self.inner.cell_count())
    }
}

/// Reads a `.asc` ESRI grid or a CSV grid and quantizes it.
#[pyfunction]
#[pyo3(signature = (path, step = 1.0, datum = 1.0))]
fn load(path: &str, step: f64, datum: f64) -> PyResult<PyDem> {
    let q = Quantization::new(step, datum).map_err(value_error)?;
    let text = std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
    let dem = if path.to_ascii_lowercase().ends_with(".asc") {
        read_esri_ascii(&text, &q).map(|g| g.dem)
    } else {
        parse_grid_csv(&text, &q)
    };
    Ok(PyDem {
        inner: dem.map_err(|e| value_error(format!("{path}: {e}")))?,
    })
}

/// Opening volumes and their normalized losses.
#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    inner: PatternSpectrum,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn element(&self) -> &str {
        self.inner.se_name()
    }

    #[getter]
    fn family(&self) -> &'static str {
        match self.inner.family() {
            Family::Scaled => "scaled",
            Family::Segments => "segments",
        }
    }

    #[getter]
    fn first_index(&self) -> usize {
        self.inner.first_index()
    }

    #[getter]
    fn n0(&self) -> usize {
        self.inner.n0()
    }

    #[getter]
    fn volumes(&self) -> Vec<u64> {
        self.inner.volumes().to_vec()
    }

    #[getter]
    fn losses(&self) -> Vec<u64> {
        self.inner.losses()
    }

    /// Probabilities as reduced `(numerator, denominator)` pairs.
    #[getter]
    fn probs(&self) -> Vec<(u64, u64)> {
        self.inner.probs().iter().map(|p| (*p.numer(), *p.denom())).collect()
    }

    #[getter]
    fn gi(&self) -> f64 {
        self.inner.entropy()
    }

    fn __repr__(&self) -> String {
        format!("Spectrum({} {}, gi={})", self.element(), self.family(), self.gi())
    }
}

/// Pattern spectrum of `dem` under one of `B1 B2 B3 B4 B`.
#[pyfunction]
fn spectrum(dem: &PyDem, element: &str) -> PyResult<PySpectrum> {
    let se = NamedSe::parse(element).map_err(value_error)?;
    Ok(PySpectrum {
        inner: pattern_spectrum_named(&dem.inner, se).map_err(value_error)?,
    })
}

/// Spectrum of openings by segments of growing length along `direction`.
#[pyfunction]
fn segments(dem: &PyDem, direction: &str) -> PyResult<PySpectrum> {
    Ok(PySpectrum {
        inner: segment_spectrum(&dem.inner, parse_direction(direction)?).map_err(value_error)?,
    })
}

/// The same spectrum computed from run lengths of threshold sets.
#[pyfunction]
#[pyo3(signature = (dem, direction, family = "scaled"))]
fn spectrum_from_run_table(dem: &PyDem, direction: &str, family: &str) -> PyResult<PySpectrum> {
    let direction = parse_direction(direction)?;
    let rt = run_table(&dem.inner, direction);
    Ok(PySpectrum {
        inner: spectrum_from_runs(&rt, parse_family(family)?, direction).map_err(value_error)?,
    })
}

/// True when the opening and run-table spectra agree term by term.
#[pyfunction]
#[pyo3(signature = (dem, direction, family = "scaled"))]
fn oracle_check(dem: &PyDem, direction: &str, family: &str) -> PyResult<bool> {
    let d = parse_direction(direction)?;
    let f = parse_family(family)?;
    let morph = match f {
        Family::Scaled => pattern_spectrum_named(&dem.inner, NamedSe::for_direction(d)),
        Family::Segments => segment_spectrum(&dem.inner, d),
    }
    .map_err(value_error)?;
    let runs = spectrum_from_runs(&run_table(&dem.inner, d), f, d).map_err(value_error)?;
    Ok(morph.probs() == runs.probs())
}

/// Indices, ratios and order-statistic features as a dict.
#[pyfunction]
fn features<'py>(py: Python<'py>, dem: &PyDem) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let r = normalized_mdgi(&dem.inner).map_err(value_error)?;
    let (high, low) = r.high_low();
    let d = pyo3::types::PyDict::new(py);
    d.set_item("gi", r.gi.to_vec())?;
    d.set_item("z", r.z.to_vec())?;
    d.set_item("x", r.x.to_vec())?;
    d.set_item("degenerate", r.degenerate)?;
    d.set_item("high", high.name())?;
    d.set_item("low", low.name())?;
    Ok(d)
}

fn feature_vector(x: Vec<f64>) -> PyResult<[f64; FEATURES]> {
    let n = x.len();
    x.try_into()
        .map_err(|_| value_error(format!("expected {FEATURES} features, got {n}")))
}

/// A depth-capped classification tree.
#[pyclass(name = "Tree", frozen)]
struct PyTree {
    inner: DecisionTree,
}

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTree {
            inner: DecisionTree::from_json(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<String> {
        Ok(self.inner.predict(&feature_vector(x)?).to_string())
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }
}

/// Fits a tree to rows of 16 features and their labels.
#[pyfunction]
#[pyo3(signature = (rows, labels, max_depth = 2))]
fn train_tree(rows: Vec<Vec<f64>>, labels: Vec<String>, max_depth: usize) -> PyResult<PyTree> {
    if rows.len() != labels.len() {
        return Err(value_error(format!("{} rows but {} labels", rows.len(), labels.len())));
    }
    let records = rows
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (x, label))| Ok(FeatureRecord::from_features(format!("row{i}"), feature_vector(x)?, Some(label))))
        .collect::<PyResult<Vec<_>>>()?;
    Ok(PyTree {
        inner: train_cart(&records, max_depth).map_err(value_error)?,
    })
}

#[pymodule]
fn mdgi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDem>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(segments, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_from_run_table, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    m.add_function(wrap_pyfunction!(features, m)?)?;
    m.add_function(wrap_pyfunction!(train_tree, m)?)?;
    Ok(())
}
