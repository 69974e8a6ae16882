//! Masked integer elevation models.
//!
//! A [`Dem`] is a function from a finite lattice domain to positive integer
//! elevations. Cells outside the domain are absent; every operator in this
//! crate keeps the domain mask of its input unchanged.

mod esri;
mod grid_csv;

pub use esri::{parse_esri_ascii, read_esri_ascii, write_esri_ascii, EsriGrid, EsriHeader};
pub use grid_csv::{parse_grid_csv, write_grid_csv};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice scan direction. Each linear structuring element opens along one
/// of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Step (1, 0); scanned by `B4`.
    Row,
    /// Step (0, 1); scanned by `B2`.
    Column,
    /// Step (1, 1) with rows growing downwards; scanned by `B3`.
    DiagDown,
    /// Step (1, -1); scanned by `B1`.
    DiagUp,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Row,
        Direction::Column,
        Direction::DiagDown,
        Direction::DiagUp,
    ];

    /// Lattice step `(dx, dy)` between consecutive cells of a line.
    pub fn step(self) -> (isize, isize) {
        match self {
            Direction::Row => (1, 0),
            Direction::Column => (0, 1),
            Direction::DiagDown => (1, 1),
            Direction::DiagUp => (1, -1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Row => "row",
            Direction::Column => "column",
            Direction::DiagDown => "diag-down",
            Direction::DiagUp => "diag-up",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Direction::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantization of real elevations onto the positive integers:
/// `z -> max(1, floor((z - datum) / step) + 1)`.
///
/// The default (`step = 1`, `datum = 1`) leaves positive integer inputs
/// unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantization {
    pub step: f64,
    pub datum: f64,
}

impl Default for Quantization {
    fn default() -> Self {
        Quantization {
            step: 1.0,
            datum: 1.0,
        }
    }
}

impl Quantization {
    pub fn new(step: f64, datum: f64) -> Result<Self> {
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::NonPositiveStep(step));
        }
        Ok(Quantization { step, datum })
    }

    pub fn apply(&self, z: f64) -> Result<u32> {
        if self.step <= 0.0 || !self.step.is_finite() {
            return Err(Error::NonPositiveStep(self.step));
        }
        let level = ((z - self.datum) / self.step).floor() + 1.0;
        if level < 1.0 {
            return Ok(1);
        }
        if level.is_nan() || level > u32::MAX as f64 {
            return Err(Error::InvalidDem(format!(
                "elevation {z} quantizes beyond the supported range"
            )));
        }
        Ok(level as u32)
    }
}

/// Quantizes a real-valued grid. `None` and non-finite values are outside
/// the domain.
pub fn quantize(
    width: usize,
    height: usize,
    raw: &[Option<f64>],
    step: f64,
    datum: f64,
) -> Result<Dem> {
    let q = Quantization::new(step, datum)?;
    quantize_with(width, height, raw, &q)
}

pub(crate) fn quantize_with(
    width: usize,
    height: usize,
    raw: &[Option<f64>],
    q: &Quantization,
) -> Result<Dem> {
    if raw.len() != width * height {
        return Err(Error::InvalidDem(format!(
            "{} raw values for a {width}x{height} grid",
            raw.len()
        )));
    }
    let cells = raw
        .iter()
        .map(|z| match z {
            Some(z) if z.is_finite() => q.apply(*z).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    Dem::from_cells(width, height, cells)
}

/// A masked integer raster.
///
/// Values of cells outside the domain are stored as 0 and never read as
/// elevations. Models built from data hold positive elevations only; the
/// results of morphological filters may hold 0 inside the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dem {
    width: usize,
    height: usize,
    values: Vec<u32>,
    mask: Vec<bool>,
    present: usize,
    min: u32,
    max: u32,
}

impl Dem {
    /// Builds a model from row-major cells, `None` marking cells outside the
    /// domain. Elevations must be positive and the domain non-empty.
    pub fn from_cells(width: usize, height: usize, cells: Vec<Option<u32>>) -> Result<Dem> {
        if cells.len() != width * height {
            return Err(Error::InvalidDem(format!(
                "{} cells for a {width}x{height} grid",
                cells.len()
            )));
        }
        if let Some(i) = cells.iter().position(|c| *c == Some(0)) {
            return Err(Error::InvalidDem(format!(
                "elevation 0 at ({}, {}); elevations must be positive",
                i % width.max(1),
                i / width.max(1)
            )));
        }
        let mask: Vec<bool> = cells.iter().map(Option::is_some).collect();
        let values: Vec<u32> = cells.iter().map(|c| c.unwrap_or(0)).collect();
        Dem::assemble(width, height, values, mask)
    }

    /// Builds a model from rows of equal length.
    pub fn from_rows(rows: &[Vec<Option<u32>>]) -> Result<Dem> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::InvalidDem(format!(
                "row {r} has {} cells, expected {width}",
                rows[r].len()
            )));
        }
        Dem::from_cells(width, height, rows.concat())
    }

    /// Builds a model whose domain is the full rectangle.
    pub fn from_grid(rows: &[Vec<u32>]) -> Result<Dem> {
        let rows: Vec<Vec<Option<u32>>> = rows
            .iter()
            .map(|r| r.iter().copied().map(Some).collect())
            .collect();
        Dem::from_rows(&rows)
    }

    fn assemble(width: usize, height: usize, values: Vec<u32>, mask: Vec<bool>) -> Result<Dem> {
        let present = mask.iter().filter(|m| **m).count();
        if present == 0 {
            return Err(Error::InvalidDem("the domain is empty".into()));
        }
        let (min, max) = values
            .iter()
            .zip(&mask)
            .filter(|(_, m)| **m)
            .fold((u32::MAX, 0), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v)));
        Ok(Dem {
            width,
            height,
            values,
            mask,
            present,
            min,
            max,
        })
    }

    /// Same domain, new values (0 allowed). Values outside the domain are
    /// forced to 0.
    pub(crate) fn with_values(&self, mut values: Vec<u32>) -> Dem {
        debug_assert_eq!(values.len(), self.values.len());
        let mut min = u32::MAX;
        let mut max = 0;
        for (v, m) in values.iter_mut().zip(&self.mask) {
            if *m {
                min = min.min(*v);
                max = max.max(*v);
            } else {
                *v = 0;
            }
        }
        Dem {
            width: self.width,
            height: self.height,
            values,
            mask: self.mask.clone(),
            present: self.present,
            min,
            max,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of cells in the domain.
    pub fn cell_count(&self) -> usize {
        self.present
    }

    pub fn min_elevation(&self) -> u32 {
        self.min
    }

    pub fn max_elevation(&self) -> u32 {
        self.max
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u32> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let i = y * self.width + x;
        self.mask[i].then_some(self.values[i])
    }

    pub fn is_present(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.mask[y * self.width + x]
    }

    /// Row-major values, 0 outside the domain.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Row-major domain membership.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn rows(&self) -> Vec<Vec<Option<u32>>> {
        (0..self.height)
            .map(|y| (0..self.width).map(|x| self.get(x, y)).collect())
            .collect()
    }

    /// Sum of all elevations in the domain.
    pub fn volume(&self) -> u64 {
        volume(self)
    }

    /// True when every present value is positive, i.e. the model is a valid
    /// input rather than a filtered surface.
    pub fn is_positive(&self) -> bool {
        self.min >= 1
    }
}

pub fn volume(dem: &Dem) -> u64 {
    dem.values.iter().map(|&v| u64::from(v)).sum()
}

/// A maximal run of consecutive domain cells along a scan line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Lattice coordinate `(x, y)` of the first cell.
    pub start: (usize, usize),
    pub values: Vec<u32>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the segment cells in scan order.
    pub fn cells(&self, direction: Direction) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (dx, dy) = direction.step();
        let (x0, y0) = (self.start.0 as isize, self.start.1 as isize);
        (0..self.values.len() as isize).map(move |k| ((x0 + k * dx) as usize, (y0 + k * dy) as usize))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanLine {
    pub direction: Direction,
    /// `y` for rows, `x` for columns, `x - y` for diag-down, `x + y` for
    /// diag-up.
    pub index: i64,
    pub segments: Vec<Segment>,
}

/// Geometry of one full lattice line through the bounding grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineSpec {
    pub index: i64,
    pub start: usize,
    pub stride: isize,
    pub len: usize,
}

impl LineSpec {
    #[inline]
    pub fn at(&self, k: usize) -> usize {
        (self.start as isize + k as isize * self.stride) as usize
    }
}

/// All lattice lines of a `width x height` grid in a direction, ordered by
/// line index.
pub(crate) fn line_specs(width: usize, height: usize, direction: Direction) -> Vec<LineSpec> {
    if width == 0 || height == 0 {
        return Vec::new();
    }
    let (w, h) = (width as i64, height as i64);
    match direction {
        Direction::Row => (0..height)
            .map(|y| LineSpec {
                index: y as i64,
                start: y * width,
                stride: 1,
                len: width,
            })
            .collect(),
        Direction::Column => (0..width)
            .map(|x| LineSpec {
                index: x as i64,
                start: x,
                stride: width as isize,
                len: height,
            })
            .collect(),
        Direction::DiagDown => (-(h - 1)..w)
            .map(|d| {
                let (x0, y0) = if d >= 0 { (d, 0) } else { (0, -d) };
                LineSpec {
                    index: d,
                    start: (y0 * w + x0) as usize,
                    stride: width as isize + 1,
                    len: (w - x0).min(h - y0) as usize,
                }
            })
            .collect(),
        Direction::DiagUp => (0..w + h - 1)
            .map(|s| {
                let x0 = (s - (h - 1)).max(0);
                let y0 = s - x0;
                LineSpec {
                    index: s,
                    start: (y0 * w + x0) as usize,
                    stride: 1 - width as isize,
                    len: (w - x0).min(y0 + 1) as usize,
                }
            })
            .collect(),
    }
}

/// Splits `mask` positions `0..len` (read through `at`) into maximal runs of
/// domain cells, returned as half-open position ranges.
pub(crate) fn segment_ranges(
    len: usize,
    mut present: impl FnMut(usize) -> bool,
) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for k in 0..len {
        match (present(k), start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push(s..k);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(s..len);
    }
    out
}

/// Decomposes the domain into scan lines. Lines that miss the domain are
/// omitted.
pub fn scan_lines(dem: &Dem, direction: Direction) -> Vec<ScanLine> {
    line_specs(dem.width, dem.height, direction)
        .into_iter()
        .filter_map(|spec| {
            let segments: Vec<Segment> = segment_ranges(spec.len, |k| dem.mask[spec.at(k)])
                .into_iter()
                .map(|r| {
                    let first = spec.at(r.start);
                    Segment {
                        start: (first % dem.width, first / dem.width),
                        values: r.map(|k| dem.values[spec.at(k)]).collect(),
                    }
                })
                .collect();
            (!segments.is_empty()).then_some(ScanLine {
                direction,
                index: spec.index,
                segments,
            })
        })
        .collect()
}

/// Mirrors each selected row within its own interval. Every selected row
/// must be a single segment (or empty).
pub fn reflect_rows(dem: &Dem, rows: &BTreeSet<usize>) -> Result<Dem> {
    let mut values = dem.values.clone();
    for &y in rows {
        if y >= dem.height {
            return Err(Error::InvalidDem(format!(
                "row {y} is outside a grid of height {}",
                dem.height
            )));
        }
        let base = y * dem.width;
        let segs = segment_ranges(dem.width, |x| dem.mask[base + x]);
        match segs.as_slice() {
            [] => {}
            [seg] => values[base + seg.start..base + seg.end].reverse(),
            _ => {
                return Err(Error::NonIntervalRow {
                    row: y,
                    segments: segs.len(),
                })
            }
        }
    }
    Ok(Dem {
        values,
        ..dem.clone()
    })
}

/// Multiplies every elevation by `k >= 1`.
pub fn scale_heights(dem: &Dem, k: u64) -> Result<Dem> {
    if k < 1 {
        return Err(Error::InvalidScale(k));
    }
    let values = dem
        .values
        .iter()
        .map(|&v| {
            u32::try_from(u64::from(v) * k)
                .map_err(|_| Error::ElevationOverflow { value: v, factor: k })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(dem.with_values(values))
}
