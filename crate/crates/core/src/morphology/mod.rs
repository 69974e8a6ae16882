//! Flat greyscale morphology on masked elevation models.
//!
//! Every operator reads cells outside the domain as elevation 0, for
//! erosion and dilation alike. Under this convention an opening equals, at
//! each cell, the largest minimum over translates of the element that lie
//! entirely inside the domain and cover the cell, and 0 where no translate
//! fits. Outputs keep the domain of their input.

mod stream;

pub use stream::{dilate_line_streaming, erode_line_streaming, open_line};
pub(crate) use stream::{open_line_with, ColumnScratch, Extreme, LineScratch, Max, Min};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dem::{line_specs, Dem, Direction};
use crate::error::{Error, Result};

/// A flat structuring element: a finite symmetric set of lattice offsets
/// `(dx, dy)` containing the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    offsets: Vec<(i32, i32)>,
}

/// What a structuring element looks like, for picking an evaluation
/// strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Origin,
    /// `2 * radius + 1` cells centered on the origin along a direction.
    Line { direction: Direction, radius: usize },
    /// The `(2 * radius + 1)^2` square centered on the origin.
    Square { radius: usize },
    General,
}

impl StructuringElement {
    pub fn new(offsets: impl IntoIterator<Item = (i32, i32)>) -> Result<Self> {
        let set: BTreeSet<(i32, i32)> = offsets.into_iter().collect();
        if !set.contains(&(0, 0)) {
            return Err(Error::InvalidElement("the origin is missing".into()));
        }
        if let Some(&(dx, dy)) = set.iter().find(|&&(dx, dy)| !set.contains(&(-dx, -dy))) {
            return Err(Error::InvalidElement(format!(
                "offset ({dx}, {dy}) has no mirror image"
            )));
        }
        Ok(StructuringElement {
            offsets: set.into_iter().collect(),
        })
    }

    pub fn origin() -> Self {
        StructuringElement {
            offsets: vec![(0, 0)],
        }
    }

    /// Centered segment of `2 * radius + 1` cells.
    pub fn line(direction: Direction, radius: usize) -> Self {
        let (dx, dy) = direction.step();
        let r = radius as i32;
        StructuringElement::new((-r..=r).map(|k| (k * dx as i32, k * dy as i32)))
            .expect("centered segments are symmetric")
    }

    pub fn square(radius: usize) -> Self {
        let r = radius as i32;
        StructuringElement::new((-r..=r).flat_map(|dy| (-r..=r).map(move |dx| (dx, dy))))
            .expect("centered squares are symmetric")
    }

    /// Sorted offsets.
    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Minkowski sum `self ⊕ other`.
    pub fn minkowski_sum(&self, other: &StructuringElement) -> StructuringElement {
        let set: BTreeSet<(i32, i32)> = self
            .offsets
            .iter()
            .flat_map(|&(a, b)| other.offsets.iter().map(move |&(c, d)| (a + c, b + d)))
            .collect();
        StructuringElement {
            offsets: set.into_iter().collect(),
        }
    }

    /// Half-width of the bounding box.
    pub fn extent(&self) -> usize {
        self.offsets
            .iter()
            .map(|&(dx, dy)| dx.unsigned_abs().max(dy.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn shape(&self) -> Shape {
        if self.offsets.len() == 1 {
            return Shape::Origin;
        }
        let r = self.extent();
        if self.offsets.len() == 2 * r + 1 {
            for direction in Direction::ALL {
                if *self == StructuringElement::line(direction, r) {
                    return Shape::Line { direction, radius: r };
                }
            }
        }
        if self.offsets.len() == (2 * r + 1) * (2 * r + 1) {
            return Shape::Square { radius: r };
        }
        Shape::General
    }
}

/// The five elements used for directional granulometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NamedSe {
    B1,
    B2,
    B3,
    B4,
    B,
}

impl NamedSe {
    pub const ALL: [NamedSe; 5] = [NamedSe::B1, NamedSe::B2, NamedSe::B3, NamedSe::B4, NamedSe::B];
    pub const DIRECTIONAL: [NamedSe; 4] = [NamedSe::B1, NamedSe::B2, NamedSe::B3, NamedSe::B4];

    pub fn name(self) -> &'static str {
        match self {
            NamedSe::B1 => "B1",
            NamedSe::B2 => "B2",
            NamedSe::B3 => "B3",
            NamedSe::B4 => "B4",
            NamedSe::B => "B",
        }
    }

    pub fn parse(name: &str) -> Result<NamedSe> {
        NamedSe::ALL
            .into_iter()
            .find(|se| se.name().eq_ignore_ascii_case(name.trim()))
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// Scan direction of the linear elements; `None` for the square.
    pub fn direction(self) -> Option<Direction> {
        match self {
            NamedSe::B1 => Some(Direction::DiagUp),
            NamedSe::B2 => Some(Direction::Column),
            NamedSe::B3 => Some(Direction::DiagDown),
            NamedSe::B4 => Some(Direction::Row),
            NamedSe::B => None,
        }
    }

    pub fn for_direction(direction: Direction) -> NamedSe {
        match direction {
            Direction::DiagUp => NamedSe::B1,
            Direction::Column => NamedSe::B2,
            Direction::DiagDown => NamedSe::B3,
            Direction::Row => NamedSe::B4,
        }
    }

    pub fn element(self) -> StructuringElement {
        match self.direction() {
            Some(d) => StructuringElement::line(d, 1),
            None => StructuringElement::square(1),
        }
    }

    /// `n`-fold scaling of this element, built directly.
    pub fn scaled(self, n: usize) -> StructuringElement {
        match self.direction() {
            Some(d) => StructuringElement::line(d, n),
            None => StructuringElement::square(n),
        }
    }
}

impl fmt::Display for NamedSe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn named_se(name: &str) -> Result<StructuringElement> {
    NamedSe::parse(name).map(NamedSe::element)
}

/// `n`-fold Minkowski self-sum; `nse(se, 0)` is the origin alone.
pub fn nse(se: &StructuringElement, n: usize) -> StructuringElement {
    match se.shape() {
        Shape::Line { direction, radius } => return StructuringElement::line(direction, radius * n),
        Shape::Square { radius } => return StructuringElement::square(radius * n),
        Shape::Origin => return StructuringElement::origin(),
        Shape::General => {}
    }
    let mut acc = StructuringElement::origin();
    for _ in 0..n {
        acc = acc.minkowski_sum(se);
    }
    acc
}

fn naive<E: Extreme>(dem: &Dem, se: &StructuringElement) -> Dem {
    let (w, h) = (dem.width() as i64, dem.height() as i64);
    let values = dem.values();
    let mask = dem.mask();
    let out = (0..dem.values().len())
        .map(|i| {
            if !mask[i] {
                return 0;
            }
            let (x, y) = ((i as i64) % w, (i as i64) / w);
            se.offsets()
                .iter()
                .map(|&(dx, dy)| {
                    let (u, v) = (x + i64::from(dx), y + i64::from(dy));
                    if u < 0 || v < 0 || u >= w || v >= h {
                        0
                    } else {
                        values[(v * w + u) as usize]
                    }
                })
                .reduce(E::pick)
                .unwrap_or(0)
        })
        .collect();
    dem.with_values(out)
}

fn along_lines<F>(dem: &Dem, direction: Direction, mut kernel: F) -> Dem
where
    F: FnMut(&[u32], &mut Vec<u32>),
{
    let mut out = vec![0u32; dem.values().len()];
    let mut line = Vec::new();
    let mut result = Vec::new();
    for spec in line_specs(dem.width(), dem.height(), direction) {
        line.clear();
        line.extend((0..spec.len).map(|k| dem.values()[spec.at(k)]));
        kernel(&line, &mut result);
        for (k, v) in result.iter().enumerate() {
            out[spec.at(k)] = *v;
        }
    }
    dem.with_values(out)
}

fn square_pass<E: Extreme>(dem_values: &[u32], width: usize, height: usize, radius: usize, rows_first: bool) -> Vec<u32> {
    let mut rows = LineScratch::default();
    let mut cols = ColumnScratch::default();
    let mut tmp = Vec::new();
    let mut out = Vec::new();
    let horizontal = |src: &[u32], dst: &mut Vec<u32>, rows: &mut LineScratch| {
        dst.clear();
        let mut buf = Vec::with_capacity(width);
        for row in src.chunks(width) {
            rows.run::<E>(row, radius, radius, &mut buf);
            dst.extend_from_slice(&buf);
        }
    };
    if rows_first {
        horizontal(dem_values, &mut tmp, &mut rows);
        cols.run::<E>(&tmp, width, height, radius, radius, &mut out);
    } else {
        cols.run::<E>(dem_values, width, height, radius, radius, &mut tmp);
        horizontal(&tmp, &mut out, &mut rows);
    }
    out
}

pub fn erode(dem: &Dem, se: &StructuringElement) -> Dem {
    match se.shape() {
        Shape::Origin => dem.clone(),
        Shape::Line { direction, radius } => {
            let mut scratch = LineScratch::default();
            along_lines(dem, direction, |l, o| scratch.run::<Min>(l, radius, radius, o))
        }
        Shape::Square { radius } => {
            dem.with_values(square_pass::<Min>(dem.values(), dem.width(), dem.height(), radius, true))
        }
        Shape::General => naive::<Min>(dem, se),
    }
}

pub fn dilate(dem: &Dem, se: &StructuringElement) -> Dem {
    match se.shape() {
        Shape::Origin => dem.clone(),
        Shape::Line { direction, radius } => {
            let mut scratch = LineScratch::default();
            along_lines(dem, direction, |l, o| scratch.run::<Max>(l, radius, radius, o))
        }
        Shape::Square { radius } => {
            dem.with_values(square_pass::<Max>(dem.values(), dem.width(), dem.height(), radius, false))
        }
        Shape::General => naive::<Max>(dem, se),
    }
}

/// Erosion followed by dilation with the same element.
pub fn open(dem: &Dem, se: &StructuringElement) -> Dem {
    match se.shape() {
        Shape::Origin => dem.clone(),
        Shape::Line { direction, radius } => open_segments(dem, direction, 2 * radius + 1),
        Shape::Square { radius } => open_square_separable(dem, radius),
        Shape::General => dilate(&erode(dem, se), se),
    }
}

/// Opening by `nse(se, n)`.
pub fn multiscale_open(dem: &Dem, se: &StructuringElement, n: usize) -> Dem {
    open(dem, &nse(se, n))
}

/// Opening by a segment of `length` cells (any length, odd or even) along
/// a direction: the `L_length` member of the segment family.
pub fn open_segments(dem: &Dem, direction: Direction, length: usize) -> Dem {
    let mut scratch = LineScratch::default();
    let mut eroded = Vec::new();
    along_lines(dem, direction, |l, o| open_line_with(&mut scratch, l, length, &mut eroded, o))
}

/// Opening by the `(2n+1) x (2n+1)` square: streaming horizontal then
/// vertical erosion, then vertical then horizontal dilation.
pub fn open_square_separable(dem: &Dem, n: usize) -> Dem {
    if n == 0 {
        return dem.clone();
    }
    let (w, h) = (dem.width(), dem.height());
    let eroded = square_pass::<Min>(dem.values(), w, h, n, true);
    dem.with_values(square_pass::<Max>(&eroded, w, h, n, false))
}
