//! Generators and brute-force reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use mdgi_core::dem::Dem;
use proptest::prelude::*;
use rand::Rng;

/// Random model up to `max_w x max_h` with elevations in `1..=levels` and
/// roughly `holes` of the cells missing. At least one cell is present.
pub fn random_dem(rng: &mut impl Rng, max_w: usize, max_h: usize, levels: u32, holes: f64) -> Dem {
    let w = rng.gen_range(1..=max_w);
    let h = rng.gen_range(1..=max_h);
    let mut cells: Vec<Option<u32>> = (0..w * h)
        .map(|_| (!rng.gen_bool(holes)).then(|| rng.gen_range(1..=levels)))
        .collect();
    if cells.iter().all(Option::is_none) {
        let i = rng.gen_range(0..cells.len());
        cells[i] = Some(rng.gen_range(1..=levels));
    }
    Dem::from_cells(w, h, cells).unwrap()
}

/// Every row is a single non-empty interval at a random offset.
pub fn random_interval_dem(rng: &mut impl Rng, width: usize, rows: usize, levels: u32) -> Dem {
    let mut grid = Vec::new();
    for _ in 0..rows {
        let a = rng.gen_range(0..width);
        let b = rng.gen_range(a..width);
        grid.push(
            (0..width)
                .map(|x| (a..=b).contains(&x).then(|| rng.gen_range(1..=levels)))
                .collect(),
        );
    }
    Dem::from_rows(&grid).unwrap()
}

/// A row rising to a single peak then falling, every level from 1 to the
/// peak occupied.
pub fn random_unipeak_row(rng: &mut impl Rng, max_len: usize, levels: u32) -> Vec<u32> {
    let len = rng.gen_range(1..=max_len);
    let peak_at = rng.gen_range(0..len);
    let peak = rng.gen_range(1..=levels);
    let mut row = vec![0; len];
    row[peak_at] = peak;
    let mut v = peak;
    for x in (0..peak_at).rev() {
        v = rng.gen_range(1..=v);
        row[x] = v;
    }
    let mut v = peak;
    for cell in &mut row[peak_at + 1..] {
        v = rng.gen_range(1..=v);
        *cell = v;
    }
    row
}

pub fn arb_dem(max_side: usize, levels: u32) -> impl Strategy<Value = Dem> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(move |(w, h)| {
            (
                Just(w),
                Just(h),
                prop::collection::vec(prop::option::weighted(0.85, 1..=levels), w * h),
            )
        })
        .prop_filter_map("empty domain", |(w, h, cells)| Dem::from_cells(w, h, cells).ok())
}

/// Value at `(x, y)`, 0 outside the grid or the domain.
pub fn at(dem: &Dem, x: i64, y: i64) -> u32 {
    if x < 0 || y < 0 || x >= dem.width() as i64 || y >= dem.height() as i64 {
        return 0;
    }
    dem.get(x as usize, y as usize).unwrap_or(0)
}

fn extreme_filter(width: usize, height: usize, mask: &[bool], read: impl Fn(i64, i64) -> u32, offsets: &[(i32, i32)], min: bool) -> Vec<u32> {
    let mut out = vec![0; width * height];
    for y in 0..height {
        for x in 0..width {
            if !mask[y * width + x] {
                continue;
            }
            let vals = offsets.iter().map(|&(dx, dy)| read(x as i64 + dx as i64, y as i64 + dy as i64));
            out[y * width + x] = if min { vals.min().unwrap() } else { vals.max().unwrap() };
        }
    }
    out
}

/// Opening computed straight from the definition, one window at a time.
pub fn naive_open(dem: &Dem, offsets: &[(i32, i32)]) -> Vec<u32> {
    let (w, h) = (dem.width(), dem.height());
    let eroded = extreme_filter(w, h, dem.mask(), |x, y| at(dem, x, y), offsets, true);
    let read = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0
        } else {
            eroded[y as usize * w + x as usize]
        }
    };
    extreme_filter(w, h, dem.mask(), read, offsets, false)
}

pub fn square_offsets(n: i32) -> Vec<(i32, i32)> {
    (-n..=n).flat_map(|y| (-n..=n).map(move |x| (x, y))).collect()
}

pub fn line_offsets(step: (i32, i32), n: i32) -> Vec<(i32, i32)> {
    (-n..=n).map(|k| (k * step.0, k * step.1)).collect()
}

fn window(values: &[u32], width: usize, i: i64) -> impl Iterator<Item = u32> + '_ {
    let r = (width / 2) as i64;
    (i - r..=i + r).map(|j| if j < 0 || j >= values.len() as i64 { 0 } else { values[j as usize] })
}

/// Centered windowed minimum reading 0 beyond the ends.
pub fn naive_window_min(values: &[u32], width: usize) -> Vec<u32> {
    (0..values.len() as i64).map(|i| window(values, width, i).min().unwrap()).collect()
}

pub fn naive_window_max(values: &[u32], width: usize) -> Vec<u32> {
    (0..values.len() as i64).map(|i| window(values, width, i).max().unwrap()).collect()
}
