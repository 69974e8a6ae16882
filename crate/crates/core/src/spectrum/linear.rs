//! One-pass granulometry along scan lines.
//!
//! A single stack sweep per lattice line finds, for every threshold at
//! once, the maximal runs of cells at or above it. Cells outside the domain
//! hold 0 and so end every run.

use crate::dem::{line_specs, Dem, Direction};

/// `out[t]` is the volume carried by maximal runs of exactly `t` cells,
/// summed over all thresholds: `t` times the number of (run, level) pairs
/// of that length.
pub(crate) fn run_length_volumes(dem: &Dem, direction: Direction) -> Vec<u64> {
    let longest = match direction {
        Direction::Row => dem.width(),
        Direction::Column => dem.height(),
        _ => dem.width().min(dem.height()),
    };
    let mut out = vec![0u64; longest + 1];
    let mut stack = Vec::new();
    let values = dem.values();
    if direction == Direction::Row {
        for row in values.chunks(dem.width().max(1)) {
            sweep(row.iter().copied(), &mut stack, &mut out);
        }
    } else {
        for spec in line_specs(dem.width(), dem.height(), direction) {
            sweep((0..spec.len).map(|k| values[spec.at(k)]), &mut stack, &mut out);
        }
    }
    out
}

fn sweep(line: impl Iterator<Item = u32>, stack: &mut Vec<(u32, usize)>, out: &mut [u64]) {
    stack.clear();
    stack.push((0, 0));
    for (i, v) in line.chain(std::iter::once(0)).enumerate() {
        let mut start = i;
        while let Some(&(h, s)) = stack.last() {
            if h <= v {
                break;
            }
            stack.pop();
            let below = stack.last().map_or(0, |t| t.0).max(v);
            let len = i - s;
            out[len] += (len as u64) * u64::from(h - below);
            start = s;
        }
        if stack.last().is_none_or(|t| t.0 < v) {
            stack.push((v, start));
        }
    }
}

/// Volumes of the openings by `L_k` for `k = 1, 2, ...` down to 0.
pub(crate) fn segment_volumes(hist: &[u64]) -> Vec<u64> {
    let top = hist.iter().rposition(|&v| v > 0).unwrap_or(0);
    let mut out = vec![0u64; top + 1];
    let mut acc = 0;
    for k in (1..=top).rev() {
        acc += hist[k];
        out[k - 1] = acc;
    }
    out
}

/// Volumes of the openings by the centered segments of `2n + 1` cells for
/// `n = 0, 1, ...` down to 0.
pub(crate) fn scaled_volumes(hist: &[u64]) -> Vec<u64> {
    let top = hist.iter().rposition(|&v| v > 0).unwrap_or(0);
    let n0 = if top == 0 { 0 } else { (top - 1) / 2 + 1 };
    let mut out = vec![0u64; n0 + 1];
    let mut acc = 0;
    for t in (1..=top).rev() {
        acc += hist[t];
        if t % 2 == 1 {
            out[(t - 1) / 2] = acc;
        }
    }
    out
}
