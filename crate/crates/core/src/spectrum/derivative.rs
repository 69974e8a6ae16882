//! Volume above a threshold and its discrete derivative in the threshold.

use crate::dem::Dem;

fn present(dem: &Dem) -> impl Iterator<Item = u32> + '_ {
    dem.values().iter().zip(dem.mask()).filter(|(_, m)| **m).map(|(v, _)| *v)
}

/// `sum over h >= h0 of #{f >= h}`, thresholds starting at 1.
pub fn volume_above(dem: &Dem, h0: u32) -> u64 {
    let h0 = h0.max(1);
    present(dem)
        .filter(|&v| v >= h0)
        .map(|v| u64::from(v - h0) + 1)
        .sum()
}

/// Entry `h - 1` is `#{f >= h}` for `h = 1 ..= max`.
pub fn discrete_volume_derivative(dem: &Dem) -> Vec<u64> {
    let max = dem.max_elevation() as usize;
    let mut counts = vec![0u64; max + 1];
    for v in present(dem) {
        counts[v as usize] += 1;
    }
    let mut acc = 0;
    let mut out = vec![0u64; max];
    for h in (1..=max).rev() {
        acc += counts[h];
        out[h - 1] = acc;
    }
    out
}

/// The derivative summed over each gap between consecutive present
/// elevations: `(v_j, (v_j - v_{j-1}) * #{f >= v_j})` with `v_0 = 0`.
pub fn level_volume_derivative(dem: &Dem) -> Vec<(u32, u64)> {
    let mut values: Vec<u32> = present(dem).filter(|&v| v > 0).collect();
    values.sort_unstable();
    let n = values.len();
    let mut out = Vec::new();
    let mut below = 0;
    let mut i = 0;
    while i < n {
        let v = values[i];
        out.push((v, u64::from(v - below) * (n - i) as u64));
        below = v;
        while i < n && values[i] == v {
            i += 1;
        }
    }
    out
}
