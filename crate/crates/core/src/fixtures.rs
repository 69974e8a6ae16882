//! Documented example models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dem::Dem;

/// Four interval rows of unequal span, volume 46.
///
/// ```text
///  .  2  3  .
///  1  4  6  2
///  2  5  7  3
///  .  3  4  4
/// ```
pub fn volume_46() -> Dem {
    Dem::from_rows(&[
        vec![None, Some(2), Some(3), None],
        vec![Some(1), Some(4), Some(6), Some(2)],
        vec![Some(2), Some(5), Some(7), Some(3)],
        vec![None, Some(3), Some(4), Some(4)],
    ])
    .expect("valid fixture")
}

/// The row `2 5 5 2 2`.
pub fn small_row() -> Dem {
    Dem::from_grid(&[vec![2, 5, 5, 2, 2]]).expect("valid fixture")
}

/// Two rows with identical runs at every threshold that are not mirror
/// images of each other.
pub fn same_runs_pair() -> (Dem, Dem) {
    (
        Dem::from_grid(&[vec![1, 2, 3, 1, 2, 1]]).expect("valid fixture"),
        Dem::from_grid(&[vec![1, 2, 1, 2, 3, 1]]).expect("valid fixture"),
    )
}

/// Widest noise cell; larger grids get more hills rather than wider ones.
const WIDEST_FEATURE: usize = 64;

/// Smooth multi-octave terrain quantized to `1 ..= levels`, reproducible
/// from `seed`.
pub fn terrain(width: usize, height: usize, levels: u32, seed: u64) -> Dem {
    assert!(width > 0 && height > 0 && levels > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = vec![0f64; width * height];
    let mut cell = (width.max(height) / 4).clamp(2, WIDEST_FEATURE);
    let mut amp = 1.0;
    while cell >= 2 {
        let gw = width / cell + 2;
        let gh = height / cell + 2;
        let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.gen::<f64>()).collect();
        for y in 0..height {
            let (gy, fy) = (y / cell, (y % cell) as f64 / cell as f64);
            for x in 0..width {
                let (gx, fx) = (x / cell, (x % cell) as f64 / cell as f64);
                let at = |i: usize, j: usize| lattice[j * gw + i];
                let top = at(gx, gy) * (1.0 - fx) + at(gx + 1, gy) * fx;
                let bottom = at(gx, gy + 1) * (1.0 - fx) + at(gx + 1, gy + 1) * fx;
                field[y * width + x] += amp * (top * (1.0 - fy) + bottom * fy);
            }
        }
        amp *= 0.55;
        cell /= 2;
    }
    let lo = field.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let cells = field
        .iter()
        .map(|z| Some(1 + (((z - lo) / span) * f64::from(levels) * 0.999_999) as u32))
        .collect();
    Dem::from_cells(width, height, cells).expect("positive elevations")
}
