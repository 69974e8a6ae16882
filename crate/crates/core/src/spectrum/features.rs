//! Normalized directional indices and their order-statistic layout.

use serde::{Deserialize, Serialize};

use super::{granulometric_index, pattern_spectrum_named};
use crate::dem::Dem;
use crate::error::Result;
use crate::morphology::NamedSe;

/// Per-model features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: String,
    /// Indices for `B1, B2, B3, B4, B`.
    pub gi: [f64; 5],
    /// `GI_Bi / GI_B` for `i = 1..4`.
    pub z: [f64; 4],
    /// Set when `GI_B = 0`; `z` is then all zeros.
    pub degenerate: bool,
    pub x: [f64; 16],
    pub label: Option<String>,
}

impl FeatureRecord {
    /// Builds a record from the five indices.
    pub fn from_indices(id: impl Into<String>, gi: [f64; 5]) -> FeatureRecord {
        let degenerate = gi[4] <= 0.0;
        let z = if degenerate {
            [0.0; 4]
        } else {
            [gi[0] / gi[4], gi[1] / gi[4], gi[2] / gi[4], gi[3] / gi[4]]
        };
        FeatureRecord {
            id: id.into(),
            gi,
            z,
            degenerate,
            x: order_stat_features(z),
            label: None,
        }
    }

    /// A record known only through its feature vector.
    pub fn from_features(id: impl Into<String>, x: [f64; 16], label: Option<String>) -> FeatureRecord {
        FeatureRecord {
            id: id.into(),
            gi: [0.0; 5],
            z: [0.0; 4],
            degenerate: false,
            x,
            label,
        }
    }

    pub fn high_low(&self) -> (NamedSe, NamedSe) {
        high_low_direction(self.z)
    }
}

/// Indices for all five elements, normalized by the square's.
pub fn normalized_mdgi(dem: &Dem) -> Result<FeatureRecord> {
    let mut gi = [0.0; 5];
    for (slot, se) in gi.iter_mut().zip(NamedSe::ALL) {
        *slot = granulometric_index(&pattern_spectrum_named(dem, se)?);
    }
    Ok(FeatureRecord::from_indices("", gi))
}

/// Rank (1-based) of each value, ties broken by position.
pub fn order_stat_ranks(z: [f64; 4]) -> [usize; 4] {
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    let mut ranks = [0; 4];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank + 1;
    }
    ranks
}

/// `X[4 (i - 1) + (j - 1)] = Z_i` where `j` is the rank of `Z_i`.
pub fn order_stat_features(z: [f64; 4]) -> [f64; 16] {
    let mut x = [0.0; 16];
    for (i, rank) in order_stat_ranks(z).into_iter().enumerate() {
        x[4 * i + rank - 1] = z[i];
    }
    x
}

/// Elements with the largest and smallest `Z`, lowest index on ties.
pub fn high_low_direction(z: [f64; 4]) -> (NamedSe, NamedSe) {
    let mut hi = 0;
    let mut lo = 0;
    for i in 1..4 {
        if z[i] > z[hi] {
            hi = i;
        }
        if z[i] < z[lo] {
            lo = i;
        }
    }
    (NamedSe::DIRECTIONAL[hi], NamedSe::DIRECTIONAL[lo])
}
