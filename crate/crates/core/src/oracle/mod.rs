//! Granulometry recomputed from connected components of thresholded scan
//! line graphs, independent of the morphological operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dem::{reflect_rows, scan_lines, Dem, Direction, ScanLine};
use crate::error::{Error, Result};
use crate::morphology::NamedSe;
use crate::spectrum::level_volume_derivative;
use crate::spectrum::{entropy_of, segment_spectrum, Family, PatternSpectrum};

/// Node-weighted chain graph of one scan line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanGraph {
    pub direction: Direction,
    pub line: i64,
    /// Cell coordinates and elevations.
    pub nodes: Vec<((usize, usize), u32)>,
    /// Index pairs into `nodes`, always `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl ScanGraph {
    /// Links consecutive cells of each segment; segments stay disconnected.
    pub fn from_line(line: &ScanLine) -> ScanGraph {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for seg in &line.segments {
            for (k, (cell, &w)) in seg.cells(line.direction).zip(&seg.values).enumerate() {
                if k > 0 {
                    edges.push((nodes.len() - 1, nodes.len()));
                }
                nodes.push((cell, w));
            }
        }
        ScanGraph {
            direction: line.direction,
            line: line.index,
            nodes,
            edges,
        }
    }

    pub fn max_weight(&self) -> u32 {
        self.nodes.iter().map(|n| n.1).max().unwrap_or(0)
    }

    /// Subgraph induced by the nodes of weight at least `h`.
    pub fn upper_threshold(&self, h: u32) -> ScanGraph {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, &node) in self.nodes.iter().enumerate() {
            if node.1 >= h {
                remap[i] = nodes.len();
                nodes.push(node);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| remap[a] != usize::MAX && remap[b] != usize::MAX)
            .map(|&(a, b)| (remap[a], remap[b]))
            .collect();
        ScanGraph {
            direction: self.direction,
            line: self.line,
            nodes,
            edges,
        }
    }

    /// Connected components as sorted node index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adjacent = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adjacent[a].push(b);
            adjacent[b].push(a);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for root in 0..self.nodes.len() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![root];
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                comp.push(i);
                for &j in &adjacent[i] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

pub fn scan_graphs(dem: &Dem, direction: Direction) -> Vec<ScanGraph> {
    scan_lines(dem, direction).iter().map(ScanGraph::from_line).collect()
}

pub fn upper_threshold(graph: &ScanGraph, h: u32) -> ScanGraph {
    graph.upper_threshold(h)
}

/// Number of maximal runs of each length at each threshold on each line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTable {
    pub direction: Direction,
    /// Keyed by `(line, h, t)`; only nonzero counts are stored.
    pub counts: BTreeMap<(i64, u32, usize), u64>,
}

impl RunTable {
    pub fn count(&self, line: i64, h: u32, t: usize) -> u64 {
        self.counts.get(&(line, h, t)).copied().unwrap_or(0)
    }

    /// Runs of length `t` at threshold `h` over all lines.
    pub fn marginal(&self, h: u32, t: usize) -> u64 {
        self.counts
            .iter()
            .filter(|(&(_, hh, tt), _)| hh == h && tt == t)
            .map(|(_, &n)| n)
            .sum()
    }

    /// Volume carried by runs of exactly `t` cells: `t * sum n`.
    pub fn length_volumes(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (&(_, _, t), &n) in &self.counts {
            *out.entry(t).or_insert(0) += t as u64 * n;
        }
        out
    }

    pub fn longest_run(&self) -> usize {
        self.counts.keys().map(|k| k.2).max().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, u32, usize, u64)> + '_ {
        self.counts.iter().map(|(&(i, h, t), &n)| (i, h, t, n))
    }

    /// `direction,line,h,t,count` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("direction,line,h,t,count\n");
        for (i, h, t, n) in self.entries() {
            let _ = writeln!(out, "{},{i},{h},{t},{n}", self.direction.name());
        }
        out
    }
}

pub fn run_table(dem: &Dem, direction: Direction) -> RunTable {
    let mut counts = BTreeMap::new();
    for graph in scan_graphs(dem, direction) {
        for h in 1..=graph.max_weight() {
            for comp in graph.upper_threshold(h).components() {
                *counts.entry((graph.line, h, comp.len())).or_insert(0) += 1;
            }
        }
    }
    RunTable { direction, counts }
}

/// The spectrum of a linear family along `direction`, from run counts alone.
///
/// A run of `t` cells survives the segment `L_k` iff `k <= t` and the
/// centered segment of radius `n` iff `2n + 1 <= t`.
pub fn spectrum_from_runs(rt: &RunTable, family: Family, direction: Direction) -> Result<PatternSpectrum> {
    if rt.direction != direction {
        return Err(Error::DirectionMismatch {
            table: rt.direction.name().into(),
            family: direction.name().into(),
        });
    }
    let by_length = rt.length_volumes();
    let surviving = |min_len: usize| -> u64 { by_length.range(min_len..).map(|(_, v)| v).sum() };
    let longest = rt.longest_run();
    match family {
        Family::Segments => {
            let volumes = (1..=longest + 1).map(surviving).collect();
            PatternSpectrum::from_volumes(format!("L/{}", direction.name()), family, volumes)
        }
        Family::Scaled => {
            let n0 = longest.div_ceil(2);
            let volumes = (0..=n0).map(|n| surviving(2 * n + 1)).collect();
            PatternSpectrum::from_volumes(NamedSe::for_direction(direction).name(), family, volumes)
        }
    }
}

/// `Ok` when the model is a single interval row with one run at every
/// threshold up to its maximum, otherwise the reason it is not.
pub fn unipeak_check(dem: &Dem) -> std::result::Result<(), String> {
    let lines = scan_lines(dem, Direction::Row);
    match lines.as_slice() {
        [] => return Err("the model is empty".into()),
        [line] if line.segments.len() != 1 => {
            return Err(format!("the row has {} segments", line.segments.len()))
        }
        [_] => {}
        _ => return Err(format!("the model has {} occupied rows", lines.len())),
    }
    let rt = run_table(dem, Direction::Row);
    for h in 1..=dem.max_elevation() {
        let runs: u64 = rt.entries().filter(|e| e.1 == h).map(|e| e.3).sum();
        if runs != 1 {
            return Err(format!("{runs} runs at threshold {h}"));
        }
    }
    Ok(())
}

pub fn is_unipeak(dem: &Dem) -> bool {
    unipeak_check(dem).is_ok()
}

/// Both sides of the uni-peak identity.
#[derive(Debug, Clone, PartialEq)]
pub struct UnipeakEquivalence {
    /// Nonzero level-volume derivatives over the volume, sorted.
    pub derivative: Vec<Ratio<u64>>,
    /// Nonzero segment-family probabilities, sorted.
    pub spectrum: Vec<Ratio<u64>>,
    pub derivative_entropy: f64,
    pub spectrum_entropy: f64,
}

impl UnipeakEquivalence {
    pub fn holds(&self) -> bool {
        self.derivative == self.spectrum
    }
}

pub fn unipeak_entropy_equivalence(dem: &Dem) -> Result<UnipeakEquivalence> {
    unipeak_check(dem).map_err(Error::NotUnipeak)?;
    let total = dem.volume();
    let weights: Vec<u64> = level_volume_derivative(dem).into_iter().map(|p| p.1).collect();
    let mut derivative: Vec<Ratio<u64>> = weights.iter().map(|&w| Ratio::new(w, total)).collect();
    derivative.sort();
    let ps = segment_spectrum(dem, Direction::Row)?;
    let mut spectrum: Vec<Ratio<u64>> = ps.probs().into_iter().filter(|p| *p.numer() > 0).collect();
    spectrum.sort();
    Ok(UnipeakEquivalence {
        derivative,
        spectrum,
        derivative_entropy: entropy_of(&weights, total),
        spectrum_entropy: ps.entropy(),
    })
}

/// Every subset of rows mirrored within its interval, the identity first.
/// There are `2^height` members; more than `cap` is an error.
pub fn reflection_family(dem: &Dem, cap: u128) -> Result<Vec<Dem>> {
    let rows = dem.height();
    let needed = if rows < 128 { 1u128 << rows } else { u128::MAX };
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let all: BTreeSet<usize> = (0..rows).collect();
    reflect_rows(dem, &all)?;
    (0..needed)
        .map(|bits| {
            let chosen = (0..rows).filter(|&y| bits >> y & 1 == 1).collect();
            reflect_rows(dem, &chosen)
        })
        .collect()
}

/// Whether two models have identical run tables along a direction.
pub fn run_profile_equal(a: &Dem, b: &Dem, direction: Direction) -> bool {
    run_table(a, direction) == run_table(b, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dem::scale_heights;
    use crate::fixtures::{same_runs_pair, small_row};
    use crate::spectrum::{pattern_spectrum_named, segment_spectrum};

    fn row(values: &[u32]) -> Dem {
        Dem::from_grid(&[values.to_vec()]).unwrap()
    }

    fn r(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn thresholding_a_chain() {
        let g = &scan_graphs(&row(&[1, 2, 1]), Direction::Row)[0];
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(g.upper_threshold(1), *g);
        let top = g.upper_threshold(2);
        assert_eq!(top.nodes, vec![((1, 0), 2)]);
        assert!(top.edges.is_empty());
        assert!(g.upper_threshold(3).nodes.is_empty());
    }

    #[test]
    fn run_tables_of_small_rows() {
        let rt = run_table(&row(&[1, 2, 1]), Direction::Row);
        assert_eq!(rt.counts.len(), 2);
        assert_eq!((rt.count(0, 1, 3), rt.count(0, 2, 1)), (1, 1));
        let rt = run_table(&small_row(), Direction::Row);
        let want = [(1, 5), (2, 5), (3, 2), (4, 2), (5, 2)];
        assert_eq!(rt.counts.len(), want.len());
        for (h, t) in want {
            assert_eq!(rt.count(0, h, t), 1);
        }
    }

    #[test]
    fn holes_split_runs() {
        let dem = Dem::from_rows(&[vec![Some(4), None, Some(4)]]).unwrap();
        let rt = run_table(&dem, Direction::Row);
        for h in 1..=4 {
            assert_eq!(rt.count(0, h, 1), 2);
        }
    }

    #[test]
    fn segment_probabilities_from_runs() {
        let ps = spectrum_from_runs(&run_table(&small_row(), Direction::Row), Family::Segments, Direction::Row).unwrap();
        assert_eq!(ps.prob(2), r(6, 16));
        assert_eq!(ps.prob(5), r(10, 16));
        assert_eq!(ps.probs().iter().sum::<Ratio<u64>>(), r(1, 1));
        let ps = spectrum_from_runs(&run_table(&row(&[1, 2, 1]), Direction::Row), Family::Segments, Direction::Row).unwrap();
        assert_eq!((ps.prob(1), ps.prob(3)), (r(1, 4), r(3, 4)));
    }

    #[test]
    fn runs_reproduce_the_operator_spectra() {
        let dem = crate::fixtures::volume_46();
        for d in Direction::ALL {
            let rt = run_table(&dem, d);
            let scaled = spectrum_from_runs(&rt, Family::Scaled, d).unwrap();
            assert_eq!(scaled, pattern_spectrum_named(&dem, NamedSe::for_direction(d)).unwrap());
            let segs = spectrum_from_runs(&rt, Family::Segments, d).unwrap();
            assert_eq!(segs, segment_spectrum(&dem, d).unwrap());
        }
    }

    #[test]
    fn mismatched_direction() {
        let rt = run_table(&small_row(), Direction::Row);
        assert!(matches!(
            spectrum_from_runs(&rt, Family::Scaled, Direction::Column),
            Err(Error::DirectionMismatch { .. })
        ));
    }

    #[test]
    fn unipeak_rows() {
        assert!(is_unipeak(&row(&[1, 2, 3, 2, 1])));
        assert!(is_unipeak(&row(&[7])));
        assert!(!is_unipeak(&row(&[2, 1, 2])));
        assert!(!is_unipeak(&Dem::from_grid(&[vec![1], vec![1]]).unwrap()));
        assert!(!is_unipeak(&Dem::from_rows(&[vec![Some(1), None, Some(1)]]).unwrap()));
    }

    #[test]
    fn unipeak_multisets() {
        let eq = unipeak_entropy_equivalence(&row(&[1, 2, 3, 2, 1])).unwrap();
        assert_eq!(eq.derivative, vec![r(1, 9), r(3, 9), r(5, 9)]);
        assert!(eq.holds());
        assert!((eq.derivative_entropy - eq.spectrum_entropy).abs() < 1e-12);
        let eq = unipeak_entropy_equivalence(&row(&[4; 6])).unwrap();
        assert_eq!((eq.derivative_entropy, eq.spectrum_entropy), (0.0, 0.0));
        assert!(matches!(
            unipeak_entropy_equivalence(&row(&[2, 1, 2])),
            Err(Error::NotUnipeak(_))
        ));
    }

    #[test]
    fn reflections() {
        let dem = Dem::from_grid(&[vec![1, 2, 3], vec![4, 1, 1], vec![2, 3, 5]]).unwrap();
        let family = reflection_family(&dem, 1 << 10).unwrap();
        assert_eq!(family.len(), 8);
        assert_eq!(family[0], dem);
        assert_eq!(family.iter().filter(|m| **m != dem).count(), 7);
        for m in &family {
            assert!(run_profile_equal(&dem, m, Direction::Row));
        }
        assert!(matches!(reflection_family(&dem, 7), Err(Error::CapExceeded { needed: 8, .. })));
        let pal = reflection_family(&row(&[1, 3, 1]), 2).unwrap();
        assert_eq!(pal.len(), 2);
        assert_eq!(pal[0], pal[1]);
        let gappy = Dem::from_rows(&[vec![Some(1), None, Some(1)]]).unwrap();
        assert!(matches!(reflection_family(&gappy, 16), Err(Error::NonIntervalRow { .. })));
    }

    #[test]
    fn same_runs_without_reflection() {
        let (a, b) = same_runs_pair();
        assert!(run_profile_equal(&a, &b, Direction::Row));
        assert_ne!(b, reflect_rows(&a, &BTreeSet::from([0])).unwrap());
        let pa = pattern_spectrum_named(&a, NamedSe::B4).unwrap();
        let pb = pattern_spectrum_named(&b, NamedSe::B4).unwrap();
        assert_eq!(pa.probs(), pb.probs());
    }

    #[test]
    fn scaled_heights_change_runs_but_not_the_index() {
        let dem = small_row();
        let twice = scale_heights(&dem, 2).unwrap();
        assert!(!run_profile_equal(&dem, &twice, Direction::Row));
        let a = pattern_spectrum_named(&dem, NamedSe::B4).unwrap();
        let b = pattern_spectrum_named(&twice, NamedSe::B4).unwrap();
        assert_eq!(a.probs(), b.probs());
    }

    #[test]
    fn csv_export() {
        let csv = run_table(&row(&[1, 2, 1]), Direction::Row).to_csv();
        assert_eq!(csv, "direction,line,h,t,count\nrow,0,1,3,1\nrow,0,2,1,1\n");
    }
}
