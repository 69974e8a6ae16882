//! Running minimum/maximum over fixed windows in O(1) comparisons per
//! sample (van Herk / Gil-Werman block prefix and suffix scans).
//!
//! Samples outside the input read as 0. Elevations are non-negative, so 0
//! annihilates a minimum and is neutral for a maximum.

pub(crate) trait Extreme {
    fn pick(a: u32, b: u32) -> u32;
}

pub(crate) struct Min;
pub(crate) struct Max;

impl Extreme for Min {
    #[inline(always)]
    fn pick(a: u32, b: u32) -> u32 {
        a.min(b)
    }
}

impl Extreme for Max {
    #[inline(always)]
    fn pick(a: u32, b: u32) -> u32 {
        a.max(b)
    }
}

/// Reusable scratch space for 1-D running extremes.
#[derive(Default)]
pub(crate) struct LineScratch {
    padded: Vec<u32>,
    prefix: Vec<u32>,
    suffix: Vec<u32>,
}

impl LineScratch {
    /// `out[i] = extreme of values[i - before ..= i + after]`, zero padded.
    pub fn run<E: Extreme>(&mut self, values: &[u32], before: usize, after: usize, out: &mut Vec<u32>) {
        let len = values.len();
        let k = before + after + 1;
        out.clear();
        if len == 0 {
            return;
        }
        if k == 1 {
            out.extend_from_slice(values);
            return;
        }
        let padded = &mut self.padded;
        padded.clear();
        padded.resize(before, 0);
        padded.extend_from_slice(values);
        padded.resize(before + len + after, 0);

        let n = padded.len();
        self.prefix.resize(n, 0);
        self.suffix.resize(n, 0);
        let (prefix, suffix) = (&mut self.prefix, &mut self.suffix);
        for block in (0..n).step_by(k) {
            let end = (block + k).min(n);
            let mut acc = padded[block];
            prefix[block] = acc;
            for i in block + 1..end {
                acc = E::pick(acc, padded[i]);
                prefix[i] = acc;
            }
            let mut acc = padded[end - 1];
            suffix[end - 1] = acc;
            for i in (block..end - 1).rev() {
                acc = E::pick(acc, padded[i]);
                suffix[i] = acc;
            }
        }
        out.extend((0..len).map(|s| E::pick(suffix[s], prefix[s + k - 1])));
    }
}

/// Vertical counterpart of [`LineScratch::run`] over a row-major grid,
/// processing whole rows at a time.
#[derive(Default)]
pub(crate) struct ColumnScratch {
    prefix: Vec<u32>,
    suffix: Vec<u32>,
}

impl ColumnScratch {
    pub fn run<E: Extreme>(
        &mut self,
        src: &[u32],
        width: usize,
        height: usize,
        before: usize,
        after: usize,
        out: &mut Vec<u32>,
    ) {
        let k = before + after + 1;
        out.clear();
        if k == 1 {
            out.extend_from_slice(src);
            return;
        }
        let rows = height + before + after;
        let row = |p: usize| -> Option<&[u32]> {
            (p >= before && p < before + height).then(|| &src[(p - before) * width..(p - before + 1) * width])
        };
        self.prefix.clear();
        self.prefix.resize(rows * width, 0);
        self.suffix.clear();
        self.suffix.resize(rows * width, 0);
        for block in (0..rows).step_by(k) {
            let end = (block + k).min(rows);
            for p in block..end {
                let (done, rest) = self.prefix.split_at_mut(p * width);
                let dst = &mut rest[..width];
                match row(p) {
                    Some(r) => dst.copy_from_slice(r),
                    None => dst.fill(0),
                }
                if p > block {
                    let prev = &done[(p - 1) * width..];
                    for (d, q) in dst.iter_mut().zip(prev) {
                        *d = E::pick(*d, *q);
                    }
                }
            }
            for p in (block..end).rev() {
                let (head, tail) = self.suffix.split_at_mut((p + 1) * width);
                let dst = &mut head[p * width..];
                match row(p) {
                    Some(r) => dst.copy_from_slice(r),
                    None => dst.fill(0),
                }
                if p + 1 < end {
                    for (d, q) in dst.iter_mut().zip(&tail[..width]) {
                        *d = E::pick(*d, *q);
                    }
                }
            }
        }
        out.resize(height * width, 0);
        for y in 0..height {
            let s = &self.suffix[y * width..(y + 1) * width];
            let g = &self.prefix[(y + k - 1) * width..(y + k) * width];
            for ((o, a), b) in out[y * width..(y + 1) * width].iter_mut().zip(s).zip(g) {
                *o = E::pick(*a, *b);
            }
        }
    }
}

fn centered<E: Extreme>(values: &[u32], window: usize) -> Vec<u32> {
    assert!(window % 2 == 1, "window length must be odd, got {window}");
    let mut out = Vec::with_capacity(values.len());
    LineScratch::default().run::<E>(values, window / 2, window / 2, &mut out);
    out
}

/// Running minimum over a centered window of odd length, reading 0 beyond
/// both ends.
///
/// # Panics
/// If `window` is even (including 0).
pub fn erode_line_streaming(values: &[u32], window: usize) -> Vec<u32> {
    centered::<Min>(values, window)
}

/// Running maximum over a centered window of odd length, reading 0 beyond
/// both ends.
///
/// # Panics
/// If `window` is even (including 0).
pub fn dilate_line_streaming(values: &[u32], window: usize) -> Vec<u32> {
    centered::<Max>(values, window)
}

/// Opening of a 1-D signal by a segment of `length` cells: the supremum of
/// the minima over every fully contained window covering each sample, 0
/// where none fits.
pub fn open_line(values: &[u32], length: usize) -> Vec<u32> {
    let mut scratch = LineScratch::default();
    let mut eroded = Vec::new();
    let mut out = Vec::new();
    open_line_with(&mut scratch, values, length, &mut eroded, &mut out);
    out
}

pub(crate) fn open_line_with(
    scratch: &mut LineScratch,
    values: &[u32],
    length: usize,
    eroded: &mut Vec<u32>,
    out: &mut Vec<u32>,
) {
    assert!(length >= 1, "segment length must be positive");
    // Anchor the window at its first cell for erosion and its last for
    // dilation; any anchoring gives the same opening.
    scratch.run::<Min>(values, 0, length - 1, eroded);
    scratch.run::<Max>(eroded, length - 1, 0, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(values: &[u32], before: usize, after: usize, min: bool) -> Vec<u32> {
        let at = |i: isize| {
            if i < 0 || i >= values.len() as isize {
                0
            } else {
                values[i as usize]
            }
        };
        (0..values.len() as isize)
            .map(|i| {
                let w = (i - before as isize..=i + after as isize).map(at);
                if min {
                    w.min().unwrap()
                } else {
                    w.max().unwrap()
                }
            })
            .collect()
    }

    #[test]
    fn window_one_is_identity() {
        let v = vec![4, 1, 7];
        assert_eq!(erode_line_streaming(&v, 1), v);
        assert_eq!(dilate_line_streaming(&v, 1), v);
    }

    #[test]
    fn worked_examples() {
        assert_eq!(erode_line_streaming(&[2, 5, 5, 2, 2], 3), vec![0, 2, 2, 2, 0]);
        assert_eq!(dilate_line_streaming(&[0, 2, 2, 2, 0], 3), vec![2, 2, 2, 2, 2]);
        assert_eq!(open_line(&[2, 5, 5, 2, 2], 3), vec![2, 2, 2, 2, 2]);
        assert_eq!(open_line(&[3; 5], 5), vec![3; 5]);
        assert_eq!(open_line(&[3; 5], 7), vec![0; 5]);
        assert_eq!(open_line(&[1, 4, 4, 1], 2), vec![1, 4, 4, 1]);
    }

    #[test]
    #[should_panic]
    fn even_window_panics() {
        erode_line_streaming(&[1, 2], 2);
    }

    #[test]
    fn asymmetric_windows_match_naive() {
        let v: Vec<u32> = (0..37).map(|i| (i * 7919 % 13) as u32).collect();
        let mut s = LineScratch::default();
        let mut out = Vec::new();
        for before in 0..6 {
            for after in 0..6 {
                s.run::<Min>(&v, before, after, &mut out);
                assert_eq!(out, naive(&v, before, after, true));
                s.run::<Max>(&v, before, after, &mut out);
                assert_eq!(out, naive(&v, before, after, false));
            }
        }
    }

    #[test]
    fn columns_match_rows_of_transpose() {
        let (w, h) = (5, 11);
        let grid: Vec<u32> = (0..w * h).map(|i| (i * 31 % 17) as u32).collect();
        let mut cs = ColumnScratch::default();
        let mut out = Vec::new();
        for (before, after) in [(0, 0), (1, 1), (2, 0), (0, 3), (4, 4), (12, 12)] {
            cs.run::<Min>(&grid, w, h, before, after, &mut out);
            for x in 0..w {
                let col: Vec<u32> = (0..h).map(|y| grid[y * w + x]).collect();
                let expect = naive(&col, before, after, true);
                let got: Vec<u32> = (0..h).map(|y| out[y * w + x]).collect();
                assert_eq!(got, expect);
            }
            cs.run::<Max>(&grid, w, h, before, after, &mut out);
            for x in 0..w {
                let col: Vec<u32> = (0..h).map(|y| grid[y * w + x]).collect();
                let got: Vec<u32> = (0..h).map(|y| out[y * w + x]).collect();
                assert_eq!(got, naive(&col, before, after, false));
            }
        }
    }
}
