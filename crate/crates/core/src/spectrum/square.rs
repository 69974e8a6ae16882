//! Granulometry by squares, one scale at a time.
//!
//! The erosion by the `(2n+3)`-square is the 3x3 erosion of the erosion by
//! the `(2n+1)`-square, so erosions are chained. Each opening is then a
//! separable dilation: a pass along rows, several rows side by side, then a
//! pass across rows on whole row slices. Both passes are confined to the
//! bounding box of the nonzero eroded cells, which shrinks as the scale
//! grows. Cells are stored in the narrowest type that holds the erosion.

use crate::dem::Dem;

/// Volumes of the openings by the `(2n+1)`-squares for `n = 0, 1, ...`,
/// ending with the first zero.
pub(crate) fn square_volumes(dem: &Dem) -> Vec<u64> {
    let (w, h) = (dem.width(), dem.height());
    let mut out = vec![dem.volume()];
    let full = Bounds {
        x0: 0,
        x1: w.saturating_sub(1),
        y0: 0,
        y1: h.saturating_sub(1),
    };
    let mut wide = Some((dem.values().to_vec(), full, 0));
    if dem.max_elevation() > u32::from(u16::MAX) {
        wide = wide.and_then(|(v, b, n)| Scales::new(v, w, h).run(&mut out, b, n));
    }
    let mut mid = wide.map(|(v, b, n)| (narrow::<_, u16>(v), b, n));
    if dem.max_elevation() > u32::from(u8::MAX) {
        mid = mid.and_then(|(v, b, n)| Scales::new(v, w, h).run(&mut out, b, n));
    }
    if let Some((v, b, n)) = mid {
        Scales::new(narrow::<_, u8>(v), w, h).run(&mut out, b, n);
    }
    out
}

fn narrow<A: Into<u32>, B: TryFrom<u32>>(values: Vec<A>) -> Vec<B> {
    values
        .into_iter()
        .map(|v| B::try_from(v.into()).unwrap_or_else(|_| unreachable!("checked against the maximum")))
        .collect()
}

trait Level: Copy + Ord + Default + Into<u64> + Into<u32> {
    /// Largest value a narrower type can take, if there is one.
    const NARROWER: Option<u32>;
    /// Rows dilated together along their length.
    type Group: Lane + AsRef<[Self]> + AsMut<[Self]>;
    fn sum(row: &[Self]) -> u64;
    /// Sum of the elementwise maximum.
    fn max_sum(a: &[Self], b: &[Self]) -> u64;

    /// `out[x][r] = src[r * stride + x]` for the first `count` lanes.
    fn gather(src: &[Self], stride: usize, count: usize, out: &mut [Self::Group]) {
        for r in 0..count {
            for (g, &v) in out.iter_mut().zip(&src[r * stride..]) {
                g.as_mut()[r] = v;
            }
        }
    }

    /// `dst[r * stride + x] = groups[x][r]` for the first `count` lanes.
    fn scatter(groups: &[Self::Group], dst: &mut [Self], stride: usize, count: usize) {
        for r in 0..count {
            for (d, g) in dst[r * stride..][..groups.len()].iter_mut().zip(groups) {
                *d = g.as_ref()[r];
            }
        }
    }
}

/// Rows are summed in pieces short enough for 32-bit partial sums.
const PIECE: usize = 1 << 15;

macro_rules! narrow_level {
    ($t:ty, $lanes:expr, $narrower:expr, $($extra:item),+) => {
        impl Level for $t {
            const NARROWER: Option<u32> = $narrower;
            type Group = [$t; $lanes];

            $($extra)*
        }
    };
    ($t:ty, $lanes:expr, $narrower:expr) => {
        impl Level for $t {
            const NARROWER: Option<u32> = $narrower;
            type Group = [$t; $lanes];

            fn sum(row: &[$t]) -> u64 {
                row.chunks(PIECE)
                    .map(|c| u64::from(c.iter().map(|&v| u32::from(v)).sum::<u32>()))
                    .sum()
            }

            fn max_sum(a: &[$t], b: &[$t]) -> u64 {
                a.chunks(PIECE)
                    .zip(b.chunks(PIECE))
                    .map(|(a, b)| u64::from(a.iter().zip(b).map(|(&x, &y)| u32::from(x.max(y))).sum::<u32>()))
                    .sum()
            }
        }
    };
}

#[cfg(target_arch = "x86_64")]
narrow_level!(
    u8,
    16,
    None,
    fn sum(row: &[u8]) -> u64 {
        bytes::max_sum(row, row)
    },
    fn max_sum(a: &[u8], b: &[u8]) -> u64 {
        bytes::max_sum(a, b)
    },
    fn gather(src: &[u8], stride: usize, count: usize, out: &mut [[u8; 16]]) {
        bytes::gather(src, stride, count, out)
    },
    fn scatter(groups: &[[u8; 16]], dst: &mut [u8], stride: usize, count: usize) {
        bytes::scatter(groups, dst, stride, count)
    }
);
#[cfg(not(target_arch = "x86_64"))]
narrow_level!(u8, 16, None);
narrow_level!(u16, 8, Some(u8::MAX as u32));

impl Level for u32 {
    const NARROWER: Option<u32> = Some(u16::MAX as u32);
    type Group = [u32; 4];

    fn sum(row: &[u32]) -> u64 {
        row.iter().map(|&v| u64::from(v)).sum()
    }

    fn max_sum(a: &[u32], b: &[u32]) -> u64 {
        a.iter().zip(b).map(|(&x, &y)| u64::from(x.max(y))).sum()
    }
}

/// Byte transposes between rows and groups of sixteen rows.
#[cfg(target_arch = "x86_64")]
mod bytes {
    use std::arch::x86_64::*;

    /// Interleaves row `i` with row `i + 8`; four rounds transpose a
    /// 16x16 block held one row per register.
    #[inline(always)]
    fn round(x: [__m128i; 16]) -> [__m128i; 16] {
        // SAFETY: SSE2 is part of the x86_64 baseline.
        unsafe {
            [
            _mm_unpacklo_epi8(x[0], x[8]),
            _mm_unpackhi_epi8(x[0], x[8]),
            _mm_unpacklo_epi8(x[1], x[9]),
            _mm_unpackhi_epi8(x[1], x[9]),
            _mm_unpacklo_epi8(x[2], x[10]),
            _mm_unpackhi_epi8(x[2], x[10]),
            _mm_unpacklo_epi8(x[3], x[11]),
            _mm_unpackhi_epi8(x[3], x[11]),
            _mm_unpacklo_epi8(x[4], x[12]),
            _mm_unpackhi_epi8(x[4], x[12]),
            _mm_unpacklo_epi8(x[5], x[13]),
            _mm_unpackhi_epi8(x[5], x[13]),
            _mm_unpacklo_epi8(x[6], x[14]),
            _mm_unpackhi_epi8(x[6], x[14]),
            _mm_unpacklo_epi8(x[7], x[15]),
            _mm_unpackhi_epi8(x[7], x[15]),
            ]
        }
    }

    #[inline(always)]
    fn transpose(x: [__m128i; 16]) -> [__m128i; 16] {
        round(round(round(round(x))))
    }

    /// Sum of the elementwise maximum.
    pub(super) fn max_sum(a: &[u8], b: &[u8]) -> u64 {
        let len = a.len().min(b.len());
        let full = len / 16 * 16;
        // SAFETY: SSE2 is part of the x86_64 baseline, and every load reads
        // 16 bytes inside `a` or `b`.
        let mut total = unsafe {
            let zero = _mm_setzero_si128();
            let mut acc = zero;
            for i in (0..full).step_by(16) {
                let x = _mm_loadu_si128(a[i..i + 16].as_ptr().cast());
                let y = _mm_loadu_si128(b[i..i + 16].as_ptr().cast());
                acc = _mm_add_epi64(acc, _mm_sad_epu8(_mm_max_epu8(x, y), zero));
            }
            let mut halves = [0u64; 2];
            _mm_storeu_si128(halves.as_mut_ptr().cast(), acc);
            halves[0] + halves[1]
        };
        for i in full..len {
            total += u64::from(a[i].max(b[i]));
        }
        total
    }

    pub(super) fn gather(src: &[u8], stride: usize, count: usize, out: &mut [[u8; 16]]) {
        let full = out.len() / 16 * 16;
        for x0 in (0..full).step_by(16) {
            let rows = std::array::from_fn(|r| {
                if r < count {
                    let row = &src[r * stride + x0..][..16];
                    // SAFETY: `row` holds 16 bytes.
                    unsafe { _mm_loadu_si128(row.as_ptr().cast()) }
                } else {
                    // SAFETY: SSE2 is part of the x86_64 baseline.
                    unsafe { _mm_setzero_si128() }
                }
            });
            for (g, v) in out[x0..x0 + 16].iter_mut().zip(transpose(rows)) {
                // SAFETY: `g` holds 16 bytes.
                unsafe { _mm_storeu_si128(g.as_mut_ptr().cast(), v) }
            }
        }
        for (x, g) in out.iter_mut().enumerate().skip(full) {
            *g = std::array::from_fn(|r| if r < count { src[r * stride + x] } else { 0 });
        }
    }

    pub(super) fn scatter(groups: &[[u8; 16]], dst: &mut [u8], stride: usize, count: usize) {
        let full = groups.len() / 16 * 16;
        for x0 in (0..full).step_by(16) {
            let cols = std::array::from_fn(|j| {
                // SAFETY: each group holds 16 bytes.
                unsafe { _mm_loadu_si128(groups[x0 + j].as_ptr().cast()) }
            });
            for (r, v) in transpose(cols).into_iter().take(count).enumerate() {
                let row = &mut dst[r * stride + x0..][..16];
                // SAFETY: `row` holds 16 bytes.
                unsafe { _mm_storeu_si128(row.as_mut_ptr().cast(), v) }
            }
        }
        for r in 0..count {
            for (x, g) in groups.iter().enumerate().skip(full) {
                dst[r * stride + x] = g[r];
            }
        }
    }
}

/// Elementwise maximum, for scalars and for groups of rows side by side.
trait Lane: Copy + Default {
    fn vmax(self, other: Self) -> Self;
}

impl<T: Level> Lane for T {
    fn vmax(self, other: T) -> T {
        self.max(other)
    }
}

impl<T: Level, const N: usize> Lane for [T; N]
where
    [T; N]: Default,
{
    #[inline(always)]
    fn vmax(mut self, other: Self) -> Self {
        for i in 0..N {
            self[i] = self[i].max(other[i]);
        }
        self
    }
}

/// Inclusive bounds of the nonzero cells.
#[derive(Debug, Clone, Copy)]
struct Bounds {
    x0: usize,
    x1: usize,
    y0: usize,
    y1: usize,
}

struct Scales<T: Level> {
    width: usize,
    height: usize,
    eroded: Vec<T>,
    tmp: Vec<T>,
    rows: Vec<T>,
    prefix: Vec<T>,
    suffix: Vec<T>,
    group_in: Vec<T::Group>,
    group_out: Vec<T::Group>,
    line: LineScratch<T::Group>,
}

impl<T: Level> Scales<T> {
    fn new(values: Vec<T>, width: usize, height: usize) -> Self {
        let n = values.len();
        Scales {
            width,
            height,
            eroded: values,
            tmp: vec![T::default(); n],
            rows: vec![T::default(); n],
            prefix: vec![T::default(); n],
            suffix: vec![T::default(); n],
            group_in: Vec::new(),
            group_out: Vec::new(),
            line: LineScratch::default(),
        }
    }

    /// Pushes volumes for scales after `n`, starting from the erosion at
    /// scale `n` within `bounds`. Stops early, handing back that state, once
    /// the erosion fits a narrower type.
    fn run(mut self, out: &mut Vec<u64>, bounds: Bounds, mut n: usize) -> Option<(Vec<T>, Bounds, usize)> {
        let mut bounds = self.tighten(bounds);
        while let Some(b) = bounds {
            if let Some(limit) = T::NARROWER {
                if self.max_within(b) <= limit {
                    return Some((self.eroded, b, n));
                }
            }
            n += 1;
            bounds = self.erode(b).and_then(|b| self.tighten(b));
            match bounds {
                Some(b) => out.push(self.opened_volume(b, n)),
                None => out.push(0),
            }
        }
        None
    }

    fn max_within(&self, b: Bounds) -> u32 {
        (b.y0..=b.y1)
            .map(|y| &self.eroded[y * self.width + b.x0..=y * self.width + b.x1])
            .flat_map(|row| row.iter().max())
            .max()
            .map_or(0, |&v| v.into())
    }

    /// Trims empty border rows and columns, `None` when nothing is left.
    fn tighten(&self, b: Bounds) -> Option<Bounds> {
        if self.eroded.is_empty() {
            return None;
        }
        let w = self.width;
        let zero = T::default();
        let mut rows = (b.y0..=b.y1).filter(|&y| self.eroded[y * w + b.x0..=y * w + b.x1].iter().any(|&v| v > zero));
        let y0 = rows.next()?;
        let y1 = rows.last().unwrap_or(y0);
        let mut x0 = b.x1;
        let mut x1 = b.x0;
        for y in y0..=y1 {
            let row = &self.eroded[y * w + b.x0..=y * w + b.x1];
            if let Some(first) = row.iter().position(|&v| v > zero) {
                x0 = x0.min(b.x0 + first);
                x1 = x1.max(b.x0 + row.iter().rposition(|&v| v > zero).unwrap_or(first));
            }
        }
        Some(Bounds { x0, x1, y0, y1 })
    }

    /// 3x3 erosion in place, outside reads as 0.
    fn erode(&mut self, b: Bounds) -> Option<Bounds> {
        if b.x1 < b.x0 + 2 || b.y1 < b.y0 + 2 {
            for y in b.y0..=b.y1 {
                self.eroded[y * self.width + b.x0..=y * self.width + b.x1].fill(T::default());
            }
            return None;
        }
        let w = self.width;
        for y in b.y0..=b.y1 {
            let src = &self.eroded[y * w + b.x0..=y * w + b.x1];
            let dst = &mut self.tmp[y * w + b.x0 + 1..y * w + b.x1];
            combine(dst, src, &src[1..], &src[2..], T::min);
        }
        let (xa, xb) = (b.x0 + 1, b.x1 - 1);
        for y in b.y0 + 1..b.y1 {
            let (above, rest) = self.tmp.split_at(y * w);
            let above = &above[(y - 1) * w + xa..=(y - 1) * w + xb];
            let here = &rest[xa..=xb];
            let below = &rest[w + xa..=w + xb];
            let dst = &mut self.eroded[y * w + xa..=y * w + xb];
            combine(dst, above, here, below, T::min);
            self.eroded[y * w + b.x0] = T::default();
            self.eroded[y * w + b.x1] = T::default();
        }
        self.eroded[b.y0 * w + b.x0..=b.y0 * w + b.x1].fill(T::default());
        self.eroded[b.y1 * w + b.x0..=b.y1 * w + b.x1].fill(T::default());
        Some(Bounds {
            x0: xa,
            x1: xb,
            y0: b.y0 + 1,
            y1: b.y1 - 1,
        })
    }

    /// Volume of the dilation of the current erosion by the `(2n+1)`-square.
    fn opened_volume(&mut self, b: Bounds, n: usize) -> u64 {
        let w = self.width;
        let ox0 = b.x0.saturating_sub(n);
        let ox1 = (b.x1 + n).min(w - 1);
        let oy0 = b.y0.saturating_sub(n);
        let oy1 = (b.y1 + n).min(self.height - 1);
        let span = ox1 - ox0 + 1;
        let len = b.y1 - b.y0 + 1;

        let width = b.x1 - b.x0 + 1;
        let lanes = T::Group::default().as_ref().len();
        for y in (b.y0..=b.y1).step_by(lanes) {
            let count = lanes.min(b.y1 + 1 - y);
            self.group_in.clear();
            self.group_in.resize(width, Default::default());
            T::gather(&self.eroded[y * w + b.x0..], w, count, &mut self.group_in);
            self.group_out.resize(span, Default::default());
            dilate_line(&self.group_in, n, b.x0 - ox0, &mut self.group_out, &mut self.line);
            T::scatter(&self.group_out, &mut self.rows[(y - b.y0) * span..], span, count);
        }

        let p0 = oy0 as isize - b.y0 as isize;
        let p1 = oy1 as isize - b.y0 as isize;
        let mut total = 0u64;
        for c0 in (0..span).step_by(STRIP) {
            let strip = Strip {
                rows: &self.rows[..len * span],
                span,
                c0,
                width: STRIP.min(span - c0),
                len,
            };
            total += strip.dilated_sum(n, p0, p1, &mut self.prefix, &mut self.suffix, &mut self.tmp);
        }
        total
    }
}

/// Columns of the row-dilated block handled together across rows.
const STRIP: usize = 256;

struct Strip<'a, T> {
    rows: &'a [T],
    span: usize,
    c0: usize,
    width: usize,
    len: usize,
}

impl<T: Level> Strip<'_, T> {
    fn src(&self, i: usize) -> &[T] {
        &self.rows[i * self.span + self.c0..][..self.width]
    }

    /// Sum over output rows `p0..=p1` of the maximum over rows within `n`.
    fn dilated_sum(&self, n: usize, p0: isize, p1: isize, pre: &mut [T], suf: &mut [T], right: &mut [T]) -> u64 {
        let (len, sw) = (self.len, self.width);
        let k = 2 * n + 1;
        let from = (len - 1).saturating_sub(2 * n);
        for start in (0..len).step_by(k) {
            let end = (start + k).min(len);
            pre[start * sw..(start + 1) * sw].copy_from_slice(self.src(start));
            for i in start + 1..end {
                let (done, o) = pre.split_at_mut(i * sw);
                max_into(&mut o[..sw], &done[(i - 1) * sw..], self.src(i));
            }
            let last = end - 1;
            suf[last * sw..end * sw].copy_from_slice(self.src(last));
            for i in (start..last).rev() {
                let (o, next) = suf.split_at_mut((i + 1) * sw);
                max_into(&mut o[i * sw..], &next[..sw], self.src(i));
            }
        }
        let right = &mut right[..(len - from) * sw];
        right[(len - 1 - from) * sw..].copy_from_slice(self.src(len - 1));
        for i in (from..len - 1).rev() {
            let (o, next) = right.split_at_mut((i + 1 - from) * sw);
            max_into(&mut o[(i - from) * sw..], &next[..sw], self.src(i));
        }

        let (n_, last) = (n as isize, len as isize - 1);
        let mut total = 0u64;
        // Output rows clipped on one side repeat prefix or tail rows.
        let mut at = p0;
        while at <= p1.min(n_) {
            let hi = (at + n_).min(last);
            let upto = if hi == last { p1.min(n_) } else { at };
            total += (upto - at + 1) as u64 * T::sum(row(pre, sw, hi as usize));
            at = upto + 1;
        }
        for p in n_ + 1..=p1.min(last - 1 - n_) {
            total += T::max_sum(row(suf, sw, (p - n_) as usize), row(pre, sw, (p + n_) as usize));
        }
        for p in (n_ + 1).max(last - n_)..=p1 {
            total += T::sum(row(right, sw, (p - n_) as usize - from));
        }
        total
    }
}

fn row<T>(v: &[T], span: usize, i: usize) -> &[T] {
    &v[i * span..(i + 1) * span]
}

/// `out[i] = op(op(a[i], b[i]), c[i])` over the common length, in fixed
/// chunks so the loop vectorizes.
#[inline(always)]
fn combine<T: Copy>(out: &mut [T], a: &[T], b: &[T], c: &[T], op: impl Fn(T, T) -> T) {
    const CHUNK: usize = 32;
    let len = out.len().min(a.len()).min(b.len()).min(c.len());
    let split = len - len % CHUNK;
    for i in (0..split).step_by(CHUNK) {
        let a: &[T; CHUNK] = a[i..i + CHUNK].try_into().unwrap();
        let b: &[T; CHUNK] = b[i..i + CHUNK].try_into().unwrap();
        let c: &[T; CHUNK] = c[i..i + CHUNK].try_into().unwrap();
        let t: [T; CHUNK] = std::array::from_fn(|k| op(op(a[k], b[k]), c[k]));
        out[i..i + CHUNK].copy_from_slice(&t);
    }
    for i in split..len {
        out[i] = op(op(a[i], b[i]), c[i]);
    }
}

fn max_into<T: Level>(out: &mut [T], a: &[T], b: &[T]) {
    combine(out, a, b, b, T::max);
}

#[derive(Default)]
struct LineScratch<T> {
    pre: Vec<T>,
    suf: Vec<T>,
    right: Vec<T>,
}

/// `out[j] = max { line[i] : |j - offset - i| <= n }`; every `j` must have
/// some cell of `line` within `n`.
fn dilate_line<T: Lane>(line: &[T], n: usize, offset: usize, out: &mut [T], s: &mut LineScratch<T>) {
    let len = line.len();
    let k = 2 * n + 1;
    s.pre.clear();
    s.pre.extend_from_slice(line);
    s.suf.clear();
    s.suf.extend_from_slice(line);
    for start in (0..len).step_by(k) {
        let end = (start + k).min(len);
        let block = &mut s.pre[start..end];
        let mut acc = T::default();
        for v in block.iter_mut() {
            acc = acc.vmax(*v);
            *v = acc;
        }
        let block = &mut s.suf[start..end];
        let mut acc = T::default();
        for v in block.iter_mut().rev() {
            acc = acc.vmax(*v);
            *v = acc;
        }
    }
    let from = (len - 1).saturating_sub(2 * n);
    s.right.clear();
    s.right.extend_from_slice(&line[from..]);
    let mut acc = T::default();
    for v in s.right.iter_mut().rev() {
        acc = acc.vmax(*v);
        *v = acc;
    }

    // Windows clipped on the left, full windows, windows clipped on the right.
    let (n_, last) = (n as isize, len as isize - 1);
    let a_end = ((n_ + offset as isize + 1).max(0) as usize).min(out.len());
    let c_start = (((n_ + 1).max(last - n_) + offset as isize) as usize).clamp(a_end, out.len());
    let shift = n - offset;
    let (a, rest) = out.split_at_mut(a_end);
    let (b, c) = rest.split_at_mut(c_start - a_end);
    let copied = a.len().min(len - shift);
    a[..copied].copy_from_slice(&s.pre[shift..shift + copied]);
    a[copied..].fill(s.pre[len - 1]);
    if !b.is_empty() {
        let lo = a_end - offset - n;
        let hi = a_end - offset + n;
        for ((o, &x), &y) in b.iter_mut().zip(&s.suf[lo..]).zip(&s.pre[hi..]) {
            *o = x.vmax(y);
        }
    }
    if !c.is_empty() {
        let at = c_start - offset - n - from;
        c.copy_from_slice(&s.right[at..at + c.len()]);
    }
}
