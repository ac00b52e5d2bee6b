//! Nonlocal patch grouping: block matching inside a search window, the
//! nonlocal-means reference group, and overlap-averaging aggregation.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::{Error, ImageBuffer, Result};

/// Block-matching geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupingParams {
    /// Patch side in pixels; patches are `patch_side²`-dimensional.
    pub patch_side: usize,
    /// Patches per group (`m`).
    pub group_size: usize,
    /// Side of the square search window (`L`).
    pub window: usize,
    /// Spacing between reference patches.
    pub stride: usize,
}

impl GroupingParams {
    /// Uses the default reference stride of `patch_side − 3` (at least 1).
    pub fn new(patch_side: usize, group_size: usize, window: usize) -> Result<Self> {
        Self {
            patch_side,
            group_size,
            window,
            stride: patch_side.saturating_sub(3).max(1),
        }
        .validated()
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.stride = stride;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.patch_side == 0 {
            return Err(Error::param("patch_side", "must be at least 1"));
        }
        if self.group_size == 0 {
            return Err(Error::param("group_size", "must be at least 1"));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be at least 1"));
        }
        if self.window < self.patch_side {
            return Err(Error::param("window", "must be at least the patch side"));
        }
        Ok(self)
    }

    pub fn patch_dim(&self) -> usize {
        self.patch_side * self.patch_side
    }
}

/// `d x m` matrix of vectorized patches with their top-left coordinates.
/// Column 0 is the reference patch.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGroup {
    pub data: Matrix,
    pub coords: Vec<(usize, usize)>,
    pub patch_side: usize,
    /// Set when the search window held fewer than `m` candidates and columns
    /// were repeated to fill the group.
    pub padded: bool,
}

impl PatchGroup {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Same coordinates, new contents.
    pub fn with_data(&self, data: Matrix) -> Result<Self> {
        if data.shape() != self.data.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.data.shape(),
                found: data.shape(),
            });
        }
        Ok(Self {
            data,
            coords: self.coords.clone(),
            patch_side: self.patch_side,
            padded: self.padded,
        })
    }
}

/// Top-left positions of reference patches on a `stride` grid, with the last
/// row and column clamped to the border so every pixel is covered.
pub fn reference_positions(rows: usize, cols: usize, params: &GroupingParams) -> Result<Vec<(usize, usize)>> {
    let side = params.patch_side;
    if rows < side || cols < side {
        return Err(Error::ImageTooSmall { rows, cols, min: side });
    }
    let axis = |n: usize| {
        let last = n - side;
        let mut v: Vec<usize> = (0..=last).step_by(params.stride).collect();
        if *v.last().unwrap() != last {
            v.push(last);
        }
        v
    };
    let (rs, cs) = (axis(rows), axis(cols));
    Ok(rs.iter().flat_map(|&r| cs.iter().map(move |&c| (r, c))).collect())
}

/// Copies the patch at `pos` into `out`, row by row.
pub fn read_patch(img: &ImageBuffer, pos: (usize, usize), side: usize, out: &mut [f64]) {
    let cols = img.cols();
    let data = img.as_slice();
    for pr in 0..side {
        let start = (pos.0 + pr) * cols + pos.1;
        out[pr * side..(pr + 1) * side].copy_from_slice(&data[start..start + side]);
    }
}

fn check_fits(img: &ImageBuffer, pos: (usize, usize), side: usize) -> Result<()> {
    if pos.0 + side > img.rows() || pos.1 + side > img.cols() {
        return Err(Error::PatchOutOfBounds {
            row: pos.0,
            col: pos.1,
            rows: img.rows(),
            cols: img.cols(),
        });
    }
    Ok(())
}

/// Gathers the patches of `img` at fixed coordinates.
pub fn group_at(img: &ImageBuffer, coords: &[(usize, usize)], side: usize) -> Result<PatchGroup> {
    let d = side * side;
    let mut data = Matrix::zeros(d, coords.len());
    for (k, &pos) in coords.iter().enumerate() {
        check_fits(img, pos, side)?;
        read_patch(img, pos, side, data.col_mut(k));
    }
    Ok(PatchGroup {
        data,
        coords: coords.to_vec(),
        patch_side: side,
        padded: false,
    })
}

/// Block matching: the `m` patches in the search window around `ref_pos` that
/// are closest (squared Euclidean distance) to the reference patch.
///
/// The reference is always column 0; the rest follow by ascending distance,
/// ties in raster order. The window is clipped at the image border. If it
/// holds fewer than `m` patches the selection is repeated cyclically and the
/// group is flagged as padded.
pub fn extract_group(img: &ImageBuffer, ref_pos: (usize, usize), params: &GroupingParams) -> Result<PatchGroup> {
    let side = params.patch_side;
    check_fits(img, ref_pos, side)?;
    let (r_lo, r_hi) = window_span(ref_pos.0, img.rows() - side, params.window);
    let (c_lo, c_hi) = window_span(ref_pos.1, img.cols() - side, params.window);

    let d = params.patch_dim();
    let mut reference = vec![0.0; d];
    read_patch(img, ref_pos, side, &mut reference);

    let cols = img.cols();
    let pix = img.as_slice();
    let mut scored: Vec<(f64, (usize, usize))> = Vec::with_capacity((r_hi - r_lo + 1) * (c_hi - c_lo + 1));
    for r in r_lo..=r_hi {
        for c in c_lo..=c_hi {
            if (r, c) == ref_pos {
                continue;
            }
            let mut dist = 0.0;
            for pr in 0..side {
                let row = &pix[(r + pr) * cols + c..(r + pr) * cols + c + side];
                let refrow = &reference[pr * side..(pr + 1) * side];
                for (a, b) in row.iter().zip(refrow) {
                    let t = a - b;
                    dist += t * t;
                }
            }
            scored.push((dist, (r, c)));
        }
    }
    // Stable: equal distances keep raster order.
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));

    let m = params.group_size;
    let mut picked = Vec::with_capacity(m);
    picked.push(ref_pos);
    picked.extend(scored.iter().take(m - 1).map(|s| s.1));
    let available = picked.len();
    let padded = available < m;
    for k in available..m {
        picked.push(picked[k % available]);
    }

    let mut group = group_at(img, &picked, side)?;
    group.padded = padded;
    Ok(group)
}

fn window_span(center: usize, last: usize, window: usize) -> (usize, usize) {
    let half = window / 2;
    (center.saturating_sub(half), (center + half).min(last))
}

/// Nonlocal-means weights of every column against column 0:
/// `w_k ∝ exp(−‖x_0 − x_k‖² / h)`, normalized to sum to one.
pub fn similarity_weights(group: &Matrix, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::param("h", "kernel width must be positive"));
    }
    if group.cols() == 0 {
        return Err(Error::param("group", "group is empty"));
    }
    let anchor = group.col(0);
    let mut w: Vec<f64> = (0..group.cols())
        .map(|k| {
            let dist: f64 = anchor.iter().zip(group.col(k)).map(|(a, b)| (a - b) * (a - b)).sum();
            libm::exp(-dist / h)
        })
        .collect();
    // The anchor has distance zero, so the total is at least one.
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

/// Reference group estimate: every column is replaced by the weighted average
/// of all columns, weighted by similarity to the reference patch.
pub fn estimate_reference_group(current: &PatchGroup, h: f64) -> Result<PatchGroup> {
    let w = similarity_weights(&current.data, h)?;
    let (d, m) = current.data.shape();
    let mut mean = vec![0.0; d];
    for (k, &wk) in w.iter().enumerate() {
        for (acc, &v) in mean.iter_mut().zip(current.data.col(k)) {
            *acc += wk * v;
        }
    }
    let mut data = Matrix::zeros(d, m);
    for k in 0..m {
        data.col_mut(k).copy_from_slice(&mean);
    }
    current.with_data(data)
}

/// Running sums for overlap averaging.
#[derive(Debug, Clone)]
pub struct Accumulator {
    rows: usize,
    cols: usize,
    sum: Vec<f64>,
    count: Vec<f64>,
}

impl Accumulator {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            sum: vec![0.0; rows * cols],
            count: vec![0.0; rows * cols],
        }
    }

    pub fn add_group(&mut self, group: &PatchGroup) -> Result<()> {
        let side = group.patch_side;
        for (k, &(r, c)) in group.coords.iter().enumerate() {
            if r + side > self.rows || c + side > self.cols {
                return Err(Error::PatchOutOfBounds {
                    row: r,
                    col: c,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
            let col = group.data.col(k);
            for pr in 0..side {
                let base = (r + pr) * self.cols + c;
                let src = &col[pr * side..(pr + 1) * side];
                for (i, &v) in src.iter().enumerate() {
                    self.sum[base + i] += v;
                    self.count[base + i] += 1.0;
                }
            }
        }
        Ok(())
    }

    /// Per-pixel sum of patch contributions.
    pub fn sums(&self) -> &[f64] {
        &self.sum
    }

    /// Per-pixel number of covering patches.
    pub fn counts(&self) -> &[f64] {
        &self.count
    }

    pub fn first_uncovered(&self) -> Option<(usize, usize)> {
        self.count
            .iter()
            .position(|&c| c == 0.0)
            .map(|i| (i / self.cols, i % self.cols))
    }

    /// Averages the contributions; every pixel must be covered.
    pub fn finish(&self) -> Result<ImageBuffer> {
        if let Some((row, col)) = self.first_uncovered() {
            return Err(Error::UncoveredPixel { row, col });
        }
        let data = self.sum.iter().zip(&self.count).map(|(s, c)| s / c).collect();
        Ok(ImageBuffer::from_raw(self.rows, self.cols, data))
    }
}

/// Writes every patch of every group back at its coordinates and averages
/// overlapping contributions. Accumulation runs in group order, then column
/// order, so the result does not depend on how the groups were produced.
pub fn aggregate(groups: &[PatchGroup], shape: (usize, usize)) -> Result<ImageBuffer> {
    let mut acc = Accumulator::new(shape.0, shape.1);
    for g in groups {
        acc.add_group(g)?;
    }
    acc.finish()
}
