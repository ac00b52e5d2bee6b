use alloc::vec;
use alloc::vec::Vec;

use crate::ImageBuffer;

pub const BLOCK: usize = 8;

/// Block-DCT coefficients laid out like the image: the coefficients of the
/// block at `(8i, 8j)` occupy the same 8x8 tile. Dimensions are padded up to
/// multiples of 8; `orig_shape` is the unpadded image size.
#[derive(Debug, Clone, PartialEq)]
pub struct DctPlane {
    pub rows: usize,
    pub cols: usize,
    pub orig_shape: (usize, usize),
    pub data: Vec<f64>,
}

impl DctPlane {
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Frequency index `(u, v)` within the block for plane position `(r, c)`.
    #[inline]
    pub fn freq(r: usize, c: usize) -> (usize, usize) {
        (r % BLOCK, c % BLOCK)
    }
}

/// Orthonormal DCT-II basis, `basis[k][n] = a(k)·cos((2n+1)kπ/16)`.
fn basis() -> [[f64; BLOCK]; BLOCK] {
    let mut b = [[0.0; BLOCK]; BLOCK];
    let n = BLOCK as f64;
    for (k, row) in b.iter_mut().enumerate() {
        let scale = if k == 0 { libm::sqrt(1.0 / n) } else { libm::sqrt(2.0 / n) };
        for (i, v) in row.iter_mut().enumerate() {
            *v = scale * libm::cos((2 * i + 1) as f64 * k as f64 * core::f64::consts::PI / (2.0 * n));
        }
    }
    b
}

fn padded(n: usize) -> usize {
    n.div_ceil(BLOCK) * BLOCK
}

/// 2-D orthonormal DCT-II of every non-overlapping 8x8 block. Images whose
/// sides are not multiples of 8 are padded by edge replication.
pub fn block_dct(img: &ImageBuffer) -> DctPlane {
    let (rows, cols) = img.shape();
    let (pr, pc) = (padded(rows), padded(cols));
    let mut src = vec![0.0; pr * pc];
    for r in 0..pr {
        for c in 0..pc {
            src[r * pc + c] = img.get(r.min(rows - 1), c.min(cols - 1));
        }
    }
    let data = transform(&src, pr, pc, false);
    DctPlane {
        rows: pr,
        cols: pc,
        orig_shape: (rows, cols),
        data,
    }
}

/// Inverse of [`block_dct`], cropped back to the original image size.
pub fn block_idct(plane: &DctPlane) -> ImageBuffer {
    let full = transform(&plane.data, plane.rows, plane.cols, true);
    let (rows, cols) = plane.orig_shape;
    ImageBuffer::from_fn(rows, cols, |r, c| full[r * plane.cols + c])
}

fn transform(src: &[f64], rows: usize, cols: usize, inverse: bool) -> Vec<f64> {
    let b = basis();
    let mut out = vec![0.0; rows * cols];
    let mut block = [[0.0; BLOCK]; BLOCK];
    let mut tmp = [[0.0; BLOCK]; BLOCK];
    for br in (0..rows).step_by(BLOCK) {
        for bc in (0..cols).step_by(BLOCK) {
            for i in 0..BLOCK {
                for j in 0..BLOCK {
                    block[i][j] = src[(br + i) * cols + bc + j];
                }
            }
            // Forward: C·X·Cᵀ. Inverse: Cᵀ·X·C.
            for i in 0..BLOCK {
                for j in 0..BLOCK {
                    let mut s = 0.0;
                    for k in 0..BLOCK {
                        s += if inverse { b[k][i] * block[k][j] } else { b[i][k] * block[k][j] };
                    }
                    tmp[i][j] = s;
                }
            }
            for i in 0..BLOCK {
                for j in 0..BLOCK {
                    let mut s = 0.0;
                    for k in 0..BLOCK {
                        s += if inverse { tmp[i][k] * b[k][j] } else { tmp[i][k] * b[j][k] };
                    }
                    out[(br + i) * cols + bc + j] = s;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_block_has_only_dc() {
        let img = ImageBuffer::filled(8, 8, 37.0);
        let p = block_dct(&img);
        assert!((p.get(0, 0) - 8.0 * 37.0).abs() < 1e-12);
        for r in 0..8 {
            for c in 0..8 {
                if (r, c) != (0, 0) {
                    assert!(p.get(r, c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pads_and_crops_odd_sizes() {
        let img = ImageBuffer::from_fn(13, 10, |r, c| (r * 31 + c * 7) as f64 % 97.0);
        let p = block_dct(&img);
        assert_eq!((p.rows, p.cols), (16, 16));
        let back = block_idct(&p);
        assert_eq!(back.shape(), (13, 10));
        let err = back
            .as_slice()
            .iter()
            .zip(img.as_slice())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10);
    }
}
