use alloc::vec::Vec;

use super::dct::{block_dct, block_idct, DctPlane, BLOCK};
use crate::{Error, ImageBuffer, Result};

/// Baseline luminance quantization table (row-major, ITU T.81 Annex K).
pub const BASE_LUMINANCE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Quality-factor scaling of the base table as done by the IJG encoder:
/// `scale = 5000/qf` below 50, `200 − 2·qf` otherwise; entries are
/// `(base·scale + 50) / 100` in integer arithmetic, clamped to 1..=255.
pub fn quality_matrix(qf: u32) -> Result<[u16; 64]> {
    if !(1..=100).contains(&qf) {
        return Err(Error::QualityOutOfRange(qf));
    }
    let scale = if qf < 50 { 5000 / qf } else { 200 - 2 * qf };
    let mut q = [0u16; 64];
    for (dst, &base) in q.iter_mut().zip(BASE_LUMINANCE.iter()) {
        let v = (u32::from(base) * scale + 50) / 100;
        *dst = v.clamp(1, 255) as u16;
    }
    Ok(q)
}

/// Mean of the nine lowest-frequency (upper-left 3x3) table entries.
pub fn lowfreq_mean(q: &[u16; 64]) -> f64 {
    let mut s = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            s += f64::from(q[r * BLOCK + c]);
        }
    }
    s / 9.0
}

/// Standard deviation of the Gaussian model of quantization noise,
/// `σ_s² = 1.195·ẽ^0.6394 + 0.9693` with `ẽ` the low-frequency table mean.
pub fn sigma_s_estimate(q: &[u16; 64]) -> f64 {
    let e = lowfreq_mean(q);
    libm::sqrt(1.195 * libm::pow(e, 0.6394) + 0.9693)
}

/// Element-wise clamp of `v` into `[lower, upper]`.
pub fn project_box(v: &[f64], lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
    if v.len() != lower.len() || v.len() != upper.len() {
        return Err(Error::LengthMismatch {
            left: v.len(),
            right: lower.len().min(upper.len()),
        });
    }
    Ok(v.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&x, (&l, &u))| {
            if x < l {
                l
            } else if x > u {
                u
            } else {
                x
            }
        })
        .collect())
}

/// Quantization-constraint set of a JPEG-coded image: every block-DCT
/// coefficient must stay within `±w` quantization steps of its dequantized
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationContext {
    pub qf: u32,
    pub q_matrix: [u16; 64],
    pub qc_width: f64,
    /// Quantization indices `round(coef / M)` on the padded coefficient plane.
    pub indices: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub plane_shape: (usize, usize),
    pub orig_shape: (usize, usize),
}

impl QuantizationContext {
    /// Quantizes the block-DCT of `img` and derives the constraint box.
    ///
    /// Applied to an already decoded image this recovers the indices the
    /// encoder chose, as long as pixel rounding moved no coefficient by half a
    /// step or more.
    pub fn from_image(img: &ImageBuffer, qf: u32, q_matrix: [u16; 64], qc_width: f64) -> Result<Self> {
        if !(qc_width > 0.0 && qc_width <= 0.5) {
            return Err(Error::param("qc_width", "must lie in (0, 0.5]"));
        }
        if q_matrix.contains(&0) {
            return Err(Error::param("q_matrix", "entries must be positive"));
        }
        let plane = block_dct(img);
        let indices = plane
            .data
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let step = step_at(&q_matrix, i / plane.cols, i % plane.cols);
                libm::round(v / step)
            })
            .collect();
        let mut ctx = Self {
            qf,
            q_matrix,
            qc_width,
            indices,
            lower: Vec::new(),
            upper: Vec::new(),
            plane_shape: (plane.rows, plane.cols),
            orig_shape: plane.orig_shape,
        };
        ctx.rebuild_bounds();
        Ok(ctx)
    }

    /// Same quantization indices, different constraint width.
    pub fn with_width(&self, qc_width: f64) -> Result<Self> {
        if !(qc_width > 0.0 && qc_width <= 0.5) {
            return Err(Error::param("qc_width", "must lie in (0, 0.5]"));
        }
        let mut ctx = self.clone();
        ctx.qc_width = qc_width;
        ctx.rebuild_bounds();
        Ok(ctx)
    }

    fn rebuild_bounds(&mut self) {
        let cols = self.plane_shape.1;
        let w = self.qc_width;
        let (lower, upper) = self
            .indices
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let step = step_at(&self.q_matrix, i / cols, i % cols);
                ((q - w) * step, (q + w) * step)
            })
            .unzip();
        self.lower = lower;
        self.upper = upper;
    }

    /// Image-level step `M[k, l] = M^q[k mod 8, l mod 8]`.
    pub fn step(&self, r: usize, c: usize) -> f64 {
        step_at(&self.q_matrix, r, c)
    }

    /// Dequantized coefficients `index · M`.
    pub fn dequantized(&self) -> DctPlane {
        let cols = self.plane_shape.1;
        DctPlane {
            rows: self.plane_shape.0,
            cols,
            orig_shape: self.orig_shape,
            data: self
                .indices
                .iter()
                .enumerate()
                .map(|(i, &q)| q * step_at(&self.q_matrix, i / cols, i % cols))
                .collect(),
        }
    }

    pub fn sigma_s(&self) -> f64 {
        sigma_s_estimate(&self.q_matrix)
    }

    /// `A⁻¹ · P(A·x, lower, upper)`: nearest image (in the DCT sense) inside
    /// the constraint set.
    pub fn project(&self, img: &ImageBuffer) -> Result<ImageBuffer> {
        let mut plane = self.plane_of(img)?;
        plane.data = project_box(&plane.data, &self.lower, &self.upper)?;
        Ok(block_idct(&plane))
    }

    /// Largest amount by which any coefficient of `img` leaves the box.
    pub fn max_violation(&self, img: &ImageBuffer) -> Result<f64> {
        let plane = self.plane_of(img)?;
        Ok(plane
            .data
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&l, &u))| (l - x).max(x - u).max(0.0))
            .fold(0.0, f64::max))
    }

    fn plane_of(&self, img: &ImageBuffer) -> Result<DctPlane> {
        if img.shape() != self.orig_shape {
            return Err(Error::ShapeMismatch {
                expected: self.orig_shape,
                found: img.shape(),
            });
        }
        Ok(block_dct(img))
    }
}

#[inline]
fn step_at(q: &[u16; 64], r: usize, c: usize) -> f64 {
    f64::from(q[(r % BLOCK) * BLOCK + c % BLOCK])
}

/// Simulated baseline JPEG round trip on the luminance plane: block DCT,
/// uniform quantization with the QF-scaled table, dequantization, inverse DCT.
/// No level shift is applied; the constraint box uses the same transform.
pub fn jpeg_simulate(img: &ImageBuffer, qf: u32, qc_width: f64) -> Result<(ImageBuffer, QuantizationContext)> {
    let q = quality_matrix(qf)?;
    let ctx = QuantizationContext::from_image(img, qf, q, qc_width)?;
    let decoded = block_idct(&ctx.dequantized());
    Ok((decoded, ctx))
}
