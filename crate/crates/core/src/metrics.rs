//! Full-reference quality metrics on the 0–255 intensity scale.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, ImageBuffer, Result};

const PEAK: f64 = 255.0;

/// Peak signal-to-noise ratio in dB. Identical images give `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    let mse = a.mean_sq_diff(b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(PEAK * PEAK / mse))
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Mean SSIM over all full 11x11 windows (Gaussian weights, σ = 1.5,
/// K1 = 0.01, K2 = 0.03, L = 255).
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    a.check_same_shape(b)?;
    let (rows, cols) = a.shape();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            rows,
            cols,
            min: SSIM_WINDOW,
        });
    }
    let kernel = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA);
    let x = a.as_slice();
    let y = b.as_slice();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(x, rows, cols, &kernel);
    let mu_y = filter_valid(y, rows, cols, &kernel);
    let e_xx = filter_valid(&xx, rows, cols, &kernel);
    let e_yy = filter_valid(&yy, rows, cols, &kernel);
    let e_xy = filter_valid(&xy, rows, cols, &kernel);

    let c1 = (K1 * PEAK) * (K1 * PEAK);
    let c2 = (K2 * PEAK) * (K2 * PEAK);
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = e_xx[i] - mx * mx;
        let vy = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total += num / den;
    }
    Ok(total / mu_x.len() as f64)
}

fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size as f64 - 1.0) / 2.0;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let t = i as f64 - half;
            libm::exp(-t * t / (2.0 * sigma * sigma))
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable 2-D filtering keeping only positions where the window fits.
fn filter_valid(src: &[f64], rows: usize, cols: usize, kernel: &[f64]) -> Vec<f64> {
    let n = kernel.len();
    let out_cols = cols - n + 1;
    let out_rows = rows - n + 1;
    let mut horiz = vec![0.0; rows * out_cols];
    for r in 0..rows {
        let row = &src[r * cols..(r + 1) * cols];
        for c in 0..out_cols {
            horiz[r * out_cols + c] = row[c..c + n].iter().zip(kernel).map(|(v, k)| v * k).sum();
        }
    }
    let mut out = vec![0.0; out_rows * out_cols];
    for r in 0..out_rows {
        for (t, &k) in kernel.iter().enumerate() {
            let src_row = &horiz[(r + t) * out_cols..(r + t + 1) * out_cols];
            for (dst, &v) in out[r * out_cols..(r + 1) * out_cols].iter_mut().zip(src_row) {
                *dst += k * v;
            }
        }
    }
    out
}
