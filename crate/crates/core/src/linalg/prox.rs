use alloc::vec::Vec;

use super::SvdFactors;
use crate::{Error, Result};

/// Scalar soft thresholding `sgn(v) · max(|v| − tau, 0)`.
#[inline]
pub fn soft(v: f64, tau: f64) -> f64 {
    let mag = v.abs() - tau;
    if mag > 0.0 {
        mag.copysign(v)
    } else {
        0.0
    }
}

/// Element-wise minimizer of `½‖a − x‖² + tau·‖x − b‖₁`, i.e.
/// `soft(a − b, tau) + b`.
pub fn soft_threshold(a: &[f64], b: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_lengths(a, b)?;
    check_lambda("tau", tau)?;
    Ok(a.iter().zip(b).map(|(&x, &r)| soft(x - r, tau) + r).collect())
}

/// Singular value thresholding: the prox of `lambda·‖X‖_*`.
pub fn svt_shrink(factors: &SvdFactors, lambda: f64) -> Result<SvdFactors> {
    check_lambda("lambda", lambda)?;
    Ok(SvdFactors {
        left: factors.left.clone(),
        sigma: factors.sigma.iter().map(|&s| (s - lambda).max(0.0)).collect(),
        right: factors.right.clone(),
    })
}

/// Shrinks observed singular values toward reference singular values:
/// `max(soft(obs − ref, lambda) + ref, 0)`.
///
/// This is the per-component solution of
/// `min_{σ ≥ 0} ½(δ − σ)² + lambda·|σ − ψ|`. For nonnegative inputs the
/// clamp never binds; it enforces the constraint regardless.
pub fn rrc_shrink(obs_sigma: &[f64], ref_sigma: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lengths(obs_sigma, ref_sigma)?;
    check_lambda("lambda", lambda)?;
    Ok(obs_sigma
        .iter()
        .zip(ref_sigma)
        .map(|(&d, &p)| (soft(d - p, lambda) + p).max(0.0))
        .collect())
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn check_lambda(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::param(name, "must be finite and nonnegative"));
    }
    Ok(())
}
