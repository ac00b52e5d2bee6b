//! Alternating minimization for compression-artifact reduction.
//!
//! Each iteration shrinks every group of the current reconstruction toward
//! its nonlocal-means reference (Z step), then solves the diagonal quadratic
//! that balances the decoded image against the aggregated groups and
//! projects onto the quantization-constraint set (x step).

use super::quant::QuantizationContext;
use crate::denoise::{
    adaptive_lambda, add_cols, mean_patch, reference_sigma, residual_spread, subtract_cols, IterationRecord, IterationTrace,
};
use crate::linalg::{rrc_shrink, svd_thin, SvdFactors};
use crate::patch::{estimate_reference_group, extract_group, reference_positions, Accumulator, GroupingParams, PatchGroup};
use crate::{par, Error, ImageBuffer, Result};

/// Lower bound on σ_e so the group threshold stays well defined.
pub const SIGMA_E_FLOOR: f64 = 1e-3;

/// Quality-factor dependent parameters `(η, c, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfBand {
    pub eta: f64,
    pub c: f64,
    pub tau: f64,
}

impl QfBand {
    pub fn for_qf(qf: u32) -> Result<Self> {
        let (eta, c, tau) = match qf {
            1..=10 => (0.3, 0.9, 0.0007),
            11..=20 => (0.2, 1.3, 0.0005),
            21..=30 => (0.2, 1.3, 0.0003),
            31..=100 => (0.2, 1.5, 0.0003),
            _ => return Err(Error::QualityOutOfRange(qf)),
        };
        Ok(Self { eta, c, tau })
    }
}

/// How the group-step threshold is derived from λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupThreshold {
    /// λ evaluated at σ_s and used directly as the threshold: the group step
    /// denoises at the level of the hypothetical quantization noise.
    QuantizationNoise,
    /// λ evaluated at σ_e and rescaled by `σ_e²/ρ`.
    Rescaled,
}

/// Relative-change measure compared against τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMeasure {
    /// `‖x̂ᵗ − x̂ᵗ⁻¹‖² / ‖x̂ᵗ⁻¹‖²`
    Squared,
    /// `‖x̂ᵗ − x̂ᵗ⁻¹‖ / ‖x̂ᵗ⁻¹‖`
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeblockConfig {
    pub eta: f64,
    pub c: f64,
    pub eps: f64,
    pub h: f64,
    /// Weight ρ of the group-consistency term.
    pub rho_balance: f64,
    pub grouping: GroupingParams,
    pub max_iters: usize,
    pub tau_stop: f64,
    pub qc_width: f64,
    pub threshold: GroupThreshold,
    pub stop: StopMeasure,
}

impl DeblockConfig {
    /// 7×7 patches, m = 60, L = 25, T = 20, h = 40, ε = 0.2, ρ = 5, w = 0.2,
    /// and the `(η, c, τ)` band of `qf`.
    pub fn for_qf(qf: u32) -> Result<Self> {
        let band = QfBand::for_qf(qf)?;
        let cfg = Self {
            eta: band.eta,
            c: band.c,
            eps: 0.2,
            h: 40.0,
            rho_balance: 5.0,
            grouping: GroupingParams::new(7, 60, 25)?,
            max_iters: 20,
            tau_stop: band.tau,
            qc_width: 0.2,
            threshold: GroupThreshold::QuantizationNoise,
            stop: StopMeasure::Norm,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta", self.eta),
            ("c", self.c),
            ("eps", self.eps),
            ("h", self.h),
            ("rho_balance", self.rho_balance),
            ("tau_stop", self.tau_stop),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        if !(self.qc_width > 0.0 && self.qc_width <= 0.5) {
            return Err(Error::param("qc_width", "must lie in (0, 0.5]"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        self.grouping.validated().map(|_| ())
    }
}

/// `η·√max(σ_s² − msd(z_prev, y), 0)`.
pub fn sigma_e_update(sigma_s: f64, z_prev: &ImageBuffer, y: &ImageBuffer, eta: f64) -> Result<f64> {
    let msd = z_prev.mean_sq_diff(y)?;
    Ok(eta * libm::sqrt((sigma_s * sigma_s - msd).max(0.0)))
}

/// Reference-guided singular value shrinkage of one group with threshold
/// `mu_thresh`; the group's singular frame is kept.
pub fn z_subproblem(group: &PatchGroup, reference: &PatchGroup, mu_thresh: f64) -> Result<PatchGroup> {
    if group.data.shape() != reference.data.shape() {
        return Err(Error::ShapeMismatch {
            expected: group.data.shape(),
            found: reference.data.shape(),
        });
    }
    let f = svd_thin(&group.data)?;
    let delta = svd_thin(&reference.data)?.sigma;
    group.with_data(shrink_factors(&f, &delta, mu_thresh)?)
}

fn shrink_factors(f: &SvdFactors, delta: &[f64], mu_thresh: f64) -> Result<crate::linalg::Matrix> {
    f.reconstruct_with(&rrc_shrink(&f.sigma, delta, mu_thresh)?)
}

/// Closed-form x step: per-pixel `(y + w·ΣRᵀZ) / (1 + w·ΣRᵀR)` followed by
/// projection onto the constraint set of `qc`.
pub fn x_subproblem(y: &ImageBuffer, groups: &[PatchGroup], weight: f64, qc: &QuantizationContext) -> Result<ImageBuffer> {
    let mut acc = Accumulator::new(y.rows(), y.cols());
    for g in groups {
        acc.add_group(g)?;
    }
    x_from_sums(y, &acc, weight, qc)
}

fn x_from_sums(y: &ImageBuffer, acc: &Accumulator, weight: f64, qc: &QuantizationContext) -> Result<ImageBuffer> {
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(Error::param("weight", "must be finite and nonnegative"));
    }
    if let Some((row, col)) = acc.first_uncovered() {
        return Err(Error::UncoveredPixel { row, col });
    }
    let data = y
        .as_slice()
        .iter()
        .zip(acc.sums().iter().zip(acc.counts()))
        .map(|(&yv, (&s, &n))| (yv + weight * s) / (1.0 + weight * n))
        .collect();
    qc.project(&ImageBuffer::from_raw(y.rows(), y.cols(), data))
}

/// Runs the alternating minimization on a decoded image. The output lies in
/// the constraint set and is not clamped to [0, 255].
pub fn deblock(compressed: &ImageBuffer, qc: &QuantizationContext, cfg: &DeblockConfig) -> Result<(ImageBuffer, IterationTrace)> {
    deblock_observed(compressed, qc, cfg, |_, _| {})
}

/// [`deblock`] with a callback after every iteration.
pub fn deblock_observed(
    compressed: &ImageBuffer,
    qc: &QuantizationContext,
    cfg: &DeblockConfig,
    mut observer: impl FnMut(&IterationRecord, &ImageBuffer),
) -> Result<(ImageBuffer, IterationTrace)> {
    cfg.validate()?;
    if !compressed.is_finite() {
        return Err(Error::param("compressed", "input contains non-finite samples"));
    }
    let (rows, cols) = compressed.shape();
    let ps = cfg.grouping.patch_side;
    if rows < ps || cols < ps {
        return Err(Error::ImageTooSmall { rows, cols, min: ps });
    }
    let qc = if qc.qc_width == cfg.qc_width {
        qc.clone()
    } else {
        qc.with_width(cfg.qc_width)?
    };
    let sigma_s = qc.sigma_s();
    let refs = reference_positions(rows, cols, &cfg.grouping)?;

    let y = compressed;
    let mut x_hat = qc.project(y)?;
    let mut z = y.clone();
    let mut trace = IterationTrace::default();

    for iter in 1..=cfg.max_iters {
        let sigma_e = sigma_e_update(sigma_s, &z, y, cfg.eta)?.max(SIGMA_E_FLOOR);
        let lambda_sigma = match cfg.threshold {
            GroupThreshold::QuantizationNoise => sigma_s,
            GroupThreshold::Rescaled => sigma_e,
        };
        let snapshot = &x_hat;
        let results = par::map_indexed(refs.len(), |i| -> Result<(PatchGroup, f64)> {
            let group = extract_group(snapshot, refs[i], &cfg.grouping)?;
            let reference = estimate_reference_group(&group, cfg.h)?;
            let center = mean_patch(&group.data);
            let f = svd_thin(&subtract_cols(&group.data, &center))?;
            let delta = reference_sigma(&subtract_cols(&reference.data, &center))?;
            let phi = residual_spread(&f.sigma, &delta, group.len());
            let lambda = adaptive_lambda(phi, lambda_sigma, cfg.c, cfg.eps);
            let mu = match cfg.threshold {
                GroupThreshold::QuantizationNoise => lambda,
                GroupThreshold::Rescaled => lambda * sigma_e * sigma_e / cfg.rho_balance,
            };
            let mut data = shrink_factors(&f, &delta, mu)?;
            add_cols(&mut data, &center);
            Ok((group.with_data(data)?, mu))
        });

        let mut acc = Accumulator::new(rows, cols);
        let mut mu_sum = 0.0;
        for r in results {
            let (g, mu) = r?;
            acc.add_group(&g)?;
            mu_sum += mu;
        }
        z = acc.finish()?;
        let weight = sigma_s * sigma_s * cfg.rho_balance / (sigma_e * sigma_e);
        let x_new = x_from_sums(y, &acc, weight, &qc)?;
        if !x_new.is_finite() {
            return Err(Error::Diverged { iteration: iter });
        }

        let denom = x_hat.sq_norm();
        let diff = x_new.mean_sq_diff(&x_hat)? * (rows * cols) as f64;
        let ratio = if denom > 0.0 { diff / denom } else { 0.0 };
        let rel_change = match cfg.stop {
            StopMeasure::Squared => ratio,
            StopMeasure::Norm => libm::sqrt(ratio),
        };
        let record = IterationRecord {
            iter,
            sigma_t: sigma_e,
            mean_lambda: mu_sum / refs.len() as f64,
            rel_change,
        };
        trace.records.push(record);
        observer(&record, &x_new);
        x_hat = x_new;
        if rel_change < cfg.tau_stop {
            break;
        }
    }
    Ok((x_hat, trace))
}
