//! Iterative rank-residual denoiser for additive white Gaussian noise, and
//! the nuclear-norm (singular value thresholding) baseline that shares its
//! pipeline.
//!
//! One outer iteration:
//! 1. iterative regularization `yᵗ = x̂ᵗ⁻¹ + μ(y − yᵗ⁻¹)`;
//! 2. noise level update `σᵗ = ρ·√max(σ² − msd(y, x̂ᵗ⁻¹), 0)`;
//! 3. per reference patch: block-match in `yᵗ`, take the SVD of the group,
//!    build the nonlocal-means reference from `x̂ᵗ⁻¹` at the same positions,
//!    shrink the singular values toward the reference's, reassemble;
//! 4. aggregate, and stop once the relative change drops below `τ`.
//!
//! Groups are centered on their mean patch before the SVD. Singular-value
//! statistics that feed λ are measured per column (divided by `√m`), the
//! scale on which `σ` is a per-pixel noise level.

use alloc::vec::Vec;

use crate::linalg::{rrc_shrink, svd_thin, Matrix};
use crate::patch::{
    estimate_reference_group, extract_group, group_at, reference_positions, Accumulator, GroupingParams, PatchGroup,
};
use crate::stats::{mean, sample_std, Histogram};
use crate::{par, Error, ImageBuffer, Result};

const SQRT_8: f64 = 2.0 * core::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    /// Noise standard deviation of the input, in intensity units.
    pub sigma_n: f64,
    /// Iterative-regularization step μ.
    pub mu: f64,
    /// Noise-level decay ρ.
    pub rho: f64,
    /// λ scale c.
    pub c: f64,
    /// λ regularizer ε.
    pub eps: f64,
    /// Nonlocal-means kernel width h.
    pub h: f64,
    pub grouping: GroupingParams,
    pub max_iters: usize,
    /// Relative-change stop threshold τ.
    pub tau_stop: f64,
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be positive and finite"))
            }
        };
        if !(self.sigma_n >= 0.0 && self.sigma_n.is_finite()) {
            return Err(Error::param("sigma_n", "must be finite and nonnegative"));
        }
        if !(self.mu >= 0.0 && self.mu <= 1.0) {
            return Err(Error::param("mu", "must lie in [0, 1]"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::param("rho", "must lie in (0, 1]"));
        }
        positive("c", self.c)?;
        positive("eps", self.eps)?;
        positive("h", self.h)?;
        positive("tau_stop", self.tau_stop)?;
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        self.grouping.validated().map(|_| ())
    }
}

/// Parameter bands by noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSchedule {
    /// `(upper σ bound, patch side)`, ascending.
    pub patch_bands: Vec<(f64, usize)>,
    /// `(upper σ bound, μ, ρ, c, m, τ)`, ascending.
    pub param_bands: Vec<(f64, f64, f64, f64, usize, f64)>,
    pub window: usize,
    pub eps: f64,
    pub h: f64,
    pub max_iters: usize,
}

impl Default for StageSchedule {
    fn default() -> Self {
        Self {
            patch_bands: alloc::vec![(20.0, 6), (50.0, 7), (75.0, 8), (100.0, 9)],
            param_bands: alloc::vec![
                (20.0, 0.1, 0.9, 0.9, 60, 0.001),
                (30.0, 0.1, 0.8, 0.9, 60, 0.001),
                (40.0, 0.1, 0.8, 0.9, 70, 0.0006),
                (50.0, 0.1, 0.8, 1.0, 80, 0.0006),
                (75.0, 0.1, 0.8, 1.0, 90, 0.0005),
                (100.0, 0.1, 0.8, 1.0, 100, 0.002),
            ],
            window: 25,
            eps: 0.2,
            h: 40.0,
            max_iters: 20,
        }
    }
}

impl StageSchedule {
    /// Configuration for noise level `sigma_n ∈ (0, 100]`.
    pub fn config_for(&self, sigma_n: f64) -> Result<DenoiseConfig> {
        let top = self.param_bands.last().map(|b| b.0).unwrap_or(0.0);
        if !(sigma_n > 0.0 && sigma_n <= top) {
            return Err(Error::param("sigma_n", "outside the scheduled range (0, 100]"));
        }
        let patch_side = self
            .patch_bands
            .iter()
            .find(|b| sigma_n <= b.0)
            .map(|b| b.1)
            .ok_or_else(|| Error::param("sigma_n", "no patch band"))?;
        let &(_, mu, rho, c, m, tau) = self
            .param_bands
            .iter()
            .find(|b| sigma_n <= b.0)
            .ok_or_else(|| Error::param("sigma_n", "no parameter band"))?;
        let cfg = DenoiseConfig {
            sigma_n,
            mu,
            rho,
            c,
            eps: self.eps,
            h: self.h,
            grouping: GroupingParams::new(patch_side, m, self.window)?,
            max_iters: self.max_iters,
            tau_stop: tau,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `λ = c·2√2·σ² / (φ + ε)`.
pub fn adaptive_lambda(residual_sigma_std: f64, sigma_n_t: f64, c: f64, eps: f64) -> f64 {
    c * SQRT_8 * sigma_n_t * sigma_n_t / (residual_sigma_std + eps)
}

/// Remaining noise level `ρ·√max(σ² − msd(y, x_prev), 0)`, with msd the
/// per-pixel mean squared difference.
pub fn sigma_schedule(sigma_n: f64, y: &ImageBuffer, x_prev: &ImageBuffer, rho: f64) -> Result<f64> {
    let msd = y.mean_sq_diff(x_prev)?;
    Ok(rho * libm::sqrt((sigma_n * sigma_n - msd).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub sigma_t: f64,
    pub mean_lambda: f64,
    pub rel_change: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Which singular-value rule a run applies to each group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shrinkage {
    /// Shrink toward the nonlocal-means reference group.
    RankResidual,
    /// Uniform soft thresholding toward zero (nuclear norm prox).
    NuclearNorm,
    /// Fixed threshold for every group, reference ignored.
    FixedSvt(FixedLambda),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedLambda(u64);

impl FixedLambda {
    pub fn new(lambda: f64) -> Self {
        Self(lambda.to_bits())
    }

    pub fn get(self) -> f64 {
        f64::from_bits(self.0)
    }
}

/// Row means of a group (its mean patch).
pub(crate) fn mean_patch(m: &Matrix) -> Vec<f64> {
    let (d, cols) = m.shape();
    let mut mean = alloc::vec![0.0; d];
    for k in 0..cols {
        for (acc, &v) in mean.iter_mut().zip(m.col(k)) {
            *acc += v;
        }
    }
    let inv = 1.0 / cols as f64;
    mean.iter_mut().for_each(|v| *v *= inv);
    mean
}

pub(crate) fn subtract_cols(m: &Matrix, v: &[f64]) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)] - v[r])
}

pub(crate) fn add_cols(m: &mut Matrix, v: &[f64]) {
    for c in 0..m.cols() {
        for (x, &a) in m.col_mut(c).iter_mut().zip(v) {
            *x += a;
        }
    }
}

/// Singular values of `m`, in closed form when every column equals the
/// first (a rank-one matrix `v·1ᵀ` has the single value `√m·‖v‖`).
pub(crate) fn reference_sigma(m: &Matrix) -> Result<Vec<f64>> {
    let (d, cols) = m.shape();
    let first = m.col(0);
    if (1..cols).all(|c| m.col(c) == first) {
        if first.iter().any(|v| !v.is_finite()) {
            return svd_thin(m).map(|f| f.sigma);
        }
        let mut sigma = alloc::vec![0.0; d.min(cols)];
        sigma[0] = libm::sqrt(cols as f64 * first.iter().map(|v| v * v).sum::<f64>());
        return Ok(sigma);
    }
    svd_thin(m).map(|f| f.sigma)
}

/// Per-column scale of a singular-value residual: `std(δ − ψ) / √m`.
pub(crate) fn residual_spread(obs: &[f64], reference: &[f64], m: usize) -> f64 {
    let gamma: Vec<f64> = obs.iter().zip(reference).map(|(d, p)| d - p).collect();
    sample_std(&gamma) / libm::sqrt(m as f64)
}

/// Shrinks one group. `observed` is block-matched in the current iterate;
/// `previous` holds the previous estimate at the same coordinates. Returns
/// the restored group data and the λ used.
pub(crate) fn shrink_group(
    observed: &PatchGroup,
    previous: &PatchGroup,
    rule: Shrinkage,
    sigma_t: f64,
    c: f64,
    eps: f64,
    h: f64,
) -> Result<(Matrix, f64)> {
    let m = observed.len();
    let center = mean_patch(&observed.data);
    let centered = subtract_cols(&observed.data, &center);
    let f = svd_thin(&centered)?;
    let (sigma, lambda) = match rule {
        Shrinkage::RankResidual => {
            let reference = estimate_reference_group(previous, h)?;
            let psi = reference_sigma(&subtract_cols(&reference.data, &center))?;
            let phi = residual_spread(&f.sigma, &psi, m);
            let lambda = adaptive_lambda(phi, sigma_t, c, eps);
            (rrc_shrink(&f.sigma, &psi, lambda)?, lambda)
        }
        Shrinkage::NuclearNorm => {
            let phi = mean(&f.sigma) / libm::sqrt(m as f64);
            let lambda = adaptive_lambda(phi, sigma_t, c, eps);
            let zeros = alloc::vec![0.0; f.sigma.len()];
            (rrc_shrink(&f.sigma, &zeros, lambda)?, lambda)
        }
        Shrinkage::FixedSvt(l) => {
            let zeros = alloc::vec![0.0; f.sigma.len()];
            (rrc_shrink(&f.sigma, &zeros, l.get())?, l.get())
        }
    };
    let mut restored = f.reconstruct_with(&sigma)?;
    add_cols(&mut restored, &center);
    Ok((restored, lambda))
}

/// `yᵗ = x̂ᵗ⁻¹ + μ(y − yᵗ⁻¹)`
pub(crate) fn feedback(x_hat: &ImageBuffer, y: &ImageBuffer, y_prev: &ImageBuffer, mu: f64) -> ImageBuffer {
    let data = x_hat
        .as_slice()
        .iter()
        .zip(y.as_slice().iter().zip(y_prev.as_slice()))
        .map(|(&x, (&obs, &prev))| x + mu * (obs - prev))
        .collect();
    ImageBuffer::from_raw(x_hat.rows(), x_hat.cols(), data)
}

fn check_input(y: &ImageBuffer, cfg: &DenoiseConfig) -> Result<()> {
    cfg.validate()?;
    if !y.is_finite() {
        return Err(Error::param("y", "input contains non-finite samples"));
    }
    if y.rows() < cfg.grouping.patch_side || y.cols() < cfg.grouping.patch_side {
        return Err(Error::ImageTooSmall {
            rows: y.rows(),
            cols: y.cols(),
            min: cfg.grouping.patch_side,
        });
    }
    Ok(())
}

/// Runs the denoiser with a callback after every iteration (for tracing
/// against a known clean image). Returns the unclamped final estimate.
pub fn denoise_observed(
    y: &ImageBuffer,
    cfg: &DenoiseConfig,
    rule: Shrinkage,
    mut observer: impl FnMut(&IterationRecord, &ImageBuffer),
) -> Result<(ImageBuffer, IterationTrace)> {
    check_input(y, cfg)?;
    let (rows, cols) = y.shape();
    let refs = reference_positions(rows, cols, &cfg.grouping)?;
    let mut x_hat = y.clone();
    let mut y_prev = y.clone();
    let mut trace = IterationTrace::default();

    for iter in 1..=cfg.max_iters {
        let y_t = feedback(&x_hat, y, &y_prev, cfg.mu);
        let sigma_t = sigma_schedule(cfg.sigma_n, y, &x_hat, cfg.rho)?;

        let results = par::map_indexed(refs.len(), |i| -> Result<(PatchGroup, f64)> {
            let observed = extract_group(&y_t, refs[i], &cfg.grouping)?;
            let previous = group_at(&x_hat, &observed.coords, cfg.grouping.patch_side)?;
            let (data, lambda) = shrink_group(&observed, &previous, rule, sigma_t, cfg.c, cfg.eps, cfg.h)?;
            Ok((observed.with_data(data)?, lambda))
        });

        let mut acc = Accumulator::new(rows, cols);
        let mut lambda_sum = 0.0;
        for r in results {
            let (group, lambda) = r?;
            acc.add_group(&group)?;
            lambda_sum += lambda;
        }
        let x_new = acc.finish()?;
        if !x_new.is_finite() {
            return Err(Error::Diverged { iteration: iter });
        }

        let denom = x_hat.sq_norm();
        let diff = x_new.mean_sq_diff(&x_hat)? * (rows * cols) as f64;
        let rel_change = if denom > 0.0 { diff / denom } else { 0.0 };
        let record = IterationRecord {
            iter,
            sigma_t,
            mean_lambda: lambda_sum / refs.len() as f64,
            rel_change,
        };
        trace.records.push(record);
        observer(&record, &x_new);

        y_prev = y_t;
        x_hat = x_new;
        if rel_change < cfg.tau_stop {
            break;
        }
    }
    Ok((x_hat, trace))
}

/// Rank-residual denoising. The result is clamped to [0, 255].
pub fn denoise(y: &ImageBuffer, cfg: &DenoiseConfig) -> Result<(ImageBuffer, IterationTrace)> {
    let (x, trace) = denoise_observed(y, cfg, Shrinkage::RankResidual, |_, _| {})?;
    Ok((x.clamped(), trace))
}

/// Nuclear-norm baseline: the same pipeline with singular value thresholding
/// in place of the reference-guided shrinkage. The result is clamped to
/// [0, 255].
pub fn denoise_nnm(y: &ImageBuffer, cfg: &DenoiseConfig) -> Result<ImageBuffer> {
    let (x, _) = denoise_observed(y, cfg, Shrinkage::NuclearNorm, |_, _| {})?;
    Ok(x.clamped())
}

/// Rank-residual samples and their distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualHistogram {
    pub histogram: Histogram,
    pub excess_kurtosis: f64,
    pub samples: usize,
}

/// What the clean image contributes to a residual `γ = δ − ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualReference {
    /// `ψ` from the clean patches themselves.
    CleanPatches,
    /// `ψ` from the nonlocal-means reference group of the clean patches,
    /// with this kernel width.
    NonlocalMeans(f64),
}

/// Collects `γ = δ − ψ` over all groups, where `δ` are the singular values of
/// groups block-matched in `degraded` and `ψ` those of the clean-image
/// reference at the same positions. Both are centered on the degraded
/// group's mean patch and reported on the per-column scale.
pub fn rank_residual_histogram(
    clean: &ImageBuffer,
    degraded: &ImageBuffer,
    params: &GroupingParams,
    reference: ResidualReference,
    bins: usize,
) -> Result<ResidualHistogram> {
    clean.check_same_shape(degraded)?;
    let (rows, cols) = clean.shape();
    let refs = reference_positions(rows, cols, params)?;
    let per_group = par::map_indexed(refs.len(), |i| -> Result<Vec<f64>> {
        let observed = extract_group(degraded, refs[i], params)?;
        let truth = group_at(clean, &observed.coords, params.patch_side)?;
        let center = mean_patch(&observed.data);
        let delta = svd_thin(&subtract_cols(&observed.data, &center))?.sigma;
        let psi = match reference {
            ResidualReference::CleanPatches => svd_thin(&subtract_cols(&truth.data, &center))?.sigma,
            ResidualReference::NonlocalMeans(h) => {
                let nl = estimate_reference_group(&truth, h)?;
                reference_sigma(&subtract_cols(&nl.data, &center))?
            }
        };
        let scale = 1.0 / libm::sqrt(observed.len() as f64);
        Ok(delta.iter().zip(&psi).map(|(d, p)| (d - p) * scale).collect())
    });
    let mut samples = Vec::new();
    for g in per_group {
        samples.extend(g?);
    }
    Ok(ResidualHistogram {
        histogram: Histogram::from_samples(&samples, bins),
        excess_kurtosis: crate::stats::excess_kurtosis(&samples),
        samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::psnr;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn smooth(rows: usize, cols: usize) -> ImageBuffer {
        ImageBuffer::from_fn(rows, cols, |r, c| {
            110.0 + 60.0 * libm::sin(r as f64 * 0.21) * libm::cos(c as f64 * 0.17) + if c > cols / 2 { 30.0 } else { 0.0 }
        })
    }

    fn noisy(img: &ImageBuffer, sigma: f64, seed: u64) -> ImageBuffer {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, sigma).unwrap();
        let data = img.as_slice().iter().map(|v| v + n.sample(&mut rng)).collect();
        ImageBuffer::new(img.rows(), img.cols(), data).unwrap()
    }

    fn small_cfg(sigma_n: f64) -> DenoiseConfig {
        let mut cfg = StageSchedule::default().config_for(sigma_n).unwrap();
        cfg.grouping = GroupingParams::new(cfg.grouping.patch_side, 16, 11).unwrap();
        cfg
    }

    #[test]
    fn lambda_examples() {
        assert!((adaptive_lambda(0.0, 1.0, 1.0, 0.2) - 14.142135623730951).abs() < 1e-12);
        assert_eq!(adaptive_lambda(3.0, 0.0, 1.0, 0.2), 0.0);
        let expect = 0.9 * 2.0 * libm::sqrt(2.0) * 400.0 / 5.2;
        assert!((adaptive_lambda(5.0, 20.0, 0.9, 0.2) - expect).abs() < 1e-9);
        assert!((expect - 195.815).abs() < 1e-3);
    }

    #[test]
    fn schedule_examples() {
        let y = ImageBuffer::filled(4, 4, 100.0);
        assert!((sigma_schedule(50.0, &y, &y, 0.8).unwrap() - 40.0).abs() < 1e-12);
        let x = y.map(|v| v + 30.0);
        assert!((sigma_schedule(50.0, &y, &x, 0.8).unwrap() - 32.0).abs() < 1e-12);
        let x = y.map(|v| v - 50.0);
        assert_eq!(sigma_schedule(50.0, &y, &x, 0.8).unwrap(), 0.0);
        assert!(sigma_schedule(50.0, &y, &ImageBuffer::zeros(3, 4), 0.8).is_err());
    }

    #[test]
    fn schedule_bands() {
        let s = StageSchedule::default();
        let cfg = s.config_for(50.0).unwrap();
        assert_eq!((cfg.grouping.patch_side, cfg.grouping.group_size), (7, 80));
        assert_eq!(cfg.c, 1.0);
        let cfg = s.config_for(100.0).unwrap();
        assert_eq!((cfg.grouping.patch_side, cfg.tau_stop), (9, 0.002));
        assert!(s.config_for(0.0).is_err());
        assert!(s.config_for(100.5).is_err());
    }

    #[test]
    fn feedback_algebra() {
        let x = ImageBuffer::from_fn(3, 3, |r, c| (r * 3 + c) as f64);
        let y = x.map(|v| v * 2.0 + 1.0);
        let prev = x.map(|v| v - 4.0);
        assert_eq!(feedback(&x, &y, &prev, 0.0), x);
        let f = feedback(&x, &y, &prev, 0.1);
        for i in 0..9 {
            let expect = x.as_slice()[i] + 0.1 * (y.as_slice()[i] - prev.as_slice()[i]);
            assert!((f.as_slice()[i] - expect).abs() < 1e-12);
        }
        // First iteration: the feedback of y onto itself vanishes.
        assert_eq!(feedback(&y, &y, &y, 0.7), y);
    }

    #[test]
    fn rank_one_reference_sigma_is_closed_form() {
        let m = Matrix::from_fn(5, 4, |r, _| r as f64 - 1.5);
        let fast = reference_sigma(&m).unwrap();
        let slow = svd_thin(&m).unwrap().sigma;
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_threshold_reproduces_input() {
        let y = noisy(&smooth(24, 24), 10.0, 1);
        let mut cfg = small_cfg(10.0);
        cfg.max_iters = 1;
        let (x, _) = denoise_observed(&y, &cfg, Shrinkage::FixedSvt(FixedLambda::new(0.0)), |_, _| {}).unwrap();
        let err = x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn first_record_uses_full_noise_level() {
        let y = noisy(&smooth(24, 24), 20.0, 2);
        let cfg = small_cfg(20.0);
        let mut seen = vec![];
        let (_, trace) = denoise_observed(&y, &cfg, Shrinkage::RankResidual, |r, _| seen.push(r.iter)).unwrap();
        assert!((trace.records[0].sigma_t - cfg.rho * 20.0).abs() < 1e-12);
        assert_eq!(seen.len(), trace.iterations());
        for r in &trace.records {
            assert!(r.sigma_t >= 0.0 && r.sigma_t <= cfg.rho * 20.0 + 1e-12);
        }
    }

    #[test]
    fn clean_input_stays_put() {
        let img = smooth(32, 32);
        let cfg = small_cfg(1.0);
        let (x, _) = denoise(&img, &cfg).unwrap();
        assert!(psnr(&x, &img).unwrap() > 45.0);
    }

    #[test]
    fn both_rules_improve_rank_one_image() {
        let clean = ImageBuffer::from_fn(48, 48, |r, c| (4.0 + libm::sin(r as f64 * 0.3)) * (10.0 + 8.0 * libm::cos(c as f64 * 0.5)) * 2.0);
        let y = noisy(&clean, 20.0, 3);
        let cfg = small_cfg(20.0);
        let before = psnr(&y, &clean).unwrap();
        let (rrc, _) = denoise(&y, &cfg).unwrap();
        let nnm = denoise_nnm(&y, &cfg).unwrap();
        let (a, b) = (psnr(&rrc, &clean).unwrap(), psnr(&nnm, &clean).unwrap());
        assert!(a > before + 3.0 && b > before + 3.0, "{before} {a} {b}");
    }

    #[test]
    fn residuals_vanish_without_noise() {
        let img = smooth(20, 20);
        let p = GroupingParams::new(4, 8, 9).unwrap();
        let h = rank_residual_histogram(&img, &img, &p, ResidualReference::CleanPatches, 11).unwrap();
        assert!(h.histogram.occupied_bins() == 1);
        let nl = rank_residual_histogram(&img, &img, &p, ResidualReference::NonlocalMeans(40.0), 11).unwrap();
        assert_eq!(nl.samples, h.samples);
        assert!(rank_residual_histogram(&img, &img, &p, ResidualReference::NonlocalMeans(0.0), 11).is_err());
        assert!(h.samples > 0);
    }

    #[test]
    fn rejects_bad_config() {
        let y = ImageBuffer::filled(16, 16, 1.0);
        let mut cfg = small_cfg(10.0);
        cfg.mu = -0.1;
        assert!(denoise(&y, &cfg).is_err());
        let cfg = small_cfg(10.0);
        assert!(denoise(&ImageBuffer::filled(4, 4, 1.0), &cfg).is_err());
        let mut bad = y.clone();
        bad.set(0, 0, f64::NAN);
        assert!(denoise(&bad, &cfg).is_err());
    }
}
