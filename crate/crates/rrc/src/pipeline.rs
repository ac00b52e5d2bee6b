//! Default-schedule runs of the restoration pipelines, shared by the CLI and
//! the benchmark harness.

use rrc_core::denoise::{denoise_observed, DenoiseConfig, Shrinkage, StageSchedule};
use rrc_core::jpeg::{deblock_observed, DeblockConfig, QuantizationContext};
use rrc_core::metrics::psnr;
use rrc_core::ImageBuffer;

use crate::trace::TraceRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenoiseMethod {
    Rrc,
    Nnm,
}

/// Scheduled configuration for noise level `sigma`, looked up in the band of
/// `band_sigma` when given.
pub fn denoise_config(sigma: f64, band_sigma: Option<f64>) -> anyhow::Result<DenoiseConfig> {
    let mut cfg = StageSchedule::default().config_for(band_sigma.unwrap_or(sigma))?;
    cfg.sigma_n = sigma;
    cfg.validate()?;
    Ok(cfg)
}

/// Denoises and returns the [0, 255]-clamped estimate with its trace.
pub fn run_denoise(
    noisy: &ImageBuffer,
    cfg: &DenoiseConfig,
    method: DenoiseMethod,
    clean: Option<&ImageBuffer>,
) -> anyhow::Result<(ImageBuffer, Vec<TraceRow>)> {
    let rule = match method {
        DenoiseMethod::Rrc => Shrinkage::RankResidual,
        DenoiseMethod::Nnm => Shrinkage::NuclearNorm,
    };
    let mut rows = Vec::new();
    let (x, _) = denoise_observed(noisy, cfg, rule, |rec, est| {
        rows.push(TraceRow {
            record: *rec,
            psnr_vs_clean: clean.and_then(|c| psnr(c, &est.clamped()).ok()),
        })
    })?;
    Ok((x.clamped(), rows))
}

/// Deblocks a decoded image. The estimate is returned unclamped so it stays
/// inside the constraint set.
pub fn run_deblock(
    decoded: &ImageBuffer,
    qc: &QuantizationContext,
    cfg: &DeblockConfig,
    clean: Option<&ImageBuffer>,
) -> anyhow::Result<(ImageBuffer, Vec<TraceRow>)> {
    let mut rows = Vec::new();
    let (x, _) = deblock_observed(decoded, qc, cfg, |rec, est| {
        rows.push(TraceRow {
            record: *rec,
            psnr_vs_clean: clean.and_then(|c| psnr(c, est).ok()),
        })
    })?;
    Ok((x, rows))
}
