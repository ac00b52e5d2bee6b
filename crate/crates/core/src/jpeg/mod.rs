//! JPEG compression-artifact reduction: an in-tool block-DCT codec model, the
//! quantization-constraint set, and the alternating minimization that couples
//! rank-residual group shrinkage with a constrained image update.

mod dct;
mod deblock;
mod quant;

pub use dct::{block_dct, block_idct, DctPlane, BLOCK};
pub use deblock::{
    deblock, deblock_observed, sigma_e_update, x_subproblem, z_subproblem, DeblockConfig, GroupThreshold, QfBand,
    StopMeasure, SIGMA_E_FLOOR,
};
pub use quant::{
    jpeg_simulate, lowfreq_mean, project_box, quality_matrix, sigma_s_estimate, QuantizationContext,
    BASE_LUMINANCE,
};
