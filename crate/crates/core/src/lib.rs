//! Low-rank image restoration under a rank residual constraint.
//!
//! Natural images contain many mutually similar patches. Stacking a patch and
//! its nearest neighbours as columns gives an approximately low-rank group
//! matrix. Instead of shrinking the singular values of a degraded group toward
//! zero (nuclear norm minimization / singular value thresholding), the
//! estimators here shrink them toward the singular values of a nonlocal-means
//! reference group, penalizing the *rank residual* with an ℓ1 norm.
//!
//! The crate is `no_std` (with `alloc`). Enabling the `parallel` feature
//! (default) processes the groups of one iteration on the rayon thread pool;
//! results are merged in group order, so output is bit-identical for any
//! thread count.
//!
//! Layout:
//! - [`linalg`]: dense matrices, one-sided Jacobi SVD, proximal operators.
//! - [`patch`]: block matching, reference-group estimation, aggregation.
//! - [`denoise`]: the iterative Gaussian denoiser and its NNM baseline.
//! - [`jpeg`]: block DCT, JPEG quantization simulation, constrained deblocking.
//! - [`gsrc`]: group-sparse-coding view of the same shrinkage, with
//!   numerical equivalence certificates.
//! - [`metrics`]: PSNR and SSIM.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod denoise;
mod error;
pub mod gsrc;
mod image;
pub mod jpeg;
pub mod linalg;
pub mod metrics;
mod par;
pub mod patch;
pub mod stats;

pub use error::{Error, Result};
pub use image::ImageBuffer;
