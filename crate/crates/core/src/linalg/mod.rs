//! Small dense linear algebra: a column-major matrix, a one-sided Jacobi SVD
//! and the proximal operators every shrinkage rule in this crate reduces to.

mod matrix;
mod prox;
mod svd;

pub use matrix::Matrix;
pub use prox::{rrc_shrink, soft, soft_threshold, svt_shrink};
pub use svd::{svd_thin, SvdFactors};
