use alloc::vec::Vec;

use super::matrix::{dot, Matrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;
/// Pairs whose normalized inner product is below this are treated as orthogonal.
const ORTHO_TOL: f64 = 1e-12;
/// Singular values below `RANK_TOL * sigma[0]` are set to exactly zero.
const RANK_TOL: f64 = 1e-12;

/// Thin SVD `A = left · diag(sigma) · rightᵀ` of a `d x m` matrix, with
/// `j = min(d, m)` singular triplets in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    /// `d x j`, orthonormal columns.
    pub left: Matrix,
    /// Length `j`, nonnegative, descending.
    pub sigma: Vec<f64>,
    /// `m x j`, orthonormal columns.
    pub right: Matrix,
}

impl SvdFactors {
    pub fn rank_count(&self) -> usize {
        self.sigma.len()
    }

    /// `left · diag(sigma) · rightᵀ`
    pub fn reconstruct(&self) -> Matrix {
        reconstruct_with(&self.left, &self.sigma, &self.right)
    }

    /// Reassembles with replacement singular values, keeping both frames.
    pub fn reconstruct_with(&self, sigma: &[f64]) -> Result<Matrix> {
        if sigma.len() != self.sigma.len() {
            return Err(Error::LengthMismatch {
                left: self.sigma.len(),
                right: sigma.len(),
            });
        }
        Ok(reconstruct_with(&self.left, sigma, &self.right))
    }

    /// Number of singular values above `rel_tol * sigma[0]`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

fn reconstruct_with(left: &Matrix, sigma: &[f64], right: &Matrix) -> Matrix {
    let (d, m) = (left.rows(), right.rows());
    let mut out = Matrix::zeros(d, m);
    for (k, &s) in sigma.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let u = left.col(k);
        for (c, &v) in right.col(k).iter().enumerate() {
            let w = s * v;
            if w != 0.0 {
                for (dst, &ui) in out.col_mut(c).iter_mut().zip(u) {
                    *dst += w * ui;
                }
            }
        }
    }
    out
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Rotations act on whichever of `mat` / `matᵀ` has fewer columns, after a QR
/// reduction when that matrix is tall. Each singular pair is signed so that
/// the largest-magnitude entry of the left vector is positive (lowest index on
/// ties).
pub fn svd_thin(mat: &Matrix) -> Result<SvdFactors> {
    let (d, m) = mat.shape();
    if d == 0 || m == 0 {
        return Err(Error::param("mat", "matrix must have at least one row and one column"));
    }
    for c in 0..m {
        for (r, &v) in mat.col(c).iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, col: c, value: v });
            }
        }
    }

    let transposed = m > d;
    let work = if transposed { mat.transpose() } else { mat.clone() };
    let (rows, n) = work.shape();

    // Tall inputs are reduced first: work = Q·R, and Jacobi on Rᵀ
    // gives Rᵀ·J = B, so work = (Q·J)·Σ·Ûᵀ. Otherwise Jacobi runs on work
    // itself: work·J = B, so work = Û·Σ·Jᵀ.
    let reduce = rows > n;
    let (q, mut b) = if reduce {
        let (q, r) = householder_qr(&work);
        (Some(q), r.transpose())
    } else {
        (None, work)
    };
    let mut rot = Matrix::identity(n);
    jacobi_sweeps(&mut b, &mut rot);

    let norms: Vec<f64> = (0..n).map(|k| libm::sqrt(dot(b.col(k), b.col(k)))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps index order among equal values.
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(core::cmp::Ordering::Equal));

    let top = norms[order[0]];
    let mut sigma = Vec::with_capacity(n);
    let mut u_hat = Matrix::zeros(b.rows(), n);
    let mut j_sorted = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let s = norms[src];
        let s = if s <= RANK_TOL * top || s == 0.0 { 0.0 } else { s };
        sigma.push(s);
        if s > 0.0 {
            for (dst, &w) in u_hat.col_mut(k).iter_mut().zip(b.col(src)) {
                *dst = w / s;
            }
        }
        j_sorted.col_mut(k).copy_from_slice(rot.col(src));
    }
    complete_basis(&mut u_hat, &sigma);

    // (column space of work, row space of work)
    let (col_side, row_side) = match q {
        Some(q) => (q.matmul(&j_sorted).expect("inner dimensions agree"), u_hat),
        None => (u_hat, j_sorted),
    };
    let (mut left, mut right) = if transposed { (row_side, col_side) } else { (col_side, row_side) };
    fix_signs(&mut left, &mut right);
    Ok(SvdFactors { left, sigma, right })
}

/// Thin Householder QR of a `rows x n` matrix with `rows >= n`: `Q` is
/// `rows x n` with orthonormal columns, `R` is `n x n` upper triangular.
fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    let (rows, n) = a.shape();
    let mut w = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let x = &w.col(k)[k..];
        let norm = libm::sqrt(dot(x, x));
        let mut v = x.to_vec();
        if norm > 0.0 {
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vn = libm::sqrt(dot(&v, &v));
            v.iter_mut().for_each(|e| *e /= vn);
            for j in k..n {
                let col = &mut w.col_mut(j)[k..];
                let p = 2.0 * dot(&v, col);
                for (c, &vi) in col.iter_mut().zip(&v) {
                    *c -= p * vi;
                }
            }
        } else {
            v.iter_mut().for_each(|e| *e = 0.0);
        }
        reflectors.push(v);
    }
    let r = Matrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    let mut q = Matrix::from_fn(rows, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for (k, v) in reflectors.iter().enumerate().rev() {
        for j in 0..n {
            let col = &mut q.col_mut(j)[k..];
            let p = 2.0 * dot(v, col);
            if p != 0.0 {
                for (c, &vi) in col.iter_mut().zip(v) {
                    *c -= p * vi;
                }
            }
        }
    }
    (q, r)
}

fn jacobi_sweeps(work: &mut Matrix, rot: &mut Matrix) {
    let n = work.cols();
    if n < 2 {
        return;
    }
    let rows = work.rows();
    let mut sq: Vec<f64> = (0..n).map(|k| dot(work.col(k), work.col(k))).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = sq[p];
                let beta = sq[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(work.col(p), work.col(q));
                if gamma.abs() <= ORTHO_TOL * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_cols(work, rows, p, q, c, s);
                rotate_cols(rot, n, p, q, c, s);
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
        // Refresh the running norms so rounding in the updates cannot accumulate.
        for (k, v) in sq.iter_mut().enumerate() {
            *v = dot(work.col(k), work.col(k));
        }
    }
}

#[inline]
fn rotate_cols(m: &mut Matrix, rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let data = m.as_col_major_mut();
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fills the columns paired with zero singular values with unit vectors
/// orthogonal to every other column. Each is the coordinate vector with the
/// largest component outside the current span (lowest index on ties), after
/// two Gram-Schmidt passes.
fn complete_basis(u: &mut Matrix, sigma: &[f64]) {
    let rows = u.rows();
    if sigma.iter().all(|&s| s == 0.0) {
        for (k, _) in sigma.iter().enumerate() {
            let col = u.col_mut(k);
            col.iter_mut().for_each(|v| *v = 0.0);
            col[k] = 1.0;
        }
        return;
    }
    for k in 0..sigma.len() {
        if sigma[k] > 0.0 {
            continue;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for candidate in 0..rows {
            let mut v = alloc::vec![0.0; rows];
            v[candidate] = 1.0;
            for _ in 0..2 {
                for j in (0..sigma.len()).filter(|&j| j != k) {
                    let col = u.col(j);
                    let proj = dot(col, &v);
                    if proj != 0.0 {
                        for (vi, &ci) in v.iter_mut().zip(col) {
                            *vi -= proj * ci;
                        }
                    }
                }
            }
            let norm = libm::sqrt(dot(&v, &v));
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("at least one row");
        for (dst, vi) in u.col_mut(k).iter_mut().zip(&v) {
            *dst = vi / norm;
        }
    }
}

fn fix_signs(left: &mut Matrix, right: &mut Matrix) {
    for k in 0..left.cols() {
        let col = left.col(k);
        let mut best = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            left.col_mut(k).iter_mut().for_each(|v| *v = -*v);
            right.col_mut(k).iter_mut().for_each(|v| *v = -*v);
        }
    }
}
