//! Approximate joint diagonalization of a set of symmetric matrices.
//!
//! Finds an invertible `V` making every `V M V^T` as diagonal as possible,
//! using per-pair linear corrections of the transformed matrices (the uwedge
//! iteration). The input matrices may be indefinite, as the covariance
//! difference matrices produced by [`crate::covstats`] usually are.


use nalgebra::{DMatrix, DVector};
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::covstats::MatrixSet;
use crate::error::{invalid, Error, Result};

/// How the iteration is initialized.
#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    /// Whiten with the first matrix of the set: `M_0 = U L U^T` gives
    /// `W_0 = |L|^{-1/2} U^T`. Absolute eigenvalues are used because the
    /// input may be indefinite; near-zero eigenvalues are clamped.
    Whitening,
    Identity,
    Matrix(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizerOptions {
    pub max_iter: usize,
    /// Relative Frobenius change of `V` between iterations below which the
    /// iteration stops early.
    pub rel_tol: f64,
    pub init: InitStrategy,
}

impl Default for DiagonalizerOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, rel_tol: 1e-9, init: InitStrategy::Whitening }
    }
}

/// Result of a joint diagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonalizer {
    /// Unmixing matrix; rows have unit norm and their largest-magnitude entry
    /// is positive.
    pub v: DMatrix<f64>,
    /// Whether the relative change dropped below `rel_tol` before `max_iter`.
    pub converged: bool,
    /// Iterations actually used.
    pub iterations: usize,
    /// Off-diagonal loss of the returned `v`.
    pub final_loss: f64,
}

/// Sum over the set of squared off-diagonal entries of `V M V^T`.
pub fn offdiag_loss(v: &DMatrix<f64>, set: &MatrixSet) -> Result<f64> {
    let d = set.dim();
    if v.nrows() != d || v.ncols() != d {
        return Err(invalid("unmixing matrix dimension does not match the matrix set"));
    }
    let mut loss = 0.0;
    for m in set.iter() {
        let r = v * m * v.transpose();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    loss += r[(i, j)] * r[(i, j)];
                }
            }
        }
    }
    Ok(loss)
}

/// Jointly diagonalizes the set, returning the row-normalized unmixing matrix
/// together with convergence diagnostics. Failure to converge within
/// `max_iter` is reported through the `converged` flag, not as an error.
pub fn uwedge(set: &MatrixSet, opts: &DiagonalizerOptions) -> Result<Diagonalizer> {
    if opts.max_iter == 0 {
        return Err(invalid("max_iter must be at least 1"));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(invalid("rel_tol must be positive"));
    }
    let d = set.dim();

    let mut w = match &opts.init {
        InitStrategy::Identity => DMatrix::identity(d, d),
        InitStrategy::Matrix(m) => {
            if m.nrows() != d || m.ncols() != d {
                return Err(invalid("initial matrix dimension does not match the matrix set"));
            }
            m.clone()
        }
        InitStrategy::Whitening => whitening_init(&set.matrices()[0]),
    };
    canonicalize_rows(&mut w);

    let mut converged = false;
    let mut iterations = 0;
    'outer: for iter in 1..=opts.max_iter {
        iterations = iter;
        // transformed matrices and the accumulators of the pairwise normal
        // equations: s = sum_k lam_k lam_k^T, t[(i,j)] = sum_k lam_kj R_k[(i,j)]
        let mut s: DMatrix<f64> = DMatrix::zeros(d, d);
        let mut t: DMatrix<f64> = DMatrix::zeros(d, d);
        for m in set.iter() {
            let r = &w * m * w.transpose();
            let lam: DVector<f64> = r.diagonal();
            for i in 0..d {
                for j in (i + 1)..d {
                    let rij = 0.5 * (r[(i, j)] + r[(j, i)]);
                    t[(i, j)] += lam[j] * rij;
                    t[(j, i)] += lam[i] * rij;
                }
            }
            s.syger(1.0, &lam, &lam, 1.0);
        }
        for i in 0..d {
            for j in i..d {
                s[(i, j)] = s[(j, i)];
            }
        }

        // correction matrix with unit diagonal from the per-pair 2x2 solves
        let mut b = DMatrix::identity(d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                let s_ii = s[(i, i)];
                let s_jj = s[(j, j)];
                let s_ij = s[(i, j)];
                let det = s_ii * s_jj - s_ij * s_ij;
                let scale = s_ii * s_jj;
                if det <= 1e-14 * scale || scale == 0.0 {
                    continue; // unidentifiable pair this iteration
                }
                b[(i, j)] = (s_ii * t[(i, j)] - s_ij * t[(j, i)]) / det;
                b[(j, i)] = (s_jj * t[(j, i)] - s_ij * t[(i, j)]) / det;
            }
        }

        let Some(b_inv) = b.try_inverse() else {
            // correction collapsed; keep the previous iterate
            break 'outer;
        };
        let mut w_new = &b_inv * &w;
        canonicalize_rows(&mut w_new);
        let delta = (&w_new - &w).norm() / w.norm();
        w = w_new;
        if delta < opts.rel_tol {
            converged = true;
            break;
        }
    }

    let final_loss = offdiag_loss(&w, set)?;
    Ok(Diagonalizer { v: w, converged, iterations, final_loss })
}

fn whitening_init(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs()));
    if max_abs == 0.0 || !max_abs.is_finite() {
        return DMatrix::identity(d, d);
    }
    let floor = 1e-12 * max_abs;
    let mut w = eig.eigenvectors.transpose();
    for (i, mut row) in w.row_iter_mut().enumerate() {
        let scale = 1.0 / eig.eigenvalues[i].abs().max(floor).sqrt();
        row *= scale;
    }
    w
}

/// Normalizes every row to unit Euclidean norm and flips its sign so that the
/// largest-magnitude entry is positive. Zero rows are left untouched.
pub(crate) fn canonicalize_rows(w: &mut DMatrix<f64>) {
    let d = w.ncols();
    for mut row in w.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
        let mut lead = 0;
        for j in 1..d {
            if row[j].abs() > row[lead].abs() {
                lead = j;
            }
        }
        if row[lead] < 0.0 {
            row.neg_mut();
        }
    }
}

/// Convenience check used by callers that must invert the result.
pub(crate) fn inverse_or(m: &DMatrix<f64>, context: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical(alloc::format!("{context}: matrix is singular")))
}
