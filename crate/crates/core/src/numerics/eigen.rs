use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::numerics::{compensated_sum, SymMatrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;
const REL_OFF_TOL: f64 = 1e-12;

/// Eigenvalues in non-increasing order with orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    n: usize,
    eigenvalues: Vec<T>,
    /// Row-major `n × n`; column `i` pairs with `eigenvalues[i]`.
    eigenvectors: Vec<T>,
}

impl<T: Real> EigenResult<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Entry `(row, col)` of the eigenvector matrix.
    pub fn vector_entry(&self, row: usize, col: usize) -> T {
        self.eigenvectors[row * self.n + col]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<T> {
        (0..self.n).map(|r| self.vector_entry(r, i)).collect()
    }

    /// `Q Λ Qᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = compensated_sum(
                    (0..n).map(|k| self.vector_entry(i, k) * self.eigenvalues[k] * self.vector_entry(j, k)),
                );
            }
        }
        out
    }
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls to
/// `1e-12 · ‖A‖_F` (or the scalar's epsilon, whichever is larger).
/// Equal eigenvalues keep their diagonal order.
pub fn sym_eigendecompose<T: Real>(a: &SymMatrix<T>) -> Result<EigenResult<T>> {
    let n = a.n();
    let (diag, vectors) = jacobi(a, true)?;
    let vectors = vectors.expect("vectors requested");
    let order = descending_order(&diag);
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = vec![T::zero(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[r * n + new_col] = vectors[r * n + old_col];
        }
    }
    Ok(EigenResult {
        n,
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, non-increasing. Same rotations as [`sym_eigendecompose`]
/// without accumulating the eigenvector matrix.
pub fn sym_eigenvalues<T: Real>(a: &SymMatrix<T>) -> Result<Vec<T>> {
    let (diag, _) = jacobi(a, false)?;
    Ok(descending_order(&diag).into_iter().map(|i| diag[i]).collect())
}

fn descending_order<T: Real>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap_or(Ordering::Equal));
    order
}

#[allow(clippy::type_complexity)]
fn jacobi<T: Real>(a: &SymMatrix<T>, want_vectors: bool) -> Result<(Vec<T>, Option<Vec<T>>)> {
    if !a.is_finite() {
        return invalid("matrix has non-finite entries");
    }
    let n = a.n();
    let mut m = a.as_slice().to_vec();
    let mut v = want_vectors.then(|| {
        let mut id = vec![T::zero(); n * n];
        for i in 0..n {
            id[i * n + i] = T::one();
        }
        id
    });

    let norm = a.frobenius_norm();
    let rel = T::from_f64_lossy(REL_OFF_TOL).max(T::epsilon() * T::from_f64_lossy(4.0));
    let tol = rel * norm;
    let two = T::one() + T::one();

    let hundred = T::from_f64_lossy(100.0);
    let mut row_p = vec![T::zero(); n];
    let mut row_q = vec![T::zero(); n];
    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m, n) <= tol {
            converged = true;
            break;
        }
        // Early sweeps only rotate entries above a fraction of the mean
        // off-diagonal magnitude.
        let threshold = if sweep < 3 {
            let mut abs_sum = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    abs_sum += m[i * n + j].abs();
                }
            }
            T::from_f64_lossy(0.2) * abs_sum / T::from_usize_lossy(n * n)
        } else {
            T::zero()
        };
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                if apq.abs() < threshold {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // Late sweeps: an entry below the rounding level of both
                // diagonal entries is dropped without a rotation.
                let g = hundred * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[p * n + q] = T::zero();
                    m[q * n + p] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (two * apq);
                let t = if theta.abs() > T::from_f64_lossy(1e150) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                rotate_rows(&mut m, n, p, q, c, s);
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = T::zero();
                m[q * n + p] = T::zero();
                row_p.copy_from_slice(&m[p * n..(p + 1) * n]);
                row_q.copy_from_slice(&m[q * n..(q + 1) * n]);
                for ((row, &xp), &xq) in m.chunks_exact_mut(n).zip(&row_p).zip(&row_q) {
                    row[p] = xp;
                    row[q] = xq;
                }
                if let Some(v) = v.as_mut() {
                    // `v` holds the transposed eigenvector matrix, so this is
                    // also a row rotation.
                    rotate_rows(v, n, p, q, c, s);
                }
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&m, n);
        if off > tol {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off.to_f64_lossy(),
            });
        }
    }
    let diag = (0..n).map(|i| m[i * n + i]).collect();
    Ok((diag, v.map(|vt| transpose(&vt, n))))
}

/// `(row_p, row_q) ← (c·row_p − s·row_q, s·row_p + c·row_q)` for `p < q`.
#[inline]
fn rotate_rows<T: Real>(m: &mut [T], n: usize, p: usize, q: usize, c: T, s: T) {
    let (head, tail) = m.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (a, b) in rp.iter_mut().zip(rq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

fn transpose<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

fn off_diagonal_norm<T: Real>(m: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            acc += m[i * n + j] * m[i * n + j];
        }
    }
    (acc + acc).sqrt()
}
