use crate::error::{invalid, Result};
use crate::numerics::compensated_sum;
use crate::scalar::Real;

/// Dense symmetric `n × n` matrix, stored in full row-major form with
/// `a[i][j] == a[j][i]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    /// Fills the upper triangle from `f(i, j)` with `i <= j` and mirrors it.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        if n == 0 {
            return invalid("symmetric matrix must have dimension at least 1");
        }
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(Self { n, data })
    }

    /// Wraps row-major data after checking exact symmetry.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 {
            return invalid("symmetric matrix must have dimension at least 1");
        }
        if data.len() != n * n {
            return invalid(format!("expected {} entries, got {}", n * n, data.len()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return invalid(format!("entries ({i},{j}) and ({j},{i}) differ"));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return invalid(format!("row {i} has {} entries, expected {n}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_upper_fn(n, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_upper_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(values: &[T]) -> Result<Self> {
        Self::from_upper_fn(values.len(), |i, j| if i == j { values[i] } else { T::zero() })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn trace(&self) -> T {
        compensated_sum((0..self.n).map(|i| self.get(i, i)))
    }

    pub fn frobenius_norm(&self) -> T {
        compensated_sum(self.data.iter().map(|&v| v * v)).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum of the elementwise product with `other` (the trace of `self · other`).
    pub fn frobenius_inner(&self, other: &Self) -> T {
        debug_assert_eq!(self.n, other.n);
        compensated_sum(self.data.iter().zip(&other.data).map(|(&a, &b)| a * b))
    }

    pub(crate) fn into_data(self) -> Vec<T> {
        self.data
    }
}

/// Double centering `H K H` with `H = I - 11ᵀ/n`.
///
/// Means are taken of `K - K[0][0]`; the pivot cancels in `H K H`, and a
/// constant input therefore centers to exactly zero.
pub fn center_gram<T: Real>(k: &SymMatrix<T>) -> SymMatrix<T> {
    let n = k.n();
    let nf = T::from_usize_lossy(n);
    let pivot = k.get(0, 0);
    let row_means: Vec<T> = (0..n)
        .map(|i| compensated_sum(k.row(i).iter().map(|&v| v - pivot)) / nf)
        .collect();
    let grand = compensated_sum(row_means.iter().copied()) / nf;
    SymMatrix::from_upper_fn(n, |i, j| {
        ((k.get(i, j) - pivot) - row_means[i]) - row_means[j] + grand
    })
    .expect("dimension is at least 1")
}
