//! Observation containers: one row per observation, one column per coordinate.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `rows × dim` matrix of observations stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix<T> {
    rows: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SampleMatrix<T> {
    /// Builds a sample from row-major data. Every value must be finite.
    pub fn from_vec(rows: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return invalid("sample dimension must be at least 1");
        }
        if data.len() != rows * dim {
            return invalid(format!(
                "expected {} values for a {rows}x{dim} sample, got {}",
                rows * dim,
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return invalid(format!(
                "non-finite value at row {}, column {}",
                pos / dim,
                pos % dim
            ));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("cannot infer dimension of an empty row list");
        };
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return invalid(format!("row {i} has {} columns, expected {dim}", r.len()));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), dim, data)
    }

    /// One-dimensional sample with one observation per value.
    pub fn from_column(values: &[T]) -> Result<Self> {
        Self::from_vec(values.len(), 1, values.to_vec())
    }

    /// Sample with zero observations of the given dimension.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::from_vec(0, dim, Vec::new())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat_rows(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return invalid(format!(
                "cannot pool samples of dimension {} and {}",
                self.dim, other.dim
            ));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            dim: self.dim,
            data,
        })
    }

    /// Row `i` of the result is row `indices[i]` of `self`.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            dim: self.dim,
            data,
        }
    }

    /// Columns `[start, end)` of every row.
    pub fn columns(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.dim {
            return invalid(format!(
                "column range {start}..{end} is invalid for dimension {}",
                self.dim
            ));
        }
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for r in self.iter_rows() {
            data.extend_from_slice(&r[start..end]);
        }
        Ok(Self {
            rows: self.rows,
            dim: end - start,
            data,
        })
    }

    /// Every row multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            rows: self.rows,
            dim: self.dim,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }
}

/// Joint observations `(x_i, y_i)` stored as two row-aligned samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample<T> {
    x: SampleMatrix<T>,
    y: SampleMatrix<T>,
}

impl<T: Real> PairedSample<T> {
    pub fn new(x: SampleMatrix<T>, y: SampleMatrix<T>) -> Result<Self> {
        if x.rows() != y.rows() {
            return invalid(format!(
                "paired sample needs equal row counts, got {} and {}",
                x.rows(),
                y.rows()
            ));
        }
        if x.rows() == 0 {
            return invalid("paired sample needs at least one observation");
        }
        Ok(Self { x, y })
    }

    /// Splits concatenated rows at column `split`: `[0, split)` is x, the rest is y.
    pub fn from_joint(joint: &SampleMatrix<T>, split: usize) -> Result<Self> {
        if split == 0 || split >= joint.dim() {
            return invalid(format!(
                "split column {split} must lie strictly inside 1..{}",
                joint.dim()
            ));
        }
        Self::new(joint.columns(0, split)?, joint.columns(split, joint.dim())?)
    }

    #[inline]
    pub fn x(&self) -> &SampleMatrix<T> {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &SampleMatrix<T> {
        &self.y
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.rows()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }

    /// Concatenated `(x_i, y_i)` rows; the split column is `x().dim()`.
    pub fn joint(&self) -> SampleMatrix<T> {
        let dim = self.x.dim() + self.y.dim();
        let mut data = Vec::with_capacity(self.len() * dim);
        for i in 0..self.len() {
            data.extend_from_slice(self.x.row(i));
            data.extend_from_slice(self.y.row(i));
        }
        SampleMatrix {
            rows: self.len(),
            dim,
            data,
        }
    }

    /// All `m²` concatenated pairs `(x_i, y_j)`, the sample of the product of
    /// the two empirical marginals.
    pub fn product_of_marginals(&self) -> SampleMatrix<T> {
        let m = self.len();
        let dim = self.x.dim() + self.y.dim();
        let mut data = Vec::with_capacity(m * m * dim);
        for i in 0..m {
            for j in 0..m {
                data.extend_from_slice(self.x.row(i));
                data.extend_from_slice(self.y.row(j));
            }
        }
        SampleMatrix {
            rows: m * m,
            dim,
            data,
        }
    }

    /// `y` rows reordered by `perm` while `x` stays fixed.
    pub fn with_y_permuted(&self, perm: &[usize]) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.select_rows(perm),
        }
    }

    /// Both blocks reordered jointly.
    pub fn select_rows(&self, perm: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(perm),
            y: self.y.select_rows(perm),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite_rows() {
        let ragged: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(SampleMatrix::from_rows(&ragged).is_err());
        assert!(SampleMatrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn joint_and_split_are_inverse() {
        let x = SampleMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let y = SampleMatrix::from_rows(&[[5.0], [6.0]]).unwrap();
        let s = PairedSample::new(x, y).unwrap();
        let joint = s.joint();
        assert_eq!(joint.row(1), &[3.0, 4.0, 6.0]);
        assert_eq!(PairedSample::from_joint(&joint, 2).unwrap(), s);
    }

    #[test]
    fn product_of_marginals_enumerates_all_pairs() {
        let s = PairedSample::new(
            SampleMatrix::from_column(&[1.0, 2.0]).unwrap(),
            SampleMatrix::from_column(&[10.0, 20.0]).unwrap(),
        )
        .unwrap();
        let p = s.product_of_marginals();
        assert_eq!(p.rows(), 4);
        assert_eq!(p.row(1), &[1.0, 20.0]);
        assert_eq!(p.row(2), &[2.0, 10.0]);
    }
}
