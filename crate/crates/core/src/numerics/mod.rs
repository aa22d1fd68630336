//! Dense symmetric linear algebra, compensated sums and seeded randomness.

mod eigen;
mod matrix;
mod rng;

pub use eigen::{sym_eigendecompose, sym_eigenvalues, EigenResult};
pub use matrix::{center_gram, SymMatrix};
pub use rng::{RngSpec, StreamRng};

use crate::error::{invalid, Result};
use crate::sample::SampleMatrix;
use crate::scalar::Real;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    values.into_iter().collect::<CompensatedSum<T>>().value()
}

#[inline]
pub(crate) fn euclidean_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| (u - v) * (u - v))
        .fold(T::zero(), |acc, v| acc + v)
        .sqrt()
}

/// Median of the `m(m-1)/2` pairwise Euclidean distances between distinct rows.
///
/// An even number of pairs averages the two middle values.
pub fn median_pairwise_distance<T: Real>(x: &SampleMatrix<T>) -> Result<T> {
    let m = x.rows();
    if m < 2 {
        return invalid(format!(
            "median pairwise distance needs at least 2 points, got {m}"
        ));
    }
    let mut dists = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            dists.push(euclidean_distance(x.row(i), x.row(j)));
        }
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("distances are finite");
    let len = dists.len();
    let mid = len / 2;
    let (_, upper, _) = dists.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if len % 2 == 1 {
        return Ok(upper);
    }
    let lower = dists[..mid]
        .iter()
        .copied()
        .fold(T::neg_infinity(), T::max);
    Ok((lower + upper) / (T::one() + T::one()))
}
