//! Resampling calibration by random relabelling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::RngSpec;
use crate::scalar::Real;
use crate::testing::{rank_p_value, upper_quantile, NullMethod, NullSpec};

/// Statistics recomputed on `B` random relabellings, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationNull<T> {
    pub threshold: T,
    pub samples: Vec<T>,
}

impl<T: Real> PermutationNull<T> {
    pub fn num_perms(&self) -> usize {
        self.samples.len()
    }

    /// `(1 + #{null ≥ observed}) / (B + 1)`, never below `1 / (B + 1)`.
    pub fn p_value(&self, observed: T) -> T {
        rank_p_value(&self.samples, observed)
    }
}

/// Evaluates `statistic_fn` on `num_perms` uniformly random permutations of
/// `0..n_items`.
///
/// The caller decides what a permutation means: for two samples the first
/// `m` indices form the relabelled first sample, for independence the `y`
/// rows are reordered by it. Permutation `b` is drawn from substream `b` of
/// `rng`.
pub fn permutation_null<T, F>(
    statistic_fn: F,
    n_items: usize,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<PermutationNull<T>>
where
    T: Real,
    F: Fn(&[usize]) -> T + Sync,
{
    spec.validate()?;
    let NullMethod::Permutation { num_perms } = spec.method else {
        return Err(Error::InvalidInput(
            "permutation null requested with a non-permutation null specification".into(),
        ));
    };
    let mut samples: Vec<T> = (0..num_perms)
        .into_par_iter()
        .map(|b| {
            let perm = rng.substream(b as u64).rng().permutation(n_items);
            statistic_fn(&perm)
        })
        .collect();
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    Ok(PermutationNull {
        threshold: upper_quantile(&samples, spec.alpha),
        samples,
    })
}
