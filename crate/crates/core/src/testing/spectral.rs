//! Null distributions of the form `Σ w_i N_i²` with weights estimated from
//! the spectra of centred Gram matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::centered_grams;
use crate::kernels::{sym_gram, KernelSpec};
use crate::numerics::{center_gram, sym_eigenvalues, RngSpec, SymMatrix};
use crate::sample::{PairedSample, SampleMatrix};
use crate::scalar::Real;
use crate::testing::{upper_quantile, NullMethod, NullSpec};

const DRAWS_PER_STREAM: usize = 1024;

/// Monte Carlo sample of a weighted chi-square law and its upper quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralNull<T> {
    pub threshold: T,
    /// Null draws, ascending.
    pub samples: Vec<T>,
    /// Weights actually used, descending.
    pub weights: Vec<T>,
    /// Total weight dropped by product truncation (independence only).
    pub discarded_mass: T,
}

impl<T: Real> SpectralNull<T> {
    /// `(1 + #{draws ≥ statistic}) / (B + 1)`.
    pub fn p_value(&self, statistic: T) -> T {
        super::rank_p_value(&self.samples, statistic)
    }
}

/// Eigenvalues of a centred Gram matrix divided by `scale`, negatives clamped
/// to 0, keeping only those above `rel_tol · max`.
pub fn retained_eigenvalues<T: Real>(centered: &SymMatrix<T>, scale: T, rel_tol: f64) -> Result<Vec<T>> {
    let eig = sym_eigenvalues(centered)?;
    let clamped: Vec<T> = eig.into_iter().map(|v| v.max(T::zero()) / scale).collect();
    let max = clamped.first().copied().unwrap_or_else(T::zero);
    if max <= T::zero() {
        return Ok(Vec::new());
    }
    let cut = T::from_f64_lossy(rel_tol) * max;
    Ok(clamped.into_iter().filter(|&v| v > cut).collect())
}

/// `num_draws` independent draws of `Σ_i weights[i] · N_i²`, sorted ascending.
///
/// Draws are generated in fixed blocks, each from its own substream of `rng`,
/// so the result does not depend on thread scheduling.
pub fn weighted_chi_square_draws<T: Real>(weights: &[T], num_draws: usize, rng: RngSpec) -> Vec<T> {
    let w: Vec<f64> = weights.iter().map(|v| v.to_f64_lossy()).collect();
    let blocks = num_draws.div_ceil(DRAWS_PER_STREAM);
    let mut draws: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let count = DRAWS_PER_STREAM.min(num_draws - b * DRAWS_PER_STREAM);
            let mut gen = rng.substream(b as u64).rng();
            let w = &w;
            (0..count)
                .map(move |_| {
                    w.iter()
                        .map(|&wi| {
                            let z = gen.standard_normal();
                            wi * z * z
                        })
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    draws.into_iter().map(T::from_f64_lossy).collect()
}

fn spectral_params(spec: &NullSpec) -> Result<(usize, f64, usize)> {
    spec.validate()?;
    match spec.method {
        NullMethod::Spectral {
            num_draws,
            eig_rel_tol,
            max_products,
        } => Ok((num_draws, eig_rel_tol, max_products)),
        _ => Err(Error::InvalidInput(
            "spectral null requested with a non-spectral null specification".into(),
        )),
    }
}

/// Null law of `(m/2) · MMD²` for two samples of size `m` pooled into
/// `pooled` (first `m` rows, then `m` more).
pub fn spectral_null_two_sample<T: Real>(
    k: &KernelSpec<T>,
    pooled: &SampleMatrix<T>,
    m: usize,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<SpectralNull<T>> {
    spectral_params(spec)?;
    k.validate()?;
    if m == 0 || pooled.rows() != 2 * m {
        return Err(Error::Unsupported(format!(
            "spectral two-sample calibration needs equal sample sizes: {} pooled rows for m={m}",
            pooled.rows()
        )));
    }
    let gram = sym_gram(&k.resolve(pooled)?, pooled)?;
    spectral_null_from_centered(&center_gram(&gram), spec, rng)
}

pub(crate) fn spectral_null_from_centered<T: Real>(
    centered: &SymMatrix<T>,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<SpectralNull<T>> {
    let (num_draws, rel_tol, _) = spectral_params(spec)?;
    let weights = retained_eigenvalues(centered, T::from_usize_lossy(centered.n()), rel_tol)?;
    Ok(finish(weights, T::zero(), num_draws, spec.alpha, rng))
}

/// Null law of `m · HSIC`: weights are the largest products `λ_i η_j` of the
/// two marginal spectra (each divided by `m`).
pub fn spectral_null_independence<T: Real>(
    kx: &KernelSpec<T>,
    ky: &KernelSpec<T>,
    s: &PairedSample<T>,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<SpectralNull<T>> {
    spectral_params(spec)?;
    if s.len() < 2 {
        return Err(Error::InvalidInput(
            "independence calibration needs at least 2 observations".into(),
        ));
    }
    let (cx, cy) = centered_grams(kx, ky, s)?;
    spectral_null_independence_from_centered(&cx, &cy, spec, rng)
}

pub(crate) fn spectral_null_independence_from_centered<T: Real>(
    cx: &SymMatrix<T>,
    cy: &SymMatrix<T>,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<SpectralNull<T>> {
    let (num_draws, rel_tol, max_products) = spectral_params(spec)?;
    let m = T::from_usize_lossy(cx.n());
    let lx = retained_eigenvalues(cx, m, rel_tol)?;
    let ly = retained_eigenvalues(cy, m, rel_tol)?;
    let (weights, discarded) = product_weights(&lx, &ly, max_products);
    Ok(finish(weights, discarded, num_draws, spec.alpha, rng))
}

/// All products `a_i b_j`, descending, truncated to the `max` largest.
/// Returns the kept products and the total of the dropped ones.
pub fn product_weights<T: Real>(a: &[T], b: &[T], max: usize) -> (Vec<T>, T) {
    let mut all: Vec<T> = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
    all.sort_by(|p, q| q.partial_cmp(p).expect("finite products"));
    let dropped = if all.len() > max {
        all.split_off(max)
    } else {
        Vec::new()
    };
    (all, dropped.into_iter().fold(T::zero(), |acc, v| acc + v))
}

fn finish<T: Real>(weights: Vec<T>, discarded_mass: T, num_draws: usize, alpha: f64, rng: RngSpec) -> SpectralNull<T> {
    let samples = weighted_chi_square_draws(&weights, num_draws, rng);
    SpectralNull {
        threshold: upper_quantile(&samples, alpha),
        samples,
        weights,
        discarded_mass,
    }
}
