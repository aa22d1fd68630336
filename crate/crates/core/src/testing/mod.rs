//! Two-sample and independence tests with spectral, permutation and
//! quadratic-form-bound calibration.
//!
//! Two-sample tests use the scaled statistic `mn/(m+n) · MMD²` (that is,
//! `(m/2) · MMD²` when `m = n`); independence tests use `m · HSIC`. Both are
//! squared norms and are clamped at 0 against rounding. A test rejects when
//! the statistic is strictly greater than the threshold.

mod permutation;
mod qform;
mod spectral;

pub use permutation::{permutation_null, PermutationNull};
pub use qform::{qform_threshold, qform_unit_threshold};
pub use spectral::{
    product_weights, retained_eigenvalues, spectral_null_independence, spectral_null_two_sample,
    weighted_chi_square_draws, SpectralNull,
};

use crate::error::{invalid, Error, Result};
use crate::estimators::{block_sums, centered_grams, hsic_from_centered, labels};
use crate::kernels::{sym_gram, KernelSpec};
use crate::numerics::{center_gram, compensated_sum, RngSpec, SymMatrix};
use crate::sample::{PairedSample, SampleMatrix};
use crate::scalar::Real;

/// Largest level at which the quadratic-form bound holds.
pub const QFORM_MAX_ALPHA: f64 = 0.215;

pub const DEFAULT_NUM_DRAWS: usize = 10_000;
pub const DEFAULT_EIG_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_PRODUCTS: usize = 2_500;
pub const DEFAULT_NUM_PERMS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullMethod {
    /// Weighted chi-square law with weights from centred Gram spectra.
    Spectral {
        num_draws: usize,
        eig_rel_tol: f64,
        max_products: usize,
    },
    /// Random relabelling without replacement.
    Permutation { num_perms: usize },
    /// Conservative bound for mean-one Gaussian quadratic forms.
    QFormBound,
}

impl NullMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectral { .. } => "spectral",
            Self::Permutation { .. } => "permutation",
            Self::QFormBound => "qform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullSpec {
    pub method: NullMethod,
    pub alpha: f64,
}

impl NullSpec {
    pub fn spectral(alpha: f64) -> Self {
        Self {
            method: NullMethod::Spectral {
                num_draws: DEFAULT_NUM_DRAWS,
                eig_rel_tol: DEFAULT_EIG_REL_TOL,
                max_products: DEFAULT_MAX_PRODUCTS,
            },
            alpha,
        }
    }

    pub fn permutation(alpha: f64) -> Self {
        Self {
            method: NullMethod::Permutation {
                num_perms: DEFAULT_NUM_PERMS,
            },
            alpha,
        }
    }

    pub fn qform(alpha: f64) -> Self {
        Self {
            method: NullMethod::QFormBound,
            alpha,
        }
    }

    /// Sets the number of spectral null draws; no effect on other methods.
    pub fn with_draws(mut self, draws: usize) -> Self {
        if let NullMethod::Spectral { num_draws, .. } = &mut self.method {
            *num_draws = draws;
        }
        self
    }

    /// Sets the number of permutations; no effect on other methods.
    pub fn with_perms(mut self, perms: usize) -> Self {
        if let NullMethod::Permutation { num_perms } = &mut self.method {
            *num_perms = perms;
        }
        self
    }

    pub fn with_max_products(mut self, max: usize) -> Self {
        if let NullMethod::Spectral { max_products, .. } = &mut self.method {
            *max_products = max;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        match self.method {
            NullMethod::Spectral {
                num_draws,
                eig_rel_tol,
                max_products,
            } => {
                if num_draws < 1000 {
                    return invalid(format!("spectral null needs at least 1000 draws, got {num_draws}"));
                }
                if !(eig_rel_tol > 0.0 && eig_rel_tol < 1.0) {
                    return invalid(format!("eigenvalue tolerance must lie in (0, 1), got {eig_rel_tol}"));
                }
                if max_products == 0 {
                    return invalid("max_products must be at least 1");
                }
            }
            NullMethod::Permutation { num_perms } => {
                if num_perms < 100 {
                    return invalid(format!("permutation null needs at least 100 permutations, got {num_perms}"));
                }
            }
            NullMethod::QFormBound => {
                if self.alpha > QFORM_MAX_ALPHA {
                    return invalid(format!(
                        "the quadratic-form bound is only valid for alpha <= {QFORM_MAX_ALPHA}, got {}",
                        self.alpha
                    ));
                }
            }
        }
        Ok(())
    }
}

/// How the threshold was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodDetails<T> {
    Spectral {
        eigenvalues_used: usize,
        num_draws: usize,
        discarded_mass: T,
    },
    Permutation {
        num_perms: usize,
    },
    QFormBound {
        mean_estimate: T,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult<T> {
    pub statistic: T,
    pub threshold: T,
    /// Absent for the quadratic-form bound.
    pub p_value: Option<T>,
    pub reject: bool,
    pub details: MethodDetails<T>,
    pub seed: RngSpec,
}

impl<T: Real> TestResult<T> {
    fn new(statistic: T, threshold: T, p_value: Option<T>, details: MethodDetails<T>, seed: RngSpec) -> Self {
        Self {
            statistic,
            threshold,
            p_value,
            reject: statistic > threshold,
            details,
            seed,
        }
    }
}

/// Value at rank `⌈(1 − α) B⌉` of the ascending sample.
pub(crate) fn upper_quantile<T: Real>(sorted: &[T], alpha: f64) -> T {
    if sorted.is_empty() {
        return T::zero();
    }
    let b = sorted.len();
    let rank = ((1.0 - alpha) * b as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(b) - 1]
}

pub(crate) fn rank_p_value<T: Real>(sorted: &[T], observed: T) -> T {
    let below = sorted.partition_point(|&v| v < observed);
    let at_least = sorted.len() - below;
    T::from_usize_lossy(1 + at_least) / T::from_usize_lossy(sorted.len() + 1)
}

fn two_sample_scale<T: Real>(m: usize, n: usize) -> T {
    T::from_usize_lossy(m) * T::from_usize_lossy(n) / T::from_usize_lossy(m + n)
}

/// Two-sample test of `P = Q` from samples `z ~ P` and `w ~ Q`.
pub fn two_sample_test<T: Real>(
    k: &KernelSpec<T>,
    z: &SampleMatrix<T>,
    w: &SampleMatrix<T>,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<TestResult<T>> {
    spec.validate()?;
    k.validate()?;
    let (m, n) = (z.rows(), w.rows());
    if m == 0 || n == 0 {
        return invalid("both samples must be nonempty");
    }
    if matches!(spec.method, NullMethod::Spectral { .. }) && m != n {
        return Err(Error::Unsupported(format!(
            "spectral calibration requires equal sample sizes, got m={m}, n={n}"
        )));
    }
    let pooled = z.concat_rows(w)?;
    let gram = sym_gram(&k.resolve(&pooled)?, &pooled)?;
    let pivot = gram.get(0, 0);
    let shifted: Vec<T> = gram.as_slice().iter().map(|&v| v - pivot).collect();
    let scale: T = two_sample_scale(m, n);
    let (wz, ww) = (T::one() / T::from_usize_lossy(m), -T::one() / T::from_usize_lossy(n));
    let statistic = scale * block_sums(&gram, &labels(m, n), pivot).mmd().max(T::zero());

    match spec.method {
        NullMethod::Spectral { num_draws, .. } => {
            let null = spectral::spectral_null_from_centered(&center_gram(&gram), spec, rng)?;
            Ok(TestResult::new(
                statistic,
                null.threshold,
                Some(null.p_value(statistic)),
                MethodDetails::Spectral {
                    eigenvalues_used: null.weights.len(),
                    num_draws,
                    discarded_mass: null.discarded_mass,
                },
                rng,
            ))
        }
        NullMethod::Permutation { num_perms } => {
            // Null statistics use the weighted form `wᵀ(G − pivot)w`, which
            // agrees with the block sums up to rounding.
            let relabelled = |perm: &[usize]| {
                let mut relabelled = vec![ww; m + n];
                for &i in &perm[..m] {
                    relabelled[i] = wz;
                }
                scale * weighted_quadratic_form(&shifted, &relabelled).max(T::zero())
            };
            let null = permutation_null(relabelled, m + n, spec, rng)?;
            Ok(TestResult::new(
                statistic,
                null.threshold,
                Some(null.p_value(statistic)),
                MethodDetails::Permutation { num_perms },
                rng,
            ))
        }
        NullMethod::QFormBound => {
            let mean_estimate = center_gram(&gram).trace() / T::from_usize_lossy(m + n);
            qform_result(statistic, mean_estimate, spec, rng)
        }
    }
}

/// Independence test of `X ⫫ Y` from paired observations, with the product
/// kernel `k_x · k_y`.
pub fn independence_test<T: Real>(
    kx: &KernelSpec<T>,
    ky: &KernelSpec<T>,
    s: &PairedSample<T>,
    spec: &NullSpec,
    rng: RngSpec,
) -> Result<TestResult<T>> {
    spec.validate()?;
    let m = s.len();
    if m < 2 && !matches!(spec.method, NullMethod::QFormBound) {
        return invalid(format!(
            "independence calibration needs at least 2 observations, got {m}"
        ));
    }
    let (cx, cy) = centered_grams(kx, ky, s)?;
    let mf = T::from_usize_lossy(m);
    let statistic = (mf * hsic_from_centered(&cx, &cy)).max(T::zero());

    match spec.method {
        NullMethod::Spectral { num_draws, .. } => {
            let null = spectral::spectral_null_independence_from_centered(&cx, &cy, spec, rng)?;
            Ok(TestResult::new(
                statistic,
                null.threshold,
                Some(null.p_value(statistic)),
                MethodDetails::Spectral {
                    eigenvalues_used: null.weights.len(),
                    num_draws,
                    discarded_mass: null.discarded_mass,
                },
                rng,
            ))
        }
        NullMethod::Permutation { num_perms } => {
            let permuted = |perm: &[usize]| (permuted_hsic(&cx, &cy, perm) / mf).max(T::zero());
            let null = permutation_null(permuted, m, spec, rng)?;
            Ok(TestResult::new(
                statistic,
                null.threshold,
                Some(null.p_value(statistic)),
                MethodDetails::Permutation { num_perms },
                rng,
            ))
        }
        NullMethod::QFormBound => {
            let mean_estimate = (cx.trace() / mf) * (cy.trace() / mf);
            qform_result(statistic, mean_estimate, spec, rng)
        }
    }
}

/// `Σ_ij cx[i][j] · cy[π_i][π_j]`; rows are summed plainly, row totals with compensation.
fn permuted_hsic<T: Real>(cx: &SymMatrix<T>, cy: &SymMatrix<T>, perm: &[usize]) -> T {
    let n = cx.n();
    compensated_sum((0..n).map(|i| {
        let row_y = cy.row(perm[i]);
        cx.row(i)
            .iter()
            .zip(perm)
            .fold(T::zero(), |acc, (&a, &p)| acc + a * row_y[p])
    }))
}

/// `wᵀ G w` for a row-major square `G`.
fn weighted_quadratic_form<T: Real>(g: &[T], w: &[T]) -> T {
    compensated_sum(g.chunks_exact(w.len()).zip(w).map(|(row, &wi)| {
        wi * row.iter().zip(w).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }))
}

/// A non-positive null mean means a degenerate (zero) centred Gram matrix;
/// the statistic is then 0 as well and the threshold is set to 0.
fn qform_result<T: Real>(statistic: T, mean_estimate: T, spec: &NullSpec, rng: RngSpec) -> Result<TestResult<T>> {
    let threshold = if mean_estimate > T::zero() {
        qform_threshold(spec, mean_estimate)?
    } else {
        qform_unit_threshold(spec.alpha)?;
        T::zero()
    };
    Ok(TestResult::new(
        statistic,
        threshold,
        None,
        MethodDetails::QFormBound { mean_estimate },
        rng,
    ))
}
