//! Semimetrics of negative type, the kernels they induce, and Gram matrices.
//!
//! A semimetric `ρ` and a kernel `k` correspond through
//!
//! ```text
//! k(z, z') = ½ [ρ(z, z₀) + ρ(z', z₀) − ρ(z, z')]      (distance-induced, centre z₀)
//! ρ(z, z') = k(z, z) + k(z', z') − 2 k(z, z')          (semimetric generated by k)
//! ```
//!
//! Kernels that generate the same `ρ` differ by a shift `f(z) + f(z')` and
//! give identical MMD and HSIC values.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::numerics::{compensated_sum, euclidean_distance, median_pairwise_distance, SymMatrix};
use crate::sample::SampleMatrix;
use crate::scalar::Real;

/// Centre `z₀` of a distance-induced kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Center<T> {
    /// The zero vector of whatever dimension the points have.
    Origin,
    Point(Vec<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth<T> {
    Fixed(T),
    /// Median pairwise distance of the pooled data; must be resolved before evaluation.
    MedianHeuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemimetricSpec<T> {
    /// `‖z − z'‖₂^q`. Of negative type for `0 < q ≤ 2`.
    EuclideanPower { exponent: T },
    /// `k(z,z) + k(z',z') − 2k(z,z')`.
    FromKernel(Box<KernelSpec<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec<T> {
    DistanceInduced {
        rho: SemimetricSpec<T>,
        center: Center<T>,
    },
    /// `exp(−‖z − z'‖² / (2σ²))`.
    Gaussian { bandwidth: Bandwidth<T> },
    /// `k_x(x, x') · k_y(y, y')` on concatenated rows split at column `split`.
    Product {
        x: Box<KernelSpec<T>>,
        y: Box<KernelSpec<T>>,
        split: usize,
    },
    CenteredAtEmpirical(CenteredKernel<T>),
}

/// Kernel centred at the empirical measure of a reference sample:
///
/// ```text
/// k̃(z, z') = k(z, z') − mean_i k(z, w_i) − mean_i k(z', w_i) + mean_ij k(w_i, w_j)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredKernel<T> {
    base: Box<KernelSpec<T>>,
    reference: SampleMatrix<T>,
    reference_mean: T,
}

impl<T: Real> CenteredKernel<T> {
    pub fn base(&self) -> &KernelSpec<T> {
        &self.base
    }

    pub fn reference(&self) -> &SampleMatrix<T> {
        &self.reference
    }

    fn embedding_at(&self, z: &[T]) -> Result<T> {
        let r = T::from_usize_lossy(self.reference.rows());
        let mut acc = Vec::with_capacity(self.reference.rows());
        for w in self.reference.iter_rows() {
            acc.push(self.base.eval(z, w)?);
        }
        Ok(compensated_sum(acc) / r)
    }
}

impl<T: Real> SemimetricSpec<T> {
    pub fn euclidean_power(exponent: T) -> Self {
        Self::EuclideanPower { exponent }
    }

    /// Euclidean distance (`q = 1`).
    pub fn euclidean() -> Self {
        Self::euclidean_power(T::one())
    }

    pub fn from_kernel(k: KernelSpec<T>) -> Self {
        Self::FromKernel(Box::new(k))
    }

    pub fn eval(&self, z: &[T], z2: &[T]) -> Result<T> {
        check_dims(z, z2)?;
        match self {
            Self::EuclideanPower { exponent } => Ok(euclidean_power(z, z2, *exponent)),
            Self::FromKernel(k) => {
                Ok(k.eval(z, z)? + k.eval(z2, z2)? - (k.eval(z, z2)? + k.eval(z, z2)?))
            }
        }
    }

    /// `ρ(z, 0)`.
    fn eval_from_origin(&self, z: &[T]) -> Result<T> {
        match self {
            Self::EuclideanPower { exponent } => {
                let norm = z.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
                Ok(power_of_distance(norm, *exponent))
            }
            Self::FromKernel(_) => self.eval(z, &vec![T::zero(); z.len()]),
        }
    }

    /// Checks the constraints every estimator imposes: exponents in `(0, 2]`
    /// and positive finite bandwidths, recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::EuclideanPower { exponent } => {
                let q = *exponent;
                if !(q > T::zero() && q <= T::one() + T::one()) {
                    return invalid(format!(
                        "semimetric exponent q={q} is outside (0, 2]; negative type is not guaranteed"
                    ));
                }
                Ok(())
            }
            Self::FromKernel(k) => k.validate(),
        }
    }

    pub fn needs_resolution(&self) -> bool {
        match self {
            Self::EuclideanPower { .. } => false,
            Self::FromKernel(k) => k.needs_resolution(),
        }
    }

    /// Replaces median-heuristic bandwidths using `pooled`.
    pub fn resolve(&self, pooled: &SampleMatrix<T>) -> Result<Self> {
        match self {
            Self::EuclideanPower { .. } => Ok(self.clone()),
            Self::FromKernel(k) => Ok(Self::FromKernel(Box::new(k.resolve(pooled)?))),
        }
    }
}

impl<T: Real> KernelSpec<T> {
    /// Kernel induced by `‖z − z'‖^q`, centred at the origin.
    pub fn distance(q: T) -> Self {
        Self::distance_induced(SemimetricSpec::euclidean_power(q), Center::Origin)
    }

    pub fn distance_induced(rho: SemimetricSpec<T>, center: Center<T>) -> Self {
        Self::DistanceInduced { rho, center }
    }

    pub fn gaussian(sigma: T) -> Self {
        Self::Gaussian {
            bandwidth: Bandwidth::Fixed(sigma),
        }
    }

    pub fn gaussian_median() -> Self {
        Self::Gaussian {
            bandwidth: Bandwidth::MedianHeuristic,
        }
    }

    pub fn product(x: Self, y: Self, split: usize) -> Self {
        Self::Product {
            x: Box::new(x),
            y: Box::new(y),
            split,
        }
    }

    /// Centres `base` at the empirical measure of `reference`. The base kernel
    /// must already be resolved.
    pub fn centered_at(base: Self, reference: SampleMatrix<T>) -> Result<Self> {
        if base.needs_resolution() {
            return Err(Error::State(
                "resolve the median bandwidth before centring a kernel".into(),
            ));
        }
        if reference.is_empty() {
            return invalid("centring reference sample is empty");
        }
        let gram = sym_gram(&base, &reference)?;
        let r = T::from_usize_lossy(reference.rows());
        let reference_mean = compensated_sum(gram.as_slice().iter().copied()) / (r * r);
        Ok(Self::CenteredAtEmpirical(CenteredKernel {
            base: Box::new(base),
            reference,
            reference_mean,
        }))
    }

    pub fn eval(&self, z: &[T], z2: &[T]) -> Result<T> {
        check_dims(z, z2)?;
        match self {
            Self::DistanceInduced { rho, center } => {
                let half = T::from_f64_lossy(0.5);
                let (rz, rz2) = match center {
                    Center::Origin => (rho.eval_from_origin(z)?, rho.eval_from_origin(z2)?),
                    Center::Point(c) => (rho.eval(z, c)?, rho.eval(z2, c)?),
                };
                Ok(half * (rz + rz2 - rho.eval(z, z2)?))
            }
            Self::Gaussian { bandwidth } => match bandwidth {
                Bandwidth::Fixed(sigma) => {
                    let d = euclidean_distance(z, z2);
                    let two = T::one() + T::one();
                    Ok((-(d * d) / (two * *sigma * *sigma)).exp())
                }
                Bandwidth::MedianHeuristic => Err(Error::State(
                    "Gaussian median-heuristic bandwidth has not been resolved".into(),
                )),
            },
            Self::Product { x, y, split } => {
                if *split == 0 || *split >= z.len() {
                    return invalid(format!(
                        "product split {split} is not inside a point of dimension {}",
                        z.len()
                    ));
                }
                Ok(x.eval(&z[..*split], &z2[..*split])? * y.eval(&z[*split..], &z2[*split..])?)
            }
            Self::CenteredAtEmpirical(c) => {
                let base = c.base.eval(z, z2)?;
                Ok(base - c.embedding_at(z)? - c.embedding_at(z2)? + c.reference_mean)
            }
        }
    }

    /// The semimetric this kernel generates.
    pub fn generated_semimetric(&self) -> SemimetricSpec<T> {
        SemimetricSpec::FromKernel(Box::new(self.clone()))
    }

    /// See [`SemimetricSpec::validate`].
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::DistanceInduced { rho, center } => {
                if let Center::Point(p) = center {
                    if p.iter().any(|v| !v.is_finite()) {
                        return invalid("kernel centre has non-finite coordinates");
                    }
                }
                rho.validate()
            }
            Self::Gaussian { bandwidth } => match bandwidth {
                Bandwidth::Fixed(s) if !(s.is_finite() && *s > T::zero()) => {
                    invalid(format!("Gaussian bandwidth must be positive and finite, got {s}"))
                }
                _ => Ok(()),
            },
            Self::Product { x, y, split } => {
                if *split == 0 {
                    return invalid("product split must be at least 1");
                }
                x.validate()?;
                y.validate()
            }
            Self::CenteredAtEmpirical(c) => c.base.validate(),
        }
    }

    pub fn needs_resolution(&self) -> bool {
        match self {
            Self::DistanceInduced { rho, .. } => rho.needs_resolution(),
            Self::Gaussian { bandwidth } => matches!(bandwidth, Bandwidth::MedianHeuristic),
            Self::Product { x, y, .. } => x.needs_resolution() || y.needs_resolution(),
            Self::CenteredAtEmpirical(_) => false,
        }
    }

    /// Replaces median-heuristic bandwidths by the median pairwise distance of
    /// `pooled` (bandwidth 1 when that median is 0 or fewer than two points
    /// exist). Product kernels resolve each block on its own columns.
    pub fn resolve(&self, pooled: &SampleMatrix<T>) -> Result<Self> {
        if !self.needs_resolution() {
            return Ok(self.clone());
        }
        match self {
            Self::DistanceInduced { rho, center } => Ok(Self::DistanceInduced {
                rho: rho.resolve(pooled)?,
                center: center.clone(),
            }),
            Self::Gaussian { .. } => Ok(Self::gaussian(median_bandwidth(pooled)?)),
            Self::Product { x, y, split } => {
                if *split == 0 || *split >= pooled.dim() {
                    return invalid(format!(
                        "product split {split} is not inside dimension {}",
                        pooled.dim()
                    ));
                }
                Ok(Self::Product {
                    x: Box::new(x.resolve(&pooled.columns(0, *split)?)?),
                    y: Box::new(y.resolve(&pooled.columns(*split, pooled.dim())?)?),
                    split: *split,
                })
            }
            Self::CenteredAtEmpirical(_) => Ok(self.clone()),
        }
    }
}

/// Bandwidth chosen by the median heuristic, falling back to 1 for degenerate data.
pub fn median_bandwidth<T: Real>(pooled: &SampleMatrix<T>) -> Result<T> {
    if pooled.rows() < 2 {
        return Ok(T::one());
    }
    let med = median_pairwise_distance(pooled)?;
    Ok(if med > T::zero() { med } else { T::one() })
}

#[inline]
fn euclidean_power<T: Real>(z: &[T], z2: &[T], q: T) -> T {
    power_of_distance(euclidean_distance(z, z2), q)
}

#[inline]
fn power_of_distance<T: Real>(d: T, q: T) -> T {
    if d == T::zero() {
        T::zero()
    } else if q == T::one() {
        d
    } else if q == T::one() + T::one() {
        d * d
    } else {
        d.powf(q)
    }
}

fn check_dims<T>(z: &[T], z2: &[T]) -> Result<()> {
    if z.len() != z2.len() {
        return invalid(format!(
            "points have different dimensions ({} and {})",
            z.len(),
            z2.len()
        ));
    }
    if z.is_empty() {
        return invalid("points must have at least one coordinate");
    }
    Ok(())
}

/// `ρ(z, z')`.
pub fn semimetric_eval<T: Real>(rho: &SemimetricSpec<T>, z: &[T], z2: &[T]) -> Result<T> {
    rho.eval(z, z2)
}

/// `k(z, z')`.
pub fn kernel_eval<T: Real>(k: &KernelSpec<T>, z: &[T], z2: &[T]) -> Result<T> {
    k.eval(z, z2)
}

/// The semimetric generated by `k`.
pub fn semimetric_from_kernel<T: Real>(k: &KernelSpec<T>) -> SemimetricSpec<T> {
    k.generated_semimetric()
}

/// `Σ_i Σ_j α_i α_j ρ(z_i, z_j)` for zero-sum weights `α`.
///
/// Never significantly positive when `ρ` has negative type; any exponent is
/// accepted here so counterexamples (`q > 2`) can be exhibited.
pub fn negative_type_form<T: Real>(
    rho: &SemimetricSpec<T>,
    points: &SampleMatrix<T>,
    weights: &[T],
) -> Result<T> {
    if weights.len() != points.rows() {
        return invalid(format!(
            "{} weights for {} points",
            weights.len(),
            points.rows()
        ));
    }
    let total = compensated_sum(weights.iter().copied());
    if total.abs() > T::from_f64_lossy(1e-12) {
        return invalid(format!("weights must sum to zero, got {total:e}"));
    }
    let n = points.rows();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            terms.push(weights[i] * weights[j] * rho.eval(points.row(i), points.row(j))?);
        }
    }
    Ok(compensated_sum(terms))
}

/// Anything evaluable on pairs of points: kernels and semimetrics.
pub trait PairwiseFn<T: Real>: Sized + Sync {
    fn eval_pair(&self, a: &[T], b: &[T]) -> Result<T>;

    fn needs_resolution(&self) -> bool;

    fn resolve(&self, pooled: &SampleMatrix<T>) -> Result<Self>;
}

impl<T: Real> PairwiseFn<T> for KernelSpec<T> {
    fn eval_pair(&self, a: &[T], b: &[T]) -> Result<T> {
        self.eval(a, b)
    }

    fn needs_resolution(&self) -> bool {
        KernelSpec::needs_resolution(self)
    }

    fn resolve(&self, pooled: &SampleMatrix<T>) -> Result<Self> {
        KernelSpec::resolve(self, pooled)
    }
}

impl<T: Real> PairwiseFn<T> for SemimetricSpec<T> {
    fn eval_pair(&self, a: &[T], b: &[T]) -> Result<T> {
        self.eval(a, b)
    }

    fn needs_resolution(&self) -> bool {
        SemimetricSpec::needs_resolution(self)
    }

    fn resolve(&self, pooled: &SampleMatrix<T>) -> Result<Self> {
        SemimetricSpec::resolve(self, pooled)
    }
}

/// `rows × cols` matrix of pairwise evaluations, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> GramMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_sym(self) -> Result<SymMatrix<T>> {
        if self.rows != self.cols {
            return invalid(format!(
                "a {}x{} Gram matrix is not square",
                self.rows, self.cols
            ));
        }
        SymMatrix::from_row_major(self.rows, self.data)
    }
}

/// Gram matrix of `f` between the rows of `x` and the rows of `y`
/// (or of `x` with itself). Median bandwidths are resolved on the pooled rows
/// of `x` and `y` first; the square case is filled on the upper triangle and
/// mirrored.
pub fn gram_matrix<T: Real, F: PairwiseFn<T>>(
    f: &F,
    x: &SampleMatrix<T>,
    y: Option<&SampleMatrix<T>>,
) -> Result<GramMatrix<T>> {
    if x.is_empty() || y.is_some_and(|y| y.is_empty()) {
        return invalid("Gram matrix of an empty sample");
    }
    if let Some(y) = y {
        if y.dim() != x.dim() {
            return invalid(format!(
                "samples have dimensions {} and {}",
                x.dim(),
                y.dim()
            ));
        }
    }
    let resolved;
    let f = if f.needs_resolution() {
        resolved = match y {
            Some(y) => f.resolve(&x.concat_rows(y)?)?,
            None => f.resolve(x)?,
        };
        &resolved
    } else {
        f
    };
    match y {
        None => {
            let sym = sym_gram(f, x)?;
            Ok(GramMatrix {
                rows: sym.n(),
                cols: sym.n(),
                data: sym.into_data(),
            })
        }
        Some(y) => {
            let cols = y.rows();
            let mut data = vec![T::zero(); x.rows() * cols];
            data.par_chunks_mut(cols)
                .enumerate()
                .try_for_each(|(i, out)| -> Result<()> {
                    for (j, slot) in out.iter_mut().enumerate() {
                        *slot = f.eval_pair(x.row(i), y.row(j))?;
                    }
                    Ok(())
                })?;
            check_finite(&data)?;
            Ok(GramMatrix {
                rows: x.rows(),
                cols,
                data,
            })
        }
    }
}

/// Square Gram matrix of an already-resolved `f` over the rows of `x`.
pub(crate) fn sym_gram<T: Real, F: PairwiseFn<T>>(f: &F, x: &SampleMatrix<T>) -> Result<SymMatrix<T>> {
    let n = x.rows();
    if n == 0 {
        return invalid("Gram matrix of an empty sample");
    }
    let mut data = vec![T::zero(); n * n];
    data.par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(i, out)| -> Result<()> {
            for (j, slot) in out.iter_mut().enumerate().skip(i) {
                *slot = f.eval_pair(x.row(i), x.row(j))?;
            }
            Ok(())
        })?;
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    check_finite(&data)?;
    SymMatrix::from_row_major(n, data)
}

fn check_finite<T: Real>(data: &[T]) -> Result<()> {
    if data.iter().any(|v| !v.is_finite()) {
        return invalid("Gram matrix has non-finite entries");
    }
    Ok(())
}

impl<T: Real> fmt::Display for SemimetricSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EuclideanPower { exponent } => write!(f, "euclidean^{exponent}"),
            Self::FromKernel(k) => write!(f, "generated({k})"),
        }
    }
}

impl<T: Real> fmt::Display for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DistanceInduced { rho, center } => {
                match rho {
                    SemimetricSpec::EuclideanPower { exponent } => write!(f, "dist:q={exponent}")?,
                    other => write!(f, "dist:rho={other}")?,
                }
                if let Center::Point(p) = center {
                    let coords: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                    write!(f, ":center=[{}]", coords.join(","))?;
                }
                Ok(())
            }
            Self::Gaussian { bandwidth } => match bandwidth {
                Bandwidth::Fixed(s) => write!(f, "gauss:sigma={s}"),
                Bandwidth::MedianHeuristic => write!(f, "gauss:median"),
            },
            Self::Product { x, y, split } => write!(f, "product({x}|{y}@{split})"),
            Self::CenteredAtEmpirical(c) => {
                write!(f, "centered({}, {} points)", c.base, c.reference.rows())
            }
        }
    }
}

fn parse_real<T: Real>(text: &str, what: &str) -> Result<T> {
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("cannot parse {what} '{text}'")))
    };
    let v = match text.split_once('/') {
        Some((num, den)) => parse(num)? / parse(den)?,
        None => parse(text)?,
    };
    if !v.is_finite() {
        return invalid(format!("{what} '{text}' is not finite"));
    }
    Ok(T::from_f64_lossy(v))
}

/// Parses `dist:q=<q>[:center=origin|[c1,c2,...]]`, `gauss:median` and
/// `gauss:sigma=<s>`. Exponents may be written as fractions (`q=1/3`).
impl<T: Real> FromStr for KernelSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(':');
        let family = parts.next().unwrap_or_default();
        match family {
            "dist" => {
                let mut q = None;
                let mut center = Center::Origin;
                for part in parts {
                    match part.split_once('=') {
                        Some(("q", v)) => q = Some(parse_real::<T>(v, "exponent")?),
                        Some(("center", "origin")) => center = Center::Origin,
                        Some(("center", v)) => {
                            let inner = v
                                .strip_prefix('[')
                                .and_then(|v| v.strip_suffix(']'))
                                .ok_or_else(|| {
                                    Error::InvalidInput(format!(
                                        "centre '{v}' must be 'origin' or '[c1,c2,...]'"
                                    ))
                                })?;
                            let coords = inner
                                .split(',')
                                .map(|c| parse_real::<T>(c, "centre coordinate"))
                                .collect::<Result<Vec<T>>>()?;
                            center = Center::Point(coords);
                        }
                        _ => return invalid(format!("unknown option '{part}' in kernel '{s}'")),
                    }
                }
                let q = q.ok_or_else(|| {
                    Error::InvalidInput(format!("kernel '{s}' is missing q=<exponent>"))
                })?;
                let k = Self::distance_induced(SemimetricSpec::euclidean_power(q), center);
                k.validate()?;
                Ok(k)
            }
            "gauss" => {
                let opt = parts.next();
                if parts.next().is_some() {
                    return invalid(format!("kernel '{s}' has too many options"));
                }
                let k = match opt.map(|o| o.split_once('=').unwrap_or((o, ""))) {
                    Some(("median", "")) => Self::gaussian_median(),
                    Some(("sigma", v)) => Self::gaussian(parse_real(v, "bandwidth")?),
                    _ => {
                        return invalid(format!(
                            "kernel '{s}' must be gauss:median or gauss:sigma=<value>"
                        ))
                    }
                };
                k.validate()?;
                Ok(k)
            }
            _ => invalid(format!(
                "unknown kernel '{s}'; expected dist:q=<q>[:center=...], gauss:median or gauss:sigma=<s>"
            )),
        }
    }
}

/// Splits a comma-separated list of kernel specs, keeping commas inside `[...]`.
pub fn parse_kernel_list<T: Real>(s: &str) -> Result<Vec<KernelSpec<T>>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].parse()?);
    Ok(out)
}
