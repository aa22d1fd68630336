//! Seeded synthetic benchmarks for two-sample and independence tests.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::{RngSpec, StreamRng};
use crate::sample::{PairedSample, SampleMatrix};
use crate::scalar::Real;

/// Non-Gaussian unit-variance source used by the rotation benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marginal {
    /// Uniform on `[−√3, √3]`.
    Uniform,
    /// Laplace with scale `1/√2`.
    ExpSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// `N(0, I_d)` against `N(δ e₁, I_d)`.
    MeanShift { dim: usize, delta: f64 },
    /// `N(0, I_d)` against `N(0, diag(r, 1, …, 1))`.
    VarShift { dim: usize, var_ratio: f64 },
    /// `N(0, 1)` against the density `∝ φ(x)(1 + sin(ν x))`.
    SinePerturb { freq: f64 },
    /// Two i.i.d. sources rotated by `angle`, padded with Gaussian noise and
    /// mixed by independent random orthogonal maps.
    RotatedPair {
        angle: f64,
        extra_dims: usize,
        marginal: Marginal,
    },
    /// Density `∝ 1 + sin(ℓx) sin(ℓy)` on `[−π, π]²`.
    SineDependence { freq: u32 },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MeanShift { .. } => "mean",
            Self::VarShift { .. } => "var",
            Self::SinePerturb { .. } => "sine",
            Self::RotatedPair { .. } => "rotation",
            Self::SineDependence { .. } => "sine-dep",
        }
    }

    /// The parameter that controls difficulty.
    pub fn difficulty(&self) -> f64 {
        match *self {
            Self::MeanShift { delta, .. } => delta,
            Self::VarShift { var_ratio, .. } => var_ratio,
            Self::SinePerturb { freq } => freq,
            Self::RotatedPair { angle, .. } => angle,
            Self::SineDependence { freq } => f64::from(freq),
        }
    }

    pub fn is_two_sample(&self) -> bool {
        matches!(
            self,
            Self::MeanShift { .. } | Self::VarShift { .. } | Self::SinePerturb { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub family: Scenario,
    /// Observations per sample.
    pub m: usize,
}

impl ScenarioSpec {
    pub fn new(family: Scenario, m: usize) -> Self {
        Self { family, m }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return invalid(format!("sample size must be at least 2, got {}", self.m));
        }
        match self.family {
            Scenario::MeanShift { dim, delta } => {
                if dim == 0 || !delta.is_finite() {
                    return invalid("mean shift needs d >= 1 and a finite shift");
                }
            }
            Scenario::VarShift { dim, var_ratio } => {
                if dim == 0 || !(var_ratio > 0.0 && var_ratio.is_finite()) {
                    return invalid("variance shift needs d >= 1 and a positive variance ratio");
                }
            }
            Scenario::SinePerturb { freq } => {
                if !freq.is_finite() {
                    return invalid("sine perturbation frequency must be finite");
                }
            }
            Scenario::RotatedPair { angle, .. } => {
                if !(0.0..=PI / 4.0).contains(&angle) {
                    return invalid(format!("rotation angle {angle} is outside [0, pi/4]"));
                }
            }
            Scenario::SineDependence { freq } => {
                if freq == 0 {
                    return invalid("sine dependence frequency must be at least 1");
                }
            }
        }
        Ok(())
    }
}

fn to_sample<T: Real>(rows: usize, dim: usize, data: Vec<f64>) -> Result<SampleMatrix<T>> {
    SampleMatrix::from_vec(rows, dim, data.into_iter().map(T::from_f64_lossy).collect())
}

/// Samples `z ~ P` and `w ~ Q` of the two-sample scenario, `m` rows each.
pub fn gen_two_sample<T: Real>(
    spec: &ScenarioSpec,
    rng: RngSpec,
) -> Result<(SampleMatrix<T>, SampleMatrix<T>)> {
    spec.validate()?;
    let mut gen = rng.rng();
    let m = spec.m;
    match spec.family {
        Scenario::MeanShift { dim, delta } => {
            let z = gaussian_block(&mut gen, m, dim);
            let mut w = gaussian_block(&mut gen, m, dim);
            for row in w.chunks_exact_mut(dim) {
                row[0] += delta;
            }
            Ok((to_sample(m, dim, z)?, to_sample(m, dim, w)?))
        }
        Scenario::VarShift { dim, var_ratio } => {
            let z = gaussian_block(&mut gen, m, dim);
            let mut w = gaussian_block(&mut gen, m, dim);
            let sd = var_ratio.sqrt();
            for row in w.chunks_exact_mut(dim) {
                row[0] *= sd;
            }
            Ok((to_sample(m, dim, z)?, to_sample(m, dim, w)?))
        }
        Scenario::SinePerturb { freq } => {
            let z = gaussian_block(&mut gen, m, 1);
            let (w, _) = sample_sine_perturbed(freq, m, &mut gen);
            Ok((to_sample(m, 1, z)?, to_sample(m, 1, w)?))
        }
        _ => invalid(format!(
            "scenario '{}' is an independence benchmark",
            spec.family.name()
        )),
    }
}

/// Paired sample of the independence scenario.
pub fn gen_dependence<T: Real>(spec: &ScenarioSpec, rng: RngSpec) -> Result<PairedSample<T>> {
    spec.validate()?;
    let mut gen = rng.rng();
    let m = spec.m;
    match spec.family {
        Scenario::RotatedPair {
            angle,
            extra_dims,
            marginal,
        } => {
            let dim = 1 + extra_dims;
            let qx = orthogonal_from(&mut gen, dim);
            let qy = orthogonal_from(&mut gen, dim);
            let (c, s) = (angle.cos(), angle.sin());
            let mut xs = Vec::with_capacity(m * dim);
            let mut ys = Vec::with_capacity(m * dim);
            let mut raw_x = vec![0.0; dim];
            let mut raw_y = vec![0.0; dim];
            for _ in 0..m {
                let s1 = source(&mut gen, marginal);
                let s2 = source(&mut gen, marginal);
                raw_x[0] = c * s1 - s * s2;
                raw_y[0] = s * s1 + c * s2;
                for v in &mut raw_x[1..] {
                    *v = gen.standard_normal();
                }
                for v in &mut raw_y[1..] {
                    *v = gen.standard_normal();
                }
                xs.extend(mat_vec(&qx, &raw_x));
                ys.extend(mat_vec(&qy, &raw_y));
            }
            PairedSample::new(to_sample(m, dim, xs)?, to_sample(m, dim, ys)?)
        }
        Scenario::SineDependence { freq } => {
            let (pairs, _) = sample_sine_dependence(freq, m, &mut gen);
            let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            PairedSample::new(to_sample(m, 1, xs)?, to_sample(m, 1, ys)?)
        }
        _ => invalid(format!(
            "scenario '{}' is a two-sample benchmark",
            spec.family.name()
        )),
    }
}

fn gaussian_block(gen: &mut StreamRng, rows: usize, dim: usize) -> Vec<f64> {
    (0..rows * dim).map(|_| gen.standard_normal()).collect()
}

fn source(gen: &mut StreamRng, marginal: Marginal) -> f64 {
    match marginal {
        Marginal::Uniform => gen.uniform_range(-(3f64.sqrt()), 3f64.sqrt()),
        Marginal::ExpSymmetric => {
            let magnitude = -(1.0 - gen.uniform()).ln() / 2f64.sqrt();
            if gen.uniform() < 0.5 {
                -magnitude
            } else {
                magnitude
            }
        }
    }
}

/// Rejection sampler for `∝ φ(x)(1 + sin(ν x))` with proposal `φ` and
/// acceptance probability `(1 + sin(ν x)) / 2`. Returns the draws and the
/// number of proposals made.
pub fn sample_sine_perturbed(freq: f64, count: usize, gen: &mut StreamRng) -> (Vec<f64>, usize) {
    let mut out = Vec::with_capacity(count);
    let mut proposals = 0;
    while out.len() < count {
        let x = gen.standard_normal();
        proposals += 1;
        if gen.uniform() < 0.5 * (1.0 + (freq * x).sin()) {
            out.push(x);
        }
    }
    (out, proposals)
}

/// Rejection sampler for `∝ 1 + sin(ℓx) sin(ℓy)` on `[−π, π]²` with a uniform
/// proposal. Returns the draws and the number of proposals made.
pub fn sample_sine_dependence(freq: u32, count: usize, gen: &mut StreamRng) -> (Vec<(f64, f64)>, usize) {
    let l = f64::from(freq);
    let mut out = Vec::with_capacity(count);
    let mut proposals = 0;
    while out.len() < count {
        let x = gen.uniform_range(-PI, PI);
        let y = gen.uniform_range(-PI, PI);
        proposals += 1;
        if gen.uniform() < 0.5 * (1.0 + (l * x).sin() * (l * y).sin()) {
            out.push((x, y));
        }
    }
    (out, proposals)
}

/// Haar-distributed orthogonal matrix, returned as rows.
///
/// Gram–Schmidt (applied twice per column) on a standard Gaussian matrix; the
/// triangular factor then has a positive diagonal, which makes the result
/// Haar.
pub fn random_orthogonal<T: Real>(dim: usize, rng: RngSpec) -> Result<Vec<Vec<T>>> {
    if dim == 0 {
        return invalid("orthogonal matrix dimension must be at least 1");
    }
    let q = orthogonal_from(&mut rng.rng(), dim);
    Ok(q.chunks_exact(dim)
        .map(|r| r.iter().copied().map(T::from_f64_lossy).collect())
        .collect())
}

/// Row-major orthogonal matrix.
fn orthogonal_from(gen: &mut StreamRng, dim: usize) -> Vec<f64> {
    // columns[c] is column c of the Gaussian matrix, orthonormalised in place.
    let mut columns: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gen.standard_normal()).collect())
        .collect();
    for c in 0..dim {
        for _pass in 0..2 {
            for p in 0..c {
                let (done, rest) = columns.split_at_mut(c);
                let proj: f64 = done[p].iter().zip(&rest[0]).map(|(a, b)| a * b).sum();
                for (v, q) in rest[0].iter_mut().zip(&done[p]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = columns[c].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut columns[c] {
            *v /= norm;
        }
    }
    let mut rows = vec![0.0; dim * dim];
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            rows[r * dim + c] = v;
        }
    }
    rows
}

fn mat_vec(q: &[f64], v: &[f64]) -> Vec<f64> {
    q.chunks_exact(v.len())
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}
