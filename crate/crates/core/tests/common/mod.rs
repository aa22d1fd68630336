//! Test helpers: random inputs and brute-force oracles that do not share any
//! code path with the library's estimators.
#![allow(dead_code)]

use distkern::numerics::{RngSpec, StreamRng};
use distkern::{PairedSample, SampleMatrix};

pub fn gaussian_sample(rng: &mut StreamRng, rows: usize, dim: usize) -> SampleMatrix<f64> {
    let data = (0..rows * dim).map(|_| rng.standard_normal()).collect();
    SampleMatrix::from_vec(rows, dim, data).unwrap()
}

pub fn gaussian_pair(rng: &mut StreamRng, rows: usize, dx: usize, dy: usize) -> PairedSample<f64> {
    let x = gaussian_sample(rng, rows, dx);
    let y = gaussian_sample(rng, rows, dy);
    PairedSample::new(x, y).unwrap()
}

/// Integer in `lo..=hi`.
pub fn int_in(rng: &mut StreamRng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

pub fn random_point(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| 2.0 * rng.standard_normal()).collect()
}

pub fn rng(seed: u64) -> StreamRng {
    RngSpec::new(seed, 0xACCE).rng()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|u| u * u).sum::<f64>().sqrt()
}

/// `½(‖z − c‖^q + ‖z' − c‖^q − ‖z − z'‖^q)`.
pub fn distance_kernel(q: f64, c: &[f64], a: &[f64], b: &[f64]) -> f64 {
    0.5 * (dist(a, c).powf(q) + dist(b, c).powf(q) - dist(a, b).powf(q))
}

pub fn gaussian_kernel(sigma: f64, a: &[f64], b: &[f64]) -> f64 {
    (-dist(a, b).powi(2) / (2.0 * sigma * sigma)).exp()
}

/// Naive three-double-sum MMD².
pub fn mmd_oracle(k: impl Fn(&[f64], &[f64]) -> f64, z: &SampleMatrix<f64>, w: &SampleMatrix<f64>) -> f64 {
    let (m, n) = (z.rows() as f64, w.rows() as f64);
    let mut zz = 0.0;
    for a in z.iter_rows() {
        for b in z.iter_rows() {
            zz += k(a, b);
        }
    }
    let mut ww = 0.0;
    for a in w.iter_rows() {
        for b in w.iter_rows() {
            ww += k(a, b);
        }
    }
    let mut zw = 0.0;
    for a in z.iter_rows() {
        for b in w.iter_rows() {
            zw += k(a, b);
        }
    }
    zz / (m * m) + ww / (n * n) - 2.0 * zw / (m * n)
}

/// Naive energy distance with `ρ = ‖·‖^q`.
pub fn energy_oracle(q: f64, z: &SampleMatrix<f64>, w: &SampleMatrix<f64>) -> f64 {
    let rho = |a: &[f64], b: &[f64]| dist(a, b).powf(q);
    -mmd_oracle(rho, z, w)
}

/// HSIC from its three-term expansion, each expectation a literal loop nest.
pub fn hsic_oracle(
    kx: impl Fn(&[f64], &[f64]) -> f64,
    ky: impl Fn(&[f64], &[f64]) -> f64,
    s: &PairedSample<f64>,
) -> f64 {
    let m = s.len();
    let mf = m as f64;
    let (x, y) = (s.x(), s.y());
    let mut joint = 0.0;
    for i in 0..m {
        for j in 0..m {
            joint += kx(x.row(i), x.row(j)) * ky(y.row(i), y.row(j));
        }
    }
    let mut marginal = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    marginal += kx(x.row(i), x.row(j)) * ky(y.row(k), y.row(l));
                }
            }
        }
    }
    let mut cross = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                cross += kx(x.row(i), x.row(j)) * ky(y.row(i), y.row(k));
            }
        }
    }
    joint / (mf * mf) + marginal / mf.powi(4) - 2.0 * cross / mf.powi(3)
}

/// Distance covariance from the same expansion with semimetrics.
pub fn dcov_oracle(qx: f64, qy: f64, s: &PairedSample<f64>) -> f64 {
    let rx = |a: &[f64], b: &[f64]| dist(a, b).powf(qx);
    let ry = |a: &[f64], b: &[f64]| dist(a, b).powf(qy);
    hsic_oracle(rx, ry, s)
}

/// `Φ(x)` by composite Simpson quadrature of the standard normal density.
pub fn normal_cdf(x: f64) -> f64 {
    let steps = 20_000;
    let h = x / steps as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = phi(0.0) + phi(x);
    for i in 1..steps {
        let t = i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(t);
    }
    0.5 + acc * h / 3.0
}

/// `Φ⁻¹(p)` by bisection on [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn lu_determinant(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x -= f * y;
            }
        }
    }
    det
}
