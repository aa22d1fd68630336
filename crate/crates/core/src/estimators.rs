//! Biased (V-statistic) estimators of energy distance, MMD, distance
//! covariance, HSIC and distance correlation.
//!
//! The distance statistics are computed from semimetric Gram matrices and the
//! RKHS statistics from kernel Gram matrices. Neither is defined through the
//! other; with a kernel generating `ρ`,
//! `energy = 2 · MMD²` and `dCov² = 4 · HSIC` hold up to rounding.

use crate::error::{invalid, Result};
use crate::kernels::{sym_gram, KernelSpec, PairwiseFn, SemimetricSpec};
use crate::numerics::{center_gram, CompensatedSum, SymMatrix};
use crate::sample::{PairedSample, SampleMatrix};
use crate::scalar::Real;

/// Sums of a pooled Gram matrix over the three sample blocks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockSums<T> {
    pub within_first: T,
    pub within_second: T,
    pub cross: T,
    pub first: usize,
    pub second: usize,
}

/// Block sums of `g − pivot` where `in_first[i]` labels row `i`.
///
/// The pivot cancels in every statistic built from these sums; subtracting it
/// makes a constant Gram matrix contribute exact zeros.
pub(crate) fn block_sums<T: Real>(g: &SymMatrix<T>, in_first: &[bool], pivot: T) -> BlockSums<T> {
    let n = g.n();
    debug_assert_eq!(in_first.len(), n);
    let mut ff = CompensatedSum::new();
    let mut ss = CompensatedSum::new();
    let mut fs = CompensatedSum::new();
    for i in 0..n {
        let row = g.row(i);
        let fi = in_first[i];
        for (j, &v) in row.iter().enumerate() {
            let d = v - pivot;
            match (fi, in_first[j]) {
                (true, true) => ff.add(d),
                (false, false) => ss.add(d),
                (true, false) => fs.add(d),
                (false, true) => {}
            }
        }
    }
    let first = in_first.iter().filter(|&&b| b).count();
    BlockSums {
        within_first: ff.value(),
        within_second: ss.value(),
        cross: fs.value(),
        first,
        second: n - first,
    }
}

impl<T: Real> BlockSums<T> {
    /// `mean_ff + mean_ss − 2 mean_fs`.
    pub(crate) fn mmd(&self) -> T {
        let m = T::from_usize_lossy(self.first);
        let n = T::from_usize_lossy(self.second);
        self.within_first / (m * m) + self.within_second / (n * n)
            - (self.cross + self.cross) / (m * n)
    }
}

pub(crate) fn labels(first: usize, second: usize) -> Vec<bool> {
    let mut v = vec![true; first];
    v.resize(first + second, false);
    v
}

fn check_two_samples<T: Real>(z: &SampleMatrix<T>, w: &SampleMatrix<T>) -> Result<()> {
    if z.is_empty() || w.is_empty() {
        return invalid("both samples must be nonempty");
    }
    if z.dim() != w.dim() {
        return invalid(format!(
            "samples have dimensions {} and {}",
            z.dim(),
            w.dim()
        ));
    }
    Ok(())
}

/// Resolves `f` on the pooled rows and returns the pooled Gram matrix.
fn pooled_gram<T: Real, F: PairwiseFn<T>>(
    f: &F,
    z: &SampleMatrix<T>,
    w: &SampleMatrix<T>,
) -> Result<SymMatrix<T>> {
    let pooled = z.concat_rows(w)?;
    let f = f.resolve(&pooled)?;
    sym_gram(&f, &pooled)
}

/// `2 E ρ(Z,W) − E ρ(Z,Z') − E ρ(W,W')` with empirical means over all pairs,
/// diagonal included.
pub fn energy_distance_vstat<T: Real>(
    rho: &SemimetricSpec<T>,
    z: &SampleMatrix<T>,
    w: &SampleMatrix<T>,
) -> Result<T> {
    rho.validate()?;
    check_two_samples(z, w)?;
    let g = pooled_gram(rho, z, w)?;
    let s = block_sums(&g, &labels(z.rows(), w.rows()), T::zero());
    let m = T::from_usize_lossy(s.first);
    let n = T::from_usize_lossy(s.second);
    Ok((s.cross + s.cross) / (m * n) - s.within_first / (m * m) - s.within_second / (n * n))
}

/// Squared MMD, V-statistic:
/// `(1/m²) ΣΣ k(z_i,z_j) + (1/n²) ΣΣ k(w_i,w_j) − (2/mn) ΣΣ k(z_i,w_j)`.
pub fn mmd_vstat<T: Real>(k: &KernelSpec<T>, z: &SampleMatrix<T>, w: &SampleMatrix<T>) -> Result<T> {
    k.validate()?;
    check_two_samples(z, w)?;
    let g = pooled_gram(k, z, w)?;
    Ok(block_sums(&g, &labels(z.rows(), w.rows()), g.get(0, 0)).mmd())
}

/// Squared MMD from an already-computed pooled Gram matrix.
pub fn mmd_from_pooled_gram<T: Real>(g: &SymMatrix<T>, in_first: &[bool]) -> Result<T> {
    if in_first.len() != g.n() {
        return invalid(format!(
            "{} labels for a {}x{} Gram matrix",
            in_first.len(),
            g.n(),
            g.n()
        ));
    }
    let s = block_sums(g, in_first, g.get(0, 0));
    if s.first == 0 || s.second == 0 {
        return invalid("both samples must be nonempty");
    }
    Ok(s.mmd())
}

/// Empirical generalized distance covariance:
/// `E ρ_X ρ_Y + E ρ_X · E ρ_Y − 2 E[ρ_X(X,X') ρ_Y(Y,Y'')]` over the joint sample.
pub fn dcov_vstat<T: Real>(
    rho_x: &SemimetricSpec<T>,
    rho_y: &SemimetricSpec<T>,
    s: &PairedSample<T>,
) -> Result<T> {
    rho_x.validate()?;
    rho_y.validate()?;
    let a = sym_gram(&rho_x.resolve(s.x())?, s.x())?;
    let b = sym_gram(&rho_y.resolve(s.y())?, s.y())?;
    let m = s.len();
    let mf = T::from_usize_lossy(m);

    let mut joint = CompensatedSum::new();
    let mut sum_a = CompensatedSum::new();
    let mut sum_b = CompensatedSum::new();
    let mut rows = CompensatedSum::new();
    for i in 0..m {
        let (ra, rb) = (a.row(i), b.row(i));
        let mut row_a = CompensatedSum::new();
        let mut row_b = CompensatedSum::new();
        for j in 0..m {
            joint.add(ra[j] * rb[j]);
            row_a.add(ra[j]);
            row_b.add(rb[j]);
        }
        let (row_a, row_b) = (row_a.value(), row_b.value());
        sum_a.add(row_a);
        sum_b.add(row_b);
        rows.add(row_a * row_b);
    }
    let m2 = mf * mf;
    let term_joint = joint.value() / m2;
    let term_marginal = (sum_a.value() / m2) * (sum_b.value() / m2);
    let term_cross = (rows.value() + rows.value()) / (m2 * mf);
    Ok(term_joint + term_marginal - term_cross)
}

/// `(1/m²) Tr(K_X H K_Y H)`.
pub fn hsic_vstat<T: Real>(kx: &KernelSpec<T>, ky: &KernelSpec<T>, s: &PairedSample<T>) -> Result<T> {
    let (cx, cy) = centered_grams(kx, ky, s)?;
    Ok(hsic_from_centered(&cx, &cy))
}

/// Centred Gram matrices `H K_X H` and `H K_Y H` with bandwidths resolved per block.
pub fn centered_grams<T: Real>(
    kx: &KernelSpec<T>,
    ky: &KernelSpec<T>,
    s: &PairedSample<T>,
) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    kx.validate()?;
    ky.validate()?;
    let gx = sym_gram(&kx.resolve(s.x())?, s.x())?;
    let gy = sym_gram(&ky.resolve(s.y())?, s.y())?;
    Ok((center_gram(&gx), center_gram(&gy)))
}

pub(crate) fn hsic_from_centered<T: Real>(cx: &SymMatrix<T>, cy: &SymMatrix<T>) -> T {
    let m = T::from_usize_lossy(cx.n());
    cx.frobenius_inner(cy) / (m * m)
}

const DCOR_DEGENERATE: f64 = 1e-14;

/// Distance correlation in kernel form,
/// `HSIC(x,y) / sqrt(HSIC(x,x) · HSIC(y,y))`, defined as 0 when either
/// self-term vanishes.
pub fn dcor_vstat<T: Real>(kx: &KernelSpec<T>, ky: &KernelSpec<T>, s: &PairedSample<T>) -> Result<T> {
    let (cx, cy) = centered_grams(kx, ky, s)?;
    let hxy = hsic_from_centered(&cx, &cy);
    let hxx = hsic_from_centered(&cx, &cx);
    let hyy = hsic_from_centered(&cy, &cy);
    let floor = T::from_f64_lossy(DCOR_DEGENERATE);
    if hxx > floor && hyy > floor {
        Ok(hxy.max(T::zero()) / (hxx * hyy).sqrt())
    } else {
        Ok(T::zero())
    }
}
