//! Distance-based and kernel-based two-sample and independence testing.
//!
//! Energy distance and distance covariance are computed from semimetric Gram
//! matrices; MMD and HSIC from kernel Gram matrices. For a kernel that
//! generates the semimetric, `energy = 2 · MMD²` and `dCov² = 4 · HSIC`.
//! Tests are calibrated by the spectrum of centred Gram matrices, by random
//! relabelling, or by a conservative quadratic-form bound.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

pub mod datagen;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod numerics;
pub mod sample;
pub mod scalar;
pub mod testing;

pub use error::{Error, Result};
pub use kernels::{Bandwidth, Center, GramMatrix, KernelSpec, SemimetricSpec};
pub use numerics::{EigenResult, RngSpec, SymMatrix};
pub use sample::{PairedSample, SampleMatrix};
pub use scalar::Real;
pub use testing::{MethodDetails, NullMethod, NullSpec, TestResult};

pub type SampleMatrix64 = SampleMatrix<f64>;
pub type SampleMatrix32 = SampleMatrix<f32>;
pub type PairedSample64 = PairedSample<f64>;
pub type PairedSample32 = PairedSample<f32>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type KernelSpec32 = KernelSpec<f32>;
pub type SemimetricSpec64 = SemimetricSpec<f64>;
pub type SemimetricSpec32 = SemimetricSpec<f32>;
pub type SymMatrix64 = SymMatrix<f64>;
pub type SymMatrix32 = SymMatrix<f32>;
pub type TestResult64 = TestResult<f64>;
pub type TestResult32 = TestResult<f32>;
