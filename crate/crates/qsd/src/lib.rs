//! Quaternion self-dual Hermitian random matrices and their spectral
//! statistics.
//!
//! The crate builds `n x n` matrices with quaternion entries satisfying the
//! self-dual constraint `x_jk = conj(x_kj)`, expands them to their `2n x 2n`
//! complex Hermitian images, and measures how fast the empirical spectral
//! distribution approaches the semicircular law:
//!
//! - [`quaternion`]: exact quaternion arithmetic and the 2x2 complex block
//!   bijection,
//! - [`ensemble`]: entry laws (GSE, bounded discrete, heavy tail), sampling,
//!   and the truncation/standardization pipeline,
//! - [`spectra`]: Hermitian expansion, a values-only eigensolver, step CDFs,
//!   Kolmogorov and Levy distances,
//! - [`stieltjes`]: the semicircular law in closed form, empirical Stieltjes
//!   transforms, the Bai Kolmogorov-distance bound, and the delta diagnostic,
//! - [`resolvent`]: resolvents, quaternion minors, epsilon_k diagnostics, and
//!   the Type-I/Type-II structural classifiers,
//! - [`experiments`]: config-driven Monte Carlo sweeps, rate fitting, and
//!   machine-readable reports.

pub mod ensemble;
pub mod experiments;
pub mod linalg;
pub mod quadrature;
pub mod quaternion;
pub mod resolvent;
pub mod rng;
pub mod spectra;
pub mod stieltjes;

pub use quaternion::{ComplexBlock2, Quaternion};
