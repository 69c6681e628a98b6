//! Simulation and exact evaluation toolkit for a system of ordered particles
//! interacting with a wall at the origin (left jumps blocked by the lower
//! neighbour, right jumps pushing the upper neighbour), together with its
//! antisymmetric random-matrix counterpart.
//!
//! The crate has three layers:
//!
//! * samplers: [`dynamics`] (the particle system), [`matrixmodel`] (sums of
//!   rank-two antisymmetric Gaussian increments and their spectra),
//!   [`gtpattern`] (uniform sampling of interlaced triangular arrays);
//! * closed forms: [`kernels`] (bilateral-exponential transition densities,
//!   determinantal transition kernels, normalizing constants, distribution
//!   formulas);
//! * verification: [`stats`] and [`verify`] (two-sample tests, quadrature
//!   identities, and a reporting harness that cross-checks the samplers
//!   against the closed forms).
//!
//! All randomness flows through the counter-based [`rng::NoiseStream`], so
//! every sampler is a deterministic function of `(seed, stream)` and Monte
//! Carlo runs parallelize without changing results.
//!
//! Core numeric code is generic over the scalar type through the [`Real`]
//! trait; `f64` aliases for the main types are exported at the crate root.

pub mod dynamics;
pub mod error;
pub mod gtpattern;
pub mod kernels;
pub mod linalg;
pub mod matrixmodel;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use rng::NoiseStream;
pub use scalar::Real;

/// Ordered particle configuration over `f64`.
pub type ParticleState64 = dynamics::ParticleState<f64>;
/// Ordered particle configuration over `f32`.
pub type ParticleState32 = dynamics::ParticleState<f32>;
/// Antisymmetric matrix over `f64`.
pub type AntisymMatrix64 = matrixmodel::AntisymMatrix<f64>;
/// Antisymmetric matrix over `f32`.
pub type AntisymMatrix32 = matrixmodel::AntisymMatrix<f32>;
/// Nonincreasing nonnegative spectrum over `f64`.
pub type SpectralPoint64 = matrixmodel::SpectralPoint<f64>;
/// Interlaced triangular array over `f64`.
pub type GtPattern64 = gtpattern::GtPattern<f64>;
/// Dense kernel matrix over `f64`.
pub type KernelMatrix64 = linalg::Mat<f64>;
/// Dense kernel matrix over `f32`.
pub type KernelMatrix32 = linalg::Mat<f32>;
