//! Phase-space laboratory for fractional anharmonic oscillators.
//!
//! The crate discretizes `H = (-Δ)^l + V(x)` on a periodic staggered grid,
//! builds its eigendecomposition, and evaluates functions of the operator
//! (fractional powers, heat semigroups, projections). Weighted modulation
//! norms are computed from a sampled short-time Fourier transform, and the
//! estimator, nonlinear-heat and Ornstein–Uhlenbeck modules build
//! numerical experiments on top of those primitives.

pub mod calculus;
pub mod error;
pub mod estimators;
pub mod model;
pub mod nlheat;
pub mod numerics;
pub mod ougauss;
pub mod phasespace;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{Exponent, MixedNormParams, OscillatorSpec, PotentialSpec, WeightSpec};
pub use num_complex::Complex64;
pub use spectral::{FieldSample, Grid, SpectralDecomposition};
