//! Simulation and numerical oracles for the largest nearest-neighbor link
//! `d_n` of points drawn from `f(x) = A_d exp(-λ‖x‖^α)` on `R^d`.
//!
//! - [`model`]: parameters, normalizing constants, scaling sequences.
//! - [`sampler`]: reproducible binomial and Poissonized point clouds.
//! - [`geometry`]: kd-tree nearest neighbors, `d_n`, isolated-vertex counts.
//! - [`quadrature`]: ball measure, its sandwich bounds, Palm integrals.
//! - [`experiments`]: Monte Carlo harness, statistics, record/summary I/O.

// NaN must fail validation, so `!(x > 0.0)` is deliberate throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod quadrature;
pub mod sampler;

pub use error::{Error, Result};
pub use model::{ModelParams, ScalingConstants};
pub use sampler::{PointCloud, SamplingMode};
