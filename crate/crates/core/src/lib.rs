//! Minkowski-sum volume laboratory.
//!
//! Computes k-fold Minkowski sums `A[k] = A + ... + A` of compact sets in
//! small dimension and produces certified bounds for `vol(A[k] / k)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`combinatorics`]: exact layer counts, corner volumes and stability
//!   constants over big rationals.
//! - [`geometry`]: spiders, zonotopes, support oracles and Gilbert distance.
//! - [`grid`]: binary voxel sets with inner/outer semantics, dilation,
//!   distance transforms and Hausdorff distance.
//! - [`lab`]: monotonicity audits and the grid verifiers built on top.
//! - [`counterexamples`]: exact box-union volumes and measure checks.
//! - [`spec`]: the JSON set-spec format and run configuration.

pub mod combinatorics;
pub mod counterexamples;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lab;
pub mod par;
pub mod rational;
pub mod spec;

pub use error::{Error, Result};
pub use rational::Rational;
