//! Confounding-robust independent component analysis.
//!
//! This crate estimates a linear unmixing of multivariate signals that is
//! robust against additive noise whose covariance structure is stationary
//! within known groups of samples. The estimator jointly diagonalizes
//! differences of empirical (auto-)covariance matrices computed on subgroups
//! of each group, so that within-group stationary confounding cancels.
//!
//! Alongside the main estimator the crate ships the second-order baselines it
//! is usually compared against (blockwise covariance ICA, SOBI, random
//! projections), ground-truth and ground-truth-free quality scores, seeded
//! simulation generators, and a small structural-VAR pipeline for bivariate
//! causal effect estimation.
//!
//! The crate is `no_std` (requires `alloc`); all I/O lives in the companion
//! CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod causal;
pub mod covstats;
pub mod error;
pub mod jointdiag;
pub mod metrics;
pub mod rng;
pub mod separation;
pub mod simgen;

pub use covstats::{GroupedPartition, MatrixSet, SignalMatrix, Strategy};
pub use error::{Error, Result};
pub use jointdiag::{Diagonalizer, DiagonalizerOptions, InitStrategy};
pub use separation::{PartitionPolicy, SeparationConfig, SeparationModel, SignalKind};
