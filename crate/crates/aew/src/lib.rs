//! Aggregation of binary classifiers with exponential weights, together with
//! the risk machinery needed to study it: empirical and exact hinge/zero-one
//! risks, margin (low-noise) diagnostics for finite distributions, local
//! polynomial plug-in rules, a split-validate-aggregate pipeline that adapts
//! over a smoothness grid, and a Monte Carlo harness for convergence-rate
//! experiments.
//!
//! Conventions used throughout:
//!
//! * labels take values in {-1, +1}, features live in R^d,
//! * `sign(0) = +1` wherever a score is turned into a label,
//! * logarithms are natural,
//! * score functions are clipped to [-1, 1] before aggregation (clipping
//!   never increases hinge risk, so bounds stated for clipped members carry
//!   over).

pub mod adaptive;
pub mod aggregation;
pub mod config;
pub mod data;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod plugin;
pub mod risk;
pub mod score;
pub mod seeding;

pub use error::{Error, Result};
