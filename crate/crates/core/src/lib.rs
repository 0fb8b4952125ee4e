//! Differentially private synthetic data for finite categorical domains.
//!
//! The pipeline perturbs the linear statistics of the true data with Laplace noise, fits a
//! density on a random reduced domain by a min-max linear program, and bootstraps synthetic
//! records from that density. The [`audit`] module checks the privacy and accuracy
//! guarantees empirically.

pub mod audit;
pub mod data;
pub mod distributions;
mod error;
pub mod mechanism;
pub mod optimize;
pub mod queries;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
