//! Circular interference model for cellular downlinks.
//!
//! Arbitrary interferer deployments are condensed onto concentric circles of
//! equidistant nodes with angle-dependent power profiles. With integer-shape
//! Gamma fading, the aggregate signal and interference at any user position
//! then have exact finite-sum densities, from which SIR and rate
//! distributions follow in closed form.
//!
//! * [`gamma`]: exact densities of sums of Gamma variables and a sampling oracle.
//! * [`circular`]: geometry, path loss and Gamma term assembly for the model.
//! * [`deployment`]: PPP and hexagonal deployments and the mapping onto circles.
//! * [`link`]: KS validation, collaboration schemes, SIR and rate statistics.
//! * [`experiments`]: batch studies with CSV/JSON output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circular;
pub mod deployment;
pub mod error;
pub mod experiments;
pub mod gamma;
pub mod link;
pub mod precision;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
