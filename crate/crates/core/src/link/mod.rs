//! Validation statistics, collaboration schemes, and SIR/rate distributions.

mod collab;
mod curve;
mod ks;
mod sir;

pub use collab::{collaboration_sets, collaborators, CollaborationScheme};
pub use curve::{curve_csv, scenario_hash, CurveMeta};
pub use ks::{ks_critical_value, ks_distance, ks_distance_monotone, ks_two_sample, EmpiricalCdf};
pub use sir::{
    distribution_median, distribution_quantile, link_densities, mc_sir_samples, rate_pdf, scheme_sir, sir_pdf,
    RateDensity, SirDensity,
};
