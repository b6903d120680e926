//! Deployments of base stations and their condensation onto circles.

mod generate;
mod mapping;
mod oracle;
mod station;

pub use generate::{hex_grid, sample_ppp, sample_tiers};
pub use mapping::{
    map_deployment, profile_csv, profile_papr, recommend_parameters, stations_from_scenario, Mapping, Recommendation,
};
pub use oracle::mc_interference_original;
pub use station::{mean_rx_at_origin, Annulus, BaseStation, Deployment, DeploymentMeta, PppTierConfig};
