//! Geometry and propagation of the circular interference model.

mod law;
mod scenario;

pub use law::{path_loss, FadingLaw, PathLossLaw};
pub use scenario::{aggregate_terms, node_geometry, raw_terms, rx_gamma_term, Circle, CircularScenario, NodeRef};
