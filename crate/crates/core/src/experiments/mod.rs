//! Batch studies: configuration, runners and tabular output.

mod config;
mod runners;
mod table;

pub use config::{
    reference_scenario, unit_grid, CollaborationStudy, ExperimentConfig, OverlayTier, PaprStudy, PppStudy,
    DESK_SAMPLES, DESK_SNAPSHOTS, PAPER_SAMPLES, PAPER_SNAPSHOTS,
};
pub use runners::{
    collaboration_curves, collaboration_sir, decomposition_curves, interference_components, log_grid, mapped_ks,
    run_collaboration, run_ks_sweep, run_papr, run_single_circle_decomposition, sets_sir, single_circle, truncated,
    truncation_l1,
};
pub use table::{mean_ci, median, ResultRow, ResultTable, RunMeta, VERSION};
