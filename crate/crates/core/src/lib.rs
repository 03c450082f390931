//! System-level Monte Carlo simulator for sub-THz urban-microcell coverage.
//!
//! Single-cell and seven-cell lamppost deployments are simulated in downlink
//! and uplink using the close-in (CI) path loss model with log-normal
//! shadowing, a squared distance-based LOS probability, and Shannon spectral
//! efficiency of the per-UE SINR.
//!
//! ```
//! use thzcov::{run_scenario, Direction, ScenarioConfig};
//!
//! let cfg = ScenarioConfig { ue_count: 50, ..ScenarioConfig::table1_single() };
//! let run = run_scenario(&cfg).unwrap();
//! let dl = run.summary(Direction::Dl);
//! assert!(dl.edge_se_bps_hz <= dl.median_se_bps_hz);
//! ```

pub mod channel;
pub mod config;
pub mod deployment;
pub mod error;
pub mod io;
pub mod link_budget;
pub mod rng;
pub mod simulation;
pub mod stats;

pub use channel::{
    ci_mean_path_loss, fspl_1m, los_probability, sample_los_state, sample_shadow_fading,
    LinkRealization, LosModelParams, PathLossParams,
};
pub use config::{AssociationPolicy, Direction, Preset, ScenarioConfig};
pub use deployment::{
    drop_ues, link_geometry, make_layout, CellLayout, LayoutKind, Position, UeDrop,
};
pub use error::{Error, Result};
pub use link_budget::{
    noise_power_dbm, received_power_dbm, sinr_db, LinkBudgetResult, RadioEndpoint,
};
pub use rng::RngPolicy;
pub use simulation::{
    associate, coverage_map, evaluate_ue, realize_links, run_scenario, CoverageMap, MapEvaluator,
    MapMode, ScenarioRun, UeOutcome,
};
pub use stats::{build_cdf, spectral_efficiency, summarize, Cdf, SeSummary};
