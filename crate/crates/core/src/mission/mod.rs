//! Mission runner: the simulate → reconstruct → plan loop, offline replay,
//! batches and artifact output.

mod batch;
mod estimator;
mod metrics;
mod output;
mod run;

pub use batch::{active_faster, aggregate, batch, strategy_name, AggregateRow, BatchReport, RunSummary};
pub use estimator::Estimator;
pub use metrics::{
    metrics_header, metrics_row, metrics_to_csv, parse_metrics, source_estimates, time_to_all_localized, MetricsRow,
    METRICS_SCHEMA,
};
pub use output::{run_header, write_outputs, MissionReport};
pub use run::{replay, simulate, CycleInfo, MissionOutcome, PLAN_HEADER};

use std::path::Path;

use crate::config::MissionConfig;
use crate::error::Result;
use crate::sim::log::{read_cones, read_viewpoints};

/// Simulated mission with all artifacts written to `out_dir`. Relative
/// paths in the configuration resolve against `base_dir`.
pub fn run_mission(cfg: &MissionConfig, base_dir: &Path, out_dir: &Path) -> Result<MissionReport> {
    let table = cfg.load_table(base_dir)?;
    let outcome = simulate(cfg, table)?;
    write_outputs(&outcome, out_dir, "run", None)
}

/// Reconstruction over recorded logs with artifacts written to `out_dir`.
pub fn replay_mission(
    cfg: &MissionConfig,
    base_dir: &Path,
    cone_log: &Path,
    viewpoint_log: &Path,
    out_dir: &Path,
) -> Result<MissionReport> {
    let table = cfg.load_table(base_dir)?;
    let cones = read_cones(cone_log)?;
    let viewpoints = read_viewpoints(viewpoint_log)?;
    let outcome = replay(cfg, table, &cones, &viewpoints)?;
    write_outputs(&outcome, out_dir, "replay", Some((cone_log.to_path_buf(), viewpoint_log.to_path_buf())))
}
