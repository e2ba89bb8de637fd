//! Active search: waypoint generation, assignment, sequencing and
//! conflict-free path planning, plus the zigzag baseline.

mod cluster;
mod planner;
mod tsp;
mod waypoints;
mod zigzag;

pub use cluster::{assign_to_agents, cluster_exploration, kmeans, within_cluster_ss};
pub use planner::{find_conflicts, plan_paths, Conflict, PlanState};
pub use tsp::{nearest_neighbor, or_opt, path_cost, sequence, two_opt, MAX_SEQUENCE_LEN};
pub use waypoints::{generate_waypoints, unexplored_cells, Waypoint, WaypointKind, WaypointSet};
pub use zigzag::zigzag;

use crate::error::{Error, Result};
use crate::geometry::SensorPose;
use crate::physics::detection_kernel;
use crate::{Table, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    /// Cells below this sensitivity are exploration targets.
    pub s_min: f64,
    /// Local maxima at or above this sensitivity count as confirmed.
    pub s_max: f64,
    pub k_explore: usize,
    /// Meters, measured horizontally.
    pub recent_radius: f64,
    /// Seconds.
    pub recent_window: f64,
    /// Seconds between planning cycles.
    pub replan_period: f64,
    /// At most this many exploitation waypoints per cycle (0 = no limit).
    pub max_exploit: usize,
    /// Local maxima below this fraction of max λ are ignored.
    pub exploit_min_frac: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            s_min: 1.0,
            s_max: 20.0,
            k_explore: 12,
            recent_radius: 3.0,
            recent_window: 30.0,
            replan_period: 5.0,
            max_exploit: 8,
            exploit_min_frac: 0.0,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_min > 0.0) || !self.s_min.is_finite() {
            return Err(Error::config("strategy.s_min", "must be > 0"));
        }
        if !(self.s_max >= self.s_min) || !self.s_max.is_finite() {
            return Err(Error::config("strategy.s_max", "must be >= s_min"));
        }
        if self.k_explore == 0 {
            return Err(Error::config("strategy.k_explore", "must be >= 1"));
        }
        if !(self.recent_radius >= 0.0) || !self.recent_radius.is_finite() {
            return Err(Error::config("strategy.recent_radius", "must be >= 0"));
        }
        if !(self.recent_window >= 0.0) || !self.recent_window.is_finite() {
            return Err(Error::config("strategy.recent_window", "must be >= 0"));
        }
        if !(self.replan_period > 0.0) || !self.replan_period.is_finite() {
            return Err(Error::config("strategy.replan_period", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.exploit_min_frac) {
            return Err(Error::config("strategy.exploit_min_frac", "must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Sensitivity a ground cell gains from one straight pass of an agent flying
/// at `speed`, `height` above it and `lateral` meters to the side, sampled
/// every `dt` seconds.
pub fn pass_sensitivity(table: &Table, mu: f64, speed: f64, height: f64, lateral: f64, dt: f64) -> f64 {
    let half = 100.0;
    let step = speed * dt;
    let n = (2.0 * half / step).ceil() as i64;
    (0..=n)
        .map(|k| {
            let pose = SensorPose::at(Vec3::new(-half + k as f64 * step, lateral, height));
            detection_kernel(&pose.rotation(), pose.position, Vec3::zero(), mu, table) * dt
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::LookupTable;

    #[test]
    fn pass_sensitivity_matches_closed_form() {
        // Uniform table, no attenuation, pass over x ∈ [−100, 100]:
        // ∫ L / (a² + x²) dx / v = 2 L atan(100 / a) / (v a), a² = h² + l².
        let table = LookupTable::uniform(8, 4, 1e-3).unwrap();
        let got = pass_sensitivity(&table, 0.0, 8.0, 2.0, 3.0, 0.01);
        let a = 13f64.sqrt();
        let want = 2.0 * 1e-3 * (100.0 / a).atan() / (8.0 * a);
        assert!((got - want).abs() / want < 1e-3, "{got} {want}");
    }

    #[test]
    fn config_validation_names_keys() {
        assert!(StrategyConfig::default().validate().is_ok());
        for (c, key) in [
            (StrategyConfig { s_min: 0.0, ..Default::default() }, "strategy.s_min"),
            (StrategyConfig { s_max: 0.5, ..Default::default() }, "strategy.s_max"),
            (StrategyConfig { k_explore: 0, ..Default::default() }, "strategy.k_explore"),
            (StrategyConfig { replan_period: 0.0, ..Default::default() }, "strategy.replan_period"),
        ] {
            match c.validate() {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key),
                other => panic!("{other:?}"),
            }
        }
    }
}
