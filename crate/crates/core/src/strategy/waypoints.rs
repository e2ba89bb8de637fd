//! Waypoint generation from the current intensity and sensitivity maps.

use crate::recon::{local_maxima, SensitivityGate};
use crate::strategy::{cluster_exploration, StrategyConfig};
use crate::{Grid, Vec3, Viewpoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaypointKind {
    /// Local maximum of λ that still needs observation.
    Exploit,
    /// Representative of a poorly observed region.
    Explore,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub cell: usize,
    pub position: Vec3,
    pub kind: WaypointKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WaypointSet {
    /// Waypoints after dropping recently visited ones; exploitation first.
    pub waypoints: Vec<Waypoint>,
    /// Size of the set before the recent-visit filter. Zero means nothing is
    /// left to explore or confirm.
    pub unfiltered: usize,
    /// Exploitation waypoints before the recent-visit filter.
    pub unfiltered_exploit: usize,
}

impl WaypointSet {
    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn count(&self, kind: WaypointKind) -> usize {
        self.waypoints.iter().filter(|w| w.kind == kind).count()
    }
}

/// Cells whose sensitivity is still below `s_min`.
pub fn unexplored_cells(s: &[f64], s_min: f64) -> impl Iterator<Item = usize> + '_ {
    s.iter().enumerate().filter(move |(_, v)| **v < s_min).map(|(j, _)| j)
}

/// Builds exploitation waypoints (strict local maxima of `lambda` with
/// `s < s_max`) and exploration waypoints (cells with `s < s_min`, reduced
/// to `k_explore` representatives), then drops any waypoint within the
/// recent-visit radius of a viewpoint from the last `recent_window`
/// seconds.
pub fn generate_waypoints(
    lambda: &[f64],
    s: &[f64],
    grid: &Grid,
    config: &StrategyConfig,
    recent: &[Viewpoint],
    now: f64,
    seed: u64,
) -> WaypointSet {
    let centers = grid.centers();
    let mut chosen: Vec<Waypoint> = Vec::new();

    let peak_floor = config.exploit_min_frac * lambda.iter().copied().fold(0.0, f64::max);
    let limit = if config.max_exploit == 0 { usize::MAX } else { config.max_exploit };
    let maxima = local_maxima(lambda, grid, limit, Some(SensitivityGate { sensitivity: s, s_max: config.s_max }));
    for p in maxima.peaks.into_iter().filter(|p| p.value >= peak_floor) {
        chosen.push(Waypoint { cell: p.cell, position: p.position, kind: WaypointKind::Exploit });
    }

    let unexplored: Vec<usize> = unexplored_cells(s, config.s_min).collect();
    if !unexplored.is_empty() {
        let points: Vec<Vec3> = unexplored.iter().map(|&j| centers[j]).collect();
        for i in cluster_exploration(&points, config.k_explore, seed) {
            let cell = unexplored[i];
            if chosen.iter().all(|w| grid.chebyshev(w.cell, cell) > 1) {
                chosen.push(Waypoint { cell, position: centers[cell], kind: WaypointKind::Explore });
            }
        }
    }

    let unfiltered = chosen.len();
    let unfiltered_exploit = chosen.iter().filter(|w| w.kind == WaypointKind::Exploit).count();
    let r2 = config.recent_radius * config.recent_radius;
    let recent: Vec<Vec3> =
        recent.iter().filter(|v| v.timestamp >= now - config.recent_window).map(|v| v.pose.position).collect();
    chosen.retain(|w| {
        recent.iter().all(|p| (p.x - w.position.x).powi(2) + (p.y - w.position.y).powi(2) >= r2)
    });
    WaypointSet { waypoints: chosen, unfiltered, unfiltered_exploit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SensorPose;

    fn grid() -> Grid {
        Grid::from_config(Vec3::zero(), 20.0, 20.0, 1.0, None).unwrap()
    }

    fn config() -> StrategyConfig {
        StrategyConfig { s_min: 1.0, s_max: 20.0, ..StrategyConfig::default() }
    }

    fn peak(g: &Grid, x: f64, y: f64) -> Vec<f64> {
        g.centers().iter().map(|c| (-((c.x - x).powi(2) + (c.y - y).powi(2)) / 4.0).exp()).collect()
    }

    #[test]
    fn nothing_left_gives_empty_set() {
        let g = grid();
        let set = generate_waypoints(&vec![1.0; g.len()], &vec![5.0; g.len()], &g, &config(), &[], 0.0, 1);
        assert!(set.is_empty());
        assert_eq!(set.unfiltered, 0);
    }

    #[test]
    fn fresh_mission_is_pure_exploration() {
        let g = grid();
        let c = config();
        let set = generate_waypoints(&vec![0.0; g.len()], &vec![0.0; g.len()], &g, &c, &[], 0.0, 1);
        assert_eq!(set.count(WaypointKind::Exploit), 0);
        assert!(set.count(WaypointKind::Explore) >= c.k_explore - 2);
        // Representatives spread over the whole area: every quadrant gets one.
        for (qx, qy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)] {
            assert!(set.waypoints.iter().any(|w| w.position.x >= qx
                && w.position.x < qx + 10.0
                && w.position.y >= qy
                && w.position.y < qy + 10.0));
        }
    }

    #[test]
    fn well_observed_peak_is_excluded() {
        let g = grid();
        let lambda = peak(&g, 5.5, 5.5);
        let peak_cell = g.index(5, 5);
        let mut s = vec![10.0; g.len()];
        let set = generate_waypoints(&lambda, &s, &g, &config(), &[], 0.0, 1);
        assert_eq!(set.waypoints.len(), 1);
        assert_eq!((set.waypoints[0].cell, set.waypoints[0].kind), (peak_cell, WaypointKind::Exploit));
        s[peak_cell] = 25.0;
        assert!(generate_waypoints(&lambda, &s, &g, &config(), &[], 0.0, 1).is_empty());
    }

    #[test]
    fn exploitation_wins_overlap() {
        let g = grid();
        let lambda = peak(&g, 5.5, 5.5);
        let c = StrategyConfig { k_explore: 400, ..config() };
        let set = generate_waypoints(&lambda, &vec![0.0; g.len()], &g, &c, &[], 0.0, 1);
        assert_eq!(set.count(WaypointKind::Exploit), 1);
        for (i, a) in set.waypoints.iter().enumerate() {
            for b in &set.waypoints[i + 1..] {
                assert!(g.chebyshev(a.cell, b.cell) > 1 || a.kind != b.kind || a.kind == WaypointKind::Explore);
            }
            if a.kind == WaypointKind::Explore {
                assert!(g.chebyshev(a.cell, g.index(5, 5)) > 1);
            }
        }
    }

    #[test]
    fn recent_visits_filter_waypoints() {
        let g = grid();
        let lambda = peak(&g, 5.5, 5.5);
        let s = vec![10.0; g.len()];
        let near = Viewpoint { pose: SensorPose::at(Vec3::new(6.0, 7.0, 2.0)), timestamp: 40.0, agent_id: 0 };
        let set = generate_waypoints(&lambda, &s, &g, &config(), &[near], 50.0, 1);
        assert!(set.is_empty());
        assert_eq!(set.unfiltered, 1);
        // Outside the window the visit no longer counts.
        assert_eq!(generate_waypoints(&lambda, &s, &g, &config(), &[near], 80.0, 1).waypoints.len(), 1);
    }
}
