//! Kinematic agent: piecewise-linear flight along waypoints.

use crate::geometry::SensorPose;
use crate::{Pose, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: u32,
    pub pose: Pose,
    pub max_speed: f64,
    /// Commanded speed; the agent flies at `min(speed, max_speed)`.
    pub speed: f64,
    /// Height above terrain, meters.
    pub flight_height: f64,
    /// Waypoints in world coordinates (already at flight altitude).
    pub path: Vec<Vec3>,
    /// Index of the next waypoint in `path`.
    pub progress: usize,
}

impl AgentState {
    pub fn new(id: u32, pose: Pose, max_speed: f64, flight_height: f64) -> Self {
        Self { id, pose, max_speed, speed: max_speed, flight_height, path: Vec::new(), progress: 0 }
    }

    pub fn position(&self) -> Vec3 {
        self.pose.position
    }

    pub fn set_path(&mut self, path: Vec<Vec3>) {
        self.path = path;
        self.progress = 0;
    }

    pub fn is_idle(&self) -> bool {
        self.progress >= self.path.len()
    }

    pub fn remaining(&self) -> &[Vec3] {
        &self.path[self.progress.min(self.path.len())..]
    }
}

/// Moves the agent `min(speed, max_speed) · dt` meters along its path. A
/// waypoint reached mid-step is passed and the rest of the budget is spent
/// on the next segment. Yaw follows the horizontal direction of travel.
pub fn advance_agent(agent: &AgentState, dt: f64) -> AgentState {
    let mut next = agent.clone();
    let mut budget = agent.speed.min(agent.max_speed).max(0.0) * dt.max(0.0);
    let mut pos = agent.pose.position;
    let mut heading: Option<Vec3> = None;
    while next.progress < next.path.len() {
        let target = next.path[next.progress];
        let leg = target - pos;
        let len = leg.norm();
        if len > 1e-12 {
            heading = Some(leg);
        }
        if len <= budget {
            budget -= len;
            pos = target;
            next.progress += 1;
        } else {
            pos = pos + leg * (budget / len);
            break;
        }
    }
    let yaw = match heading {
        Some(h) if h.x.hypot(h.y) > 1e-12 => h.y.atan2(h.x),
        _ => agent.pose.yaw,
    };
    next.pose = SensorPose { position: pos, yaw, ..agent.pose };
    next
}
