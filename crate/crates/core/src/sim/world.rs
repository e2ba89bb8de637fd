//! Synthetic world: sources, agents and the measurement process.

use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::Viewpoint as ViewpointT;
use crate::physics::detection_kernel;
use crate::rng::substream;
use crate::sim::{advance_agent, background_cone, synthesize_cone, AgentState};
use crate::{Cone, Grid, Table, Vec3, Viewpoint};

/// Photoelectric events per detected Compton event (10.02 / 0.46 per second
/// in the reference flight). Only counted, never turned into measurements.
pub const PHOTOELECTRIC_PER_COMPTON: f64 = 10.02 / 0.46;

const BACKGROUND_KEY: u64 = 1 << 40;
const PHOTOELECTRIC_KEY: u64 = 1 << 41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub position: Vec3,
    /// Emission activity, becquerel.
    pub activity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Std of the Gaussian error on the reported opening angle, radians.
    pub sigma: f64,
    /// Probability that an event also yields a spurious second cone.
    pub p_amb: f64,
    /// Background cones per second per agent.
    pub background_rate: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { sigma: 0.17, p_amb: 0.13, background_rate: 0.25, beta_min: 0.17, beta_max: 1.40 }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::config("noise.sigma", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.p_amb) {
            return Err(Error::config("noise.p_amb", "must be in [0, 1]"));
        }
        if !(self.background_rate >= 0.0) || !self.background_rate.is_finite() {
            return Err(Error::config("noise.background_rate", "must be >= 0"));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max < std::f64::consts::PI) {
            return Err(Error::config("noise.beta_min", "need 0 < beta_min < beta_max < pi"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepOutput {
    pub cones: Vec<Cone>,
    pub viewpoints: Vec<Viewpoint>,
    /// Detected source events this step (before ambiguity duplication).
    pub events: usize,
}

#[derive(Debug, Clone)]
pub struct World {
    pub grid: Grid,
    pub sources: Vec<SourceSpec>,
    pub agents: Vec<AgentState>,
    pub table: Table,
    pub mu: f64,
    pub noise: NoiseSpec,
    pub seed: u64,
    clock: f64,
    steps: u64,
    photoelectric: u64,
}

impl World {
    pub fn new(
        grid: Grid,
        sources: Vec<SourceSpec>,
        agents: Vec<AgentState>,
        table: Table,
        mu: f64,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<Self> {
        noise.validate()?;
        if let Some(s) = sources.iter().find(|s| !(s.activity > 0.0)) {
            return Err(Error::config("source.activity", format!("must be > 0, got {}", s.activity)));
        }
        Ok(Self { grid, sources, agents, table, mu, noise, seed, clock: 0.0, steps: 0, photoelectric: 0 })
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Synthetic photoelectric event count so far.
    pub fn photoelectric_count(&self) -> u64 {
        self.photoelectric
    }

    /// Expected detected events per second from `source` at `agent`'s pose.
    pub fn event_rate(&self, source: &SourceSpec, agent: &AgentState) -> f64 {
        let pose = agent.pose;
        source.activity / (4.0 * std::f64::consts::PI)
            * detection_kernel(&pose.rotation(), pose.position, source.position, self.mu, &self.table)
    }

    /// Advances every agent by `dt`, records one viewpoint per agent and
    /// samples source and background cones at the new poses.
    pub fn step(&mut self, dt: f64) -> Result<StepOutput> {
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("step length must be > 0, got {dt}")));
        }
        self.steps += 1;
        self.clock += dt;
        let t = self.clock;
        let step = self.steps;
        let mut out = StepOutput::default();
        for agent in self.agents.iter_mut() {
            *agent = advance_agent(agent, dt);
        }
        for agent in &self.agents {
            out.viewpoints.push(ViewpointT { pose: agent.pose, timestamp: t, agent_id: agent.id });
            let mut expected_events = 0.0;
            for (k, source) in self.sources.iter().enumerate() {
                let mean = self.event_rate(source, agent) * dt;
                expected_events += mean;
                let mut rng = substream(self.seed, &[step, k as u64, agent.id as u64]);
                for _ in 0..poisson(mean, &mut rng) {
                    let (cone, spurious) =
                        synthesize_cone(source.position, &agent.pose, t, agent.id, &self.noise, &mut rng)?;
                    out.events += 1;
                    out.cones.push(cone);
                    out.cones.extend(spurious);
                }
            }
            let mut rng = substream(self.seed, &[step, BACKGROUND_KEY, agent.id as u64]);
            for _ in 0..poisson(self.noise.background_rate * dt, &mut rng) {
                out.cones.push(background_cone(&agent.pose, t, agent.id, &self.noise, &mut rng));
            }
            let mut rng = substream(self.seed, &[step, PHOTOELECTRIC_KEY, agent.id as u64]);
            self.photoelectric += poisson(expected_events * PHOTOELECTRIC_PER_COMPTON, &mut rng);
        }
        Ok(out)
    }
}

fn poisson<R: rand::Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}
