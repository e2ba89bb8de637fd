//! Synthetic world: gamma sources, agent kinematics and cone synthesis.

mod agent;
mod cones;
pub mod log;
mod world;

pub use agent::{advance_agent, AgentState};
pub use cones::{axis_on_cone, background_cone, random_unit, synthesize_cone};
pub use world::{NoiseSpec, SourceSpec, StepOutput, World, PHOTOELECTRIC_PER_COMPTON};
