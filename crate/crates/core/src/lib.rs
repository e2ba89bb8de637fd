//! Multi-agent Compton camera radiation mapping.
//!
//! Geometry, physics and reconstruction are generic over the scalar type
//! ([`Real`], implemented for `f32` and `f64`). The simulator, planner and
//! mission runner work in `f64`; the aliases below name the concrete types
//! they use.

pub mod config;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod mission;
pub mod physics;
pub mod recon;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod strategy;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3 = geometry::Vec3<f64>;
pub type Pose = geometry::SensorPose<f64>;
pub type Cone = geometry::ComptonCone<f64>;
pub type Viewpoint = geometry::Viewpoint<f64>;
pub type Grid = grid::GridMap<f64>;
pub type Table = physics::LookupTable<f64>;
pub type Row = recon::SystemRow<f64>;
pub type Sensitivity = recon::SensitivityField<f64>;
pub type Lambda = recon::LambdaField<f64>;
