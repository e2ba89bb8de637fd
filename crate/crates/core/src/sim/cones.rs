//! Synthetic cone measurements.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::ComptonCone;
use crate::sim::NoiseSpec;
use crate::{Cone, Pose, Vec3};

/// Axis making angle `beta` with unit `u`, rotated by azimuth `psi` around it.
pub fn axis_on_cone(u: Vec3, beta: f64, psi: f64) -> Vec3 {
    let e1 = u.any_orthogonal();
    let e2 = u.cross(e1);
    let w = e1 * psi.cos() + e2 * psi.sin();
    u * beta.cos() + w * beta.sin()
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

fn sample_beta<R: Rng + ?Sized>(noise: &NoiseSpec, rng: &mut R) -> f64 {
    rng.random_range(noise.beta_min..noise.beta_max)
}

fn perturb_beta<R: Rng + ?Sized>(beta: f64, noise: &NoiseSpec, rng: &mut R) -> f64 {
    if noise.sigma <= 0.0 {
        return beta;
    }
    let normal = Normal::new(0.0, noise.sigma).expect("sigma > 0");
    // redraw until the reported angle is a valid opening angle
    loop {
        let b = beta + normal.sample(rng);
        if b > 1e-6 && b < PI - 1e-6 {
            return b;
        }
    }
}

/// One detected particle from `source`. The true direction lies exactly on
/// the generated cone before the reported angle is perturbed; with
/// probability `p_amb` a second cone with a random axis and the same
/// reported angle is emitted as well.
pub fn synthesize_cone<R: Rng + ?Sized>(
    source: Vec3,
    pose: &Pose,
    timestamp: f64,
    agent_id: u32,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<(Cone, Option<Cone>)> {
    let u = (source - pose.position)
        .normalized()
        .ok_or_else(|| Error::Geometry("source coincides with sensor".into()))?;
    let beta = sample_beta(noise, rng);
    let psi: f64 = rng.random_range(0.0..2.0 * PI);
    let axis = axis_on_cone(u, beta, psi);
    let reported = perturb_beta(beta, noise, rng);
    let cone = ComptonCone::new(*pose, axis, reported, timestamp, agent_id)?;
    let spurious = if noise.p_amb > 0.0 && rng.random_bool(noise.p_amb.min(1.0)) {
        Some(ComptonCone::new(*pose, random_unit(rng), reported, timestamp, agent_id)?)
    } else {
        None
    };
    Ok((cone, spurious))
}

/// A background cone: isotropic axis, opening angle uniform in the β range.
pub fn background_cone<R: Rng + ?Sized>(
    pose: &Pose,
    timestamp: f64,
    agent_id: u32,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Cone {
    let axis = random_unit(rng);
    let beta = sample_beta(noise, rng);
    ComptonCone::new(*pose, axis, beta, timestamp, agent_id).expect("valid background cone")
}
