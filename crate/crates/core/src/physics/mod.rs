//! Sensor model: Compton kinematics, direction sensitivity and attenuation.

mod attenuation;
mod compton;
mod detector;
mod lookup;

pub use attenuation::AttenuationModel;
pub use compton::{compton_angle, ComptonAngle, ELECTRON_REST_KEV};
pub use detector::{build_chord_lookup, direction_from_polar, DetectorGeometry, DEFAULT_KAPPA};
pub use lookup::LookupTable;

use crate::geometry::{polar_of_body, Position3, Rotation};
use crate::scalar::Real;

/// Points closer than this to the sensor contribute nothing.
pub const MIN_RANGE: f64 = 1e-6;

/// Expected detection weight of a particle emitted at `target` for a sensor
/// at `origin` with body rotation `rot`:
/// `exp(−μ d) · L(φ, θ) / d²`.
///
/// The simulator's event rate and the estimator's sensitivity use this same
/// function.
#[inline]
pub fn detection_kernel<T: Real>(
    rot: &Rotation<T>,
    origin: Position3<T>,
    target: Position3<T>,
    mu: T,
    table: &LookupTable<T>,
) -> T {
    let d = target - origin;
    let d2 = d.norm_squared();
    let dist = d2.sqrt();
    if dist < T::lit(MIN_RANGE) {
        return T::zero();
    }
    let (phi, theta) = polar_of_body(rot.apply_inverse(d), dist);
    (-mu * dist).exp() * table.lookup(phi, theta) / d2
}
