//! Points, poses and the two measurement records (cones and viewpoints).
//!
//! Orientation convention: a pose stores intrinsic z-y-x angles
//! (yaw about z, then pitch about the new y, then roll about the new x), so
//! the body-to-world rotation is `Rz(yaw) * Ry(pitch) * Rx(roll)`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// A point in the world frame, meters.
pub type Position3<T> = Vec3<T>;

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Distance in the horizontal (x, y) plane.
    pub fn distance_xy(self, o: Self) -> T {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * (T::one() / n))
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unsigned angle between two non-zero vectors, in `[0, π]`.
    pub fn angle_to(self, o: Self) -> T {
        self.cross(o).norm().atan2(self.dot(o))
    }

    /// Some unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(self) -> Self {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        let basis = if ax <= ay && ax <= az {
            Self::new(T::one(), T::zero(), T::zero())
        } else if ay <= az {
            Self::new(T::zero(), T::one(), T::zero())
        } else {
            Self::new(T::zero(), T::zero(), T::one())
        };
        self.cross(basis).normalized().expect("non-zero vector")
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 3x3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T> {
    m: [[T; 3]; 3],
}

impl<T: Real> Rotation<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, o, z], [z, z, o]] }
    }

    /// Body-to-world rotation for intrinsic z-y-x angles.
    pub fn from_zyx(yaw: T, pitch: T, roll: T) -> Self {
        let (sy, cy) = yaw.sin_cos();
        let (sp, cp) = pitch.sin_cos();
        let (sr, cr) = roll.sin_cos();
        Self {
            m: [
                [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
                [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
                [-sp, cp * sr, cp * cr],
            ],
        }
    }

    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn apply_inverse(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
        )
    }

    pub fn compose(&self, o: &Self) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Self { m }
    }
}

/// Oriented sensor pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorPose<T> {
    pub position: Position3<T>,
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Real> SensorPose<T> {
    /// Validates finiteness and wraps the angles into `[-π, π]`.
    pub fn new(position: Position3<T>, roll: T, pitch: T, yaw: T) -> Result<Self> {
        if !position.is_finite() || !roll.is_finite() || !pitch.is_finite() || !yaw.is_finite() {
            return Err(Error::Geometry("non-finite pose".into()));
        }
        Ok(Self { position, roll: wrap_angle(roll), pitch: wrap_angle(pitch), yaw: wrap_angle(yaw) })
    }

    pub fn at(position: Position3<T>) -> Self {
        Self { position, roll: T::zero(), pitch: T::zero(), yaw: T::zero() }
    }

    pub fn with_yaw(position: Position3<T>, yaw: T) -> Self {
        Self { position, roll: T::zero(), pitch: T::zero(), yaw: wrap_angle(yaw) }
    }

    pub fn rotation(&self) -> Rotation<T> {
        Rotation::from_zyx(self.yaw, self.pitch, self.roll)
    }
}

/// Direction from the sensor to `target` in polar detector coordinates
/// `(φ, θ)`: θ ∈ [0, π] measured from the body +z axis, φ ∈ [−π, π] the
/// azimuth of the body-frame direction in the x-y plane.
pub fn polar_angles<T: Real>(pose: &SensorPose<T>, target: Position3<T>) -> Result<(T, T)> {
    polar_angles_with(&pose.rotation(), pose.position, target)
        .ok_or_else(|| Error::Geometry("target coincides with sensor position".into()))
}

/// Same as [`polar_angles`] with a precomputed rotation; `None` for a
/// zero-length direction.
#[inline]
pub fn polar_angles_with<T: Real>(
    rot: &Rotation<T>,
    origin: Position3<T>,
    target: Position3<T>,
) -> Option<(T, T)> {
    let d = target - origin;
    let n = d.norm();
    if !(n > T::zero()) {
        return None;
    }
    Some(polar_of_body(rot.apply_inverse(d), n))
}

#[inline]
pub(crate) fn polar_of_body<T: Real>(b: Vec3<T>, n: T) -> (T, T) {
    let c = (b.z / n).max(-T::one()).min(T::one());
    (b.y.atan2(b.x), c.acos())
}

/// Tolerance above which a cone axis is rejected rather than renormalized.
pub const AXIS_REJECT_TOL: f64 = 1e-6;
/// Below this deviation the axis is kept bit-for-bit, so that a cone read
/// back from a log reproduces the original exactly.
pub const AXIS_KEEP_TOL: f64 = 1e-12;

/// One Compton measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonCone<T> {
    pub apex: SensorPose<T>,
    /// Unit cone axis, world frame.
    pub axis: Vec3<T>,
    /// Half opening angle β, radians.
    pub opening_angle: T,
    pub timestamp: T,
    pub agent_id: u32,
}

impl<T: Real> ComptonCone<T> {
    pub fn new(apex: SensorPose<T>, axis: Vec3<T>, opening_angle: T, timestamp: T, agent_id: u32) -> Result<Self> {
        if !axis.is_finite() {
            return Err(Error::Geometry("non-finite cone axis".into()));
        }
        let dev = (axis.norm() - T::one()).abs();
        let axis = if dev > T::lit(AXIS_REJECT_TOL) {
            return Err(Error::Geometry(format!("cone axis norm deviates from 1 by {dev}")));
        } else if dev > T::lit(AXIS_KEEP_TOL) {
            axis.normalized().expect("near-unit axis")
        } else {
            axis
        };
        if !(opening_angle > T::zero() && opening_angle < T::PI()) {
            return Err(Error::Geometry(format!("opening angle {opening_angle} outside (0, π)")));
        }
        if !(timestamp >= T::zero()) {
            return Err(Error::Geometry(format!("negative timestamp {timestamp}")));
        }
        Ok(Self { apex, axis, opening_angle, timestamp, agent_id })
    }
}

/// A sampled sensor pose along an agent trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewpoint<T> {
    pub pose: SensorPose<T>,
    pub timestamp: T,
    pub agent_id: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    #[test]
    fn pole_and_equator() {
        let pose = SensorPose::at(v(1.0, 2.0, 3.0));
        let (_, theta) = polar_angles(&pose, v(1.0, 2.0, 10.0)).unwrap();
        assert_eq!(theta, 0.0);
        let (phi, theta) = polar_angles(&pose, v(1.0, 5.0, 3.0)).unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-15);
        assert!((phi - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn yaw_shifts_azimuth() {
        let target = v(3.0, 1.0, 0.5);
        let (phi0, th0) = polar_angles(&SensorPose::at(Vec3::zero()), target).unwrap();
        let yawed = SensorPose::with_yaw(Vec3::zero(), FRAC_PI_2);
        let (phi1, th1) = polar_angles(&yawed, target).unwrap();
        assert!((wrap_angle(phi1 - (phi0 - FRAC_PI_2))).abs() < 1e-12);
        assert!((th0 - th1).abs() < 1e-12);
    }

    #[test]
    fn coincident_target_is_error() {
        let pose = SensorPose::at(v(1.0, 1.0, 1.0));
        assert!(polar_angles(&pose, v(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn cone_axis_validation() {
        let pose = SensorPose::at(Vec3::zero());
        assert!(ComptonCone::new(pose, v(0.0, 0.0, 1.1), 0.5, 0.0, 0).is_err());
        let c = ComptonCone::new(pose, v(0.0, 0.0, 1.0 + 1e-8), 0.5, 0.0, 0).unwrap();
        assert!((c.axis.norm() - 1.0).abs() < 1e-15);
        let exact = v(0.6, 0.8, 0.0);
        let c = ComptonCone::new(pose, exact, 0.5, 0.0, 0).unwrap();
        assert_eq!(c.axis, exact);
        assert!(ComptonCone::new(pose, exact, 0.0, 0.0, 0).is_err());
        assert!(ComptonCone::new(pose, exact, PI, 0.0, 0).is_err());
        assert!(ComptonCone::new(pose, exact, 0.3, -1.0, 0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let pose = SensorPose::<f32>::with_yaw(Vec3::zero(), 0.3);
        let (_, theta) = polar_angles(&pose, Vec3::new(0.0, 0.0, -2.0)).unwrap();
        assert!((theta - std::f32::consts::PI).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn rotation_roundtrip(
            roll in -PI..PI, pitch in -PI..PI, yaw in -PI..PI,
            x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64,
        ) {
            let d = v(x, y, z);
            prop_assume!(d.norm() > 1e-3);
            let pose = SensorPose::new(Vec3::zero(), roll, pitch, yaw).unwrap();
            let rot = pose.rotation();
            let unit = d.normalized().unwrap();
            let body = rot.apply_inverse(unit);
            let back = rot.apply(body);
            prop_assert!((back - unit).norm() < 1e-9);
            // polar angles reconstruct the body direction
            let (phi, theta) = polar_angles(&pose, d).unwrap();
            let rebuilt = v(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            prop_assert!((rot.apply(rebuilt) - unit).norm() < 1e-9);
        }
    }
}
