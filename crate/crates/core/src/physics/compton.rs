//! Compton scattering kinematics.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Electron rest energy m_e c², keV.
pub const ELECTRON_REST_KEV: f64 = 511.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonAngle<T> {
    /// Scattering angle β, radians.
    pub beta: T,
    /// cos β = 1 + m_e c² (1/(E1 + E0) − 1/E0).
    pub b: T,
}

/// Scattering angle from the incident photon energy `e0` and the recoil
/// electron energy `e1` (both keV).
///
/// The difference of reciprocals is rewritten as `−e1 / (e0 (e0 + e1))` so
/// that small electron energies do not lose precision, and β is taken from
/// `1 − B` through the half-angle form.
pub fn compton_angle<T: Real>(e0: T, e1: T) -> Result<ComptonAngle<T>> {
    if !(e0 > T::zero()) || !(e1 > T::zero()) || !e0.is_finite() || !e1.is_finite() {
        return Err(Error::Invalid(format!("energies must be positive and finite (E0={e0}, E1={e1})")));
    }
    let one_minus_b = T::lit(ELECTRON_REST_KEV) * e1 / (e0 * (e0 + e1));
    let b = T::one() - one_minus_b;
    let two = T::lit(2.0);
    if one_minus_b > two || b < -T::one() {
        return Err(Error::Infeasible { e0: e0.as_f64(), e1: e1.as_f64(), b: b.as_f64() });
    }
    let beta = two * (one_minus_b / two).sqrt().min(T::one()).asin();
    Ok(ComptonAngle { beta, b })
}
