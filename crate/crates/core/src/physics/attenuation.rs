use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponential attenuation in air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationModel<T> {
    /// Linear attenuation coefficient μ, 1/m.
    pub mu: T,
}

impl<T: Real> AttenuationModel<T> {
    pub fn new(mu: T) -> Result<Self> {
        if !(mu >= T::zero()) || !mu.is_finite() {
            return Err(Error::config("physics.mu", "must be finite and >= 0"));
        }
        Ok(Self { mu })
    }

    /// Surviving fraction `exp(−μ d)` after `d` meters.
    pub fn factor(&self, d: T) -> Result<T> {
        if !(d >= T::zero()) {
            return Err(Error::Invalid(format!("negative distance {d}")));
        }
        Ok((-self.mu * d).exp())
    }
}
