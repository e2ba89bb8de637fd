//! Sparse system-matrix rows: projection of one cone onto the map.

use crate::error::{Error, Result};
use crate::geometry::{polar_of_body, ComptonCone};
use crate::grid::GridMap;
use crate::physics::{LookupTable, MIN_RANGE};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionParams<T> {
    /// Width σ of the angular projection kernel, radians.
    pub sigma: T,
    /// Linear attenuation coefficient μ, 1/m.
    pub mu: T,
    /// Entries below `eps_t × row maximum` are dropped.
    pub eps_t: T,
}

impl<T: Real> ProjectionParams<T> {
    pub fn new(sigma: T, mu: T, eps_t: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::config("recon.sigma", "must be > 0"));
        }
        if !(mu >= T::zero()) || !mu.is_finite() {
            return Err(Error::config("physics.mu", "must be >= 0"));
        }
        if !(eps_t >= T::zero()) || !eps_t.is_finite() {
            return Err(Error::config("recon.eps_t", "must be >= 0"));
        }
        Ok(Self { sigma, mu, eps_t })
    }
}

/// Gaussian projection function `h(δ) = exp(−δ² / 2σ²)`.
#[inline]
pub fn projection<T: Real>(delta: T, sigma: T) -> T {
    let z = delta / sigma;
    (-(z * z) * T::lit(0.5)).exp()
}

/// Retained `(cell, t_ij)` pairs of one cone, sorted by cell index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemRow<T> {
    pub cells: Vec<u32>,
    pub weights: Vec<T>,
}

impl<T: Real> SystemRow<T> {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, T)>) -> Self {
        let (cells, weights) = pairs.into_iter().unzip();
        Self { cells, weights }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.cells.iter().zip(&self.weights).map(|(&j, &t)| (j as usize, t))
    }

    /// Σ_k t_ik λ_k.
    #[inline]
    pub fn forward(&self, lambda: &[T]) -> T {
        let mut acc = T::zero();
        for (j, t) in self.cells.iter().zip(&self.weights) {
            acc += *t * lambda[*j as usize];
        }
        acc
    }
}

/// Computes `t_ij = exp(−μ d) · h(δ_ij) · L(φ, θ) / d²` for every cell and
/// keeps the entries at or above `eps_t` times the row maximum. Returns
/// `None` when nothing is retained.
pub fn system_row<T: Real>(
    cone: &ComptonCone<T>,
    grid: &GridMap<T>,
    params: &ProjectionParams<T>,
    table: &LookupTable<T>,
) -> Option<SystemRow<T>> {
    let rot = cone.apex.rotation();
    let apex = cone.apex.position;
    let mut dense: Vec<(u32, T)> = Vec::new();
    let mut max = T::zero();
    for (j, m) in grid.centers().iter().enumerate() {
        let d = *m - apex;
        let d2 = d.norm_squared();
        let dist = d2.sqrt();
        if dist < T::lit(MIN_RANGE) {
            continue;
        }
        let delta = (d.angle_to(cone.axis) - cone.opening_angle).abs();
        let h = projection(delta, params.sigma);
        if h == T::zero() {
            continue;
        }
        let (phi, theta) = polar_of_body(rot.apply_inverse(d), dist);
        let t = (-params.mu * dist).exp() * h * table.lookup(phi, theta) / d2;
        if t > T::zero() {
            max = max.max(t);
            dense.push((j as u32, t));
        }
    }
    if dense.is_empty() {
        return None;
    }
    let cut = params.eps_t * max;
    Some(SystemRow::from_pairs(dense.into_iter().filter(|&(_, t)| t >= cut)))
}
