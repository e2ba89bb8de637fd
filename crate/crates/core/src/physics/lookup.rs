//! Direction-dependent detection probability table L(φ, θ).
//!
//! φ spans `[−π, π)` in `n_phi` equal bins, θ spans `[0, π]` in `n_theta`
//! equal bins. Values are stored row-major with θ as the outer index.
//! Queries return the value of the nearest bin center; a query exactly
//! between two centers resolves to the lower bin index.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable<T> {
    n_phi: usize,
    n_theta: usize,
    values: Vec<T>,
}

impl<T: Real> LookupTable<T> {
    pub fn new(n_phi: usize, n_theta: usize, values: Vec<T>) -> Result<Self> {
        if n_phi == 0 || n_theta == 0 {
            return Err(Error::Invalid("lookup table needs at least one bin per axis".into()));
        }
        if values.len() != n_phi * n_theta {
            return Err(Error::Invalid(format!(
                "lookup table expects {} values, got {}",
                n_phi * n_theta,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::Invalid(format!("lookup entry {v} outside [0, 1]")));
        }
        Ok(Self { n_phi, n_theta, values })
    }

    pub fn uniform(n_phi: usize, n_theta: usize, value: T) -> Result<Self> {
        Self::new(n_phi, n_theta, vec![value; n_phi * n_theta])
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i_phi: usize, i_theta: usize) -> T {
        self.values[i_theta * self.n_phi + i_phi]
    }

    pub fn phi_center(&self, i_phi: usize) -> T {
        let w = T::PI() * T::lit(2.0) / T::lit(self.n_phi as f64);
        -T::PI() + (T::lit(i_phi as f64) + T::lit(0.5)) * w
    }

    pub fn theta_center(&self, i_theta: usize) -> T {
        let w = T::PI() / T::lit(self.n_theta as f64);
        (T::lit(i_theta as f64) + T::lit(0.5)) * w
    }

    /// Nearest-bin indices for a query direction.
    pub fn bin(&self, phi: T, theta: T) -> (usize, usize) {
        let pi = T::PI();
        let mut phi = wrap_angle(phi);
        if phi >= pi {
            phi = -pi;
        }
        let mut theta = theta;
        if !(theta >= T::zero() && theta <= pi) {
            let two_pi = pi + pi;
            theta = theta % two_pi;
            if theta < T::zero() {
                theta += two_pi;
            }
            if theta > pi {
                theta = two_pi - theta;
            }
        }
        let i_phi = nearest_bin((phi + pi) / (T::lit(2.0) * pi) * T::lit(self.n_phi as f64), self.n_phi);
        let i_theta = nearest_bin(theta / pi * T::lit(self.n_theta as f64), self.n_theta);
        (i_phi, i_theta)
    }

    /// Stored probability for the bin nearest to `(phi, theta)`.
    #[inline]
    pub fn lookup(&self, phi: T, theta: T) -> T {
        let (i, k) = self.bin(phi, theta);
        self.value(i, k)
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::lit(self.values.len() as f64)
    }

    pub fn max_min_ratio(&self) -> T {
        let max = self.values.iter().copied().fold(T::neg_infinity(), T::max);
        let min = self.values.iter().copied().fold(T::infinity(), T::min);
        max / min
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("nphi {} ntheta {}\n", self.n_phi, self.n_theta);
        for row in self.values.chunks(self.n_phi) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let mut tokens = text.split_whitespace();
        let mut header = |name: &str| -> std::result::Result<usize, String> {
            match tokens.next() {
                Some(t) if t == name => {}
                other => return Err(format!("expected `{name}`, found {other:?}")),
            }
            tokens
                .next()
                .ok_or_else(|| format!("missing value for `{name}`"))?
                .parse::<usize>()
                .map_err(|e| format!("bad `{name}`: {e}"))
        };
        let n_phi = header("nphi")?;
        let n_theta = header("ntheta")?;
        let values = tokens
            .map(|t| t.parse::<f64>().map(T::lit).map_err(|e| format!("bad probability `{t}`: {e}")))
            .collect::<std::result::Result<Vec<T>, String>>()?;
        Self::new(n_phi, n_theta, values).map_err(|e| e.to_string())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text).map_err(|msg| Error::Parse { path: path.into(), line: 0, msg })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// `x` is a position in bin-width units from the start of the axis.
fn nearest_bin<T: Real>(x: T, n: usize) -> usize {
    let i = (x - T::one()).ceil();
    if !(i > T::zero()) {
        0
    } else {
        i.to_usize().unwrap_or(n - 1).min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn constant_table() {
        let t = LookupTable::uniform(36, 18, 0.25).unwrap();
        for k in 0..100 {
            let a = k as f64 * 0.37 - 15.0;
            assert_eq!(t.lookup(a, a * 0.5), 0.25);
        }
    }

    #[test]
    fn bin_centers_return_their_value() {
        let vals: Vec<f64> = (0..12).map(|v| v as f64 / 12.0).collect();
        let t = LookupTable::new(4, 3, vals).unwrap();
        for k in 0..3 {
            for i in 0..4 {
                assert_eq!(t.lookup(t.phi_center(i), t.theta_center(k)), t.value(i, k));
                assert_eq!(t.bin(t.phi_center(i), t.theta_center(k)), (i, k));
            }
        }
    }

    #[test]
    fn ties_go_to_lower_index() {
        let t = LookupTable::new(2, 1, vec![0.1, 0.9]).unwrap();
        assert_eq!(t.lookup(0.0, 1.0), 0.1);
        assert_eq!(t.lookup(1e-9, 1.0), 0.9);
        let t = LookupTable::new(1, 2, vec![0.2, 0.8]).unwrap();
        assert_eq!(t.lookup(0.0, FRAC_PI_2), 0.2);
        assert_eq!(t.lookup(0.0, FRAC_PI_2 + 1e-9), 0.8);
        // −π and π are the same direction
        let t = LookupTable::new(4, 1, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(t.lookup(PI, 1.0), t.lookup(-PI, 1.0));
    }

    #[test]
    fn wraps_out_of_range_angles() {
        let vals: Vec<f64> = (0..8).map(|v| v as f64 / 8.0).collect();
        let t = LookupTable::new(4, 2, vals).unwrap();
        assert_eq!(t.lookup(t.phi_center(1) + 2.0 * PI, 0.3), t.lookup(t.phi_center(1), 0.3));
        assert_eq!(t.lookup(0.5, -0.3), t.lookup(0.5, 0.3));
        assert_eq!(t.lookup(0.5, 2.0 * PI - 0.3), t.lookup(0.5, 0.3));
    }

    #[test]
    fn validation() {
        assert!(LookupTable::new(0, 1, Vec::<f64>::new()).is_err());
        assert!(LookupTable::new(2, 1, vec![0.5]).is_err());
        assert!(LookupTable::new(1, 1, vec![1.5]).is_err());
    }

    #[test]
    fn text_format() {
        let t = LookupTable::new(3, 2, vec![0.0, 1e-7, 0.5, 1.0, 2.5e-3, 0.125]).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("nphi 3 ntheta 2\n"));
        assert_eq!(LookupTable::<f64>::from_text(&text).unwrap(), t);
        assert!(LookupTable::<f64>::from_text("nphi 2 ntheta 1\n0.1").is_err());
        assert!(LookupTable::<f64>::from_text("ntheta 2 nphi 1\n0.1 0.2").is_err());
    }
}
