//! Lawn-mower coverage baseline.

use crate::error::{Error, Result};
use crate::Vec3;

/// Splits the area into `n_agents` equal strips along x and covers each
/// with sweep lines parallel to y, `step` apart and centered in the strip.
/// A strip narrower than `step` gets one line down its middle.
///
/// Returns per-agent polylines in the ground plane (`z = origin.z`).
pub fn zigzag(origin: Vec3, extent_x: f64, extent_y: f64, step: f64, n_agents: usize) -> Result<Vec<Vec<Vec3>>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::config("run.zigzag_step", "must be > 0"));
    }
    if n_agents == 0 {
        return Err(Error::config("agents.count", "must be >= 1"));
    }
    let width = extent_x / n_agents as f64;
    let (y0, y1) = (origin.y, origin.y + extent_y);
    let mut out = Vec::with_capacity(n_agents);
    for a in 0..n_agents {
        let left = origin.x + a as f64 * width;
        let xs: Vec<f64> = if step > width {
            vec![left + width / 2.0]
        } else {
            let m = (width / step + 1e-9).floor() as usize;
            let margin = ((width - m as f64 * step) / 2.0).max(0.0);
            (0..=m).map(|k| left + margin + k as f64 * step).collect()
        };
        let mut path = Vec::with_capacity(2 * xs.len());
        for (k, x) in xs.into_iter().enumerate() {
            let (ya, yb) = if k % 2 == 0 { (y0, y1) } else { (y1, y0) };
            path.push(Vec3::new(x, ya, origin.z));
            path.push(Vec3::new(x, yb, origin.z));
        }
        out.push(path);
    }
    Ok(out)
}
