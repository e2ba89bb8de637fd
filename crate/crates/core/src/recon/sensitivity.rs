//! Accumulated detection sensitivity s_j.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Viewpoint;
use crate::grid::GridMap;
use crate::physics::{detection_kernel, LookupTable};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityField<T> {
    values: Vec<T>,
    last_timestamp: BTreeMap<u32, T>,
}

impl<T: Real> SensitivityField<T> {
    pub fn zeros(n_cells: usize) -> Self {
        Self { values: vec![T::zero(); n_cells], last_timestamp: BTreeMap::new() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn last_timestamp(&self, agent: u32) -> Option<T> {
        self.last_timestamp.get(&agent).copied()
    }

    /// Adds `Σ_v s_jv · Δ_v` for a batch of new viewpoints.
    ///
    /// `Δ_v` is the gap to the same agent's previous viewpoint; an agent's
    /// first viewpoint uses `first_dt`. Viewpoints are applied one at a time
    /// in the given order, so splitting a stream into batches gives
    /// bit-identical results. The batch is validated before anything is
    /// added.
    pub fn update(
        &mut self,
        viewpoints: &[Viewpoint<T>],
        grid: &GridMap<T>,
        mu: T,
        table: &LookupTable<T>,
        first_dt: T,
    ) -> Result<()> {
        if grid.len() != self.values.len() {
            return Err(Error::Invalid("sensitivity field and grid sizes differ".into()));
        }
        let mut last = self.last_timestamp.clone();
        let mut gaps = Vec::with_capacity(viewpoints.len());
        for vp in viewpoints {
            let gap = match last.get(&vp.agent_id) {
                Some(&prev) if !(vp.timestamp > prev) => {
                    return Err(Error::Ordering {
                        agent: vp.agent_id,
                        t: vp.timestamp.as_f64(),
                        last: prev.as_f64(),
                    })
                }
                Some(&prev) => vp.timestamp - prev,
                None => first_dt,
            };
            last.insert(vp.agent_id, vp.timestamp);
            gaps.push(gap);
        }
        for (vp, gap) in viewpoints.iter().zip(gaps) {
            let rot = vp.pose.rotation();
            let origin = vp.pose.position;
            for (s, m) in self.values.iter_mut().zip(grid.centers()) {
                *s += detection_kernel(&rot, origin, *m, mu, table) * gap;
            }
        }
        self.last_timestamp = last;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SensorPose, Vec3};

    fn vp(x: f64, t: f64, agent: u32) -> Viewpoint<f64> {
        Viewpoint { pose: SensorPose::at(Vec3::new(x, 0.5, 1.0)), timestamp: t, agent_id: agent }
    }

    fn setup() -> (GridMap<f64>, LookupTable<f64>) {
        (
            GridMap::from_config(Vec3::zero(), 4.0, 1.0, 1.0, None).unwrap(),
            LookupTable::uniform(8, 4, 0.3).unwrap(),
        )
    }

    #[test]
    fn single_viewpoint_increment() {
        let (g, table) = setup();
        let mut s = SensitivityField::zeros(g.len());
        s.update(&[vp(0.5, 1.0, 0)], &g, 0.01, &table, 1.0).unwrap();
        // cell 0 is exactly 1 m below the sensor
        assert!((s.values()[0] - 0.3 * (-0.01f64).exp()).abs() < 1e-15);
        assert!((s.values()[0] / 0.3 - 0.99005).abs() < 1e-5);
    }

    #[test]
    fn empty_batch_is_noop() {
        let (g, table) = setup();
        let mut s = SensitivityField::zeros(g.len());
        s.update(&[vp(0.5, 1.0, 0)], &g, 0.01, &table, 1.0).unwrap();
        let before = s.clone();
        s.update(&[], &g, 0.01, &table, 1.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn gaps_follow_each_agent() {
        let (g, table) = setup();
        let mut a = SensitivityField::zeros(g.len());
        a.update(&[vp(0.5, 1.0, 0), vp(0.5, 1.5, 1), vp(0.5, 4.0, 0)], &g, 0.0, &table, 0.5).unwrap();
        // agent 0: first Δ = 0.5, then Δ = 3; agent 1: first Δ = 0.5
        let k = 0.3;
        assert!((a.values()[0] - k * (0.5 + 0.5 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn out_of_order_is_rejected_atomically() {
        let (g, table) = setup();
        let mut s = SensitivityField::zeros(g.len());
        s.update(&[vp(0.5, 2.0, 0)], &g, 0.01, &table, 1.0).unwrap();
        let before = s.clone();
        let err = s.update(&[vp(1.5, 3.0, 1), vp(0.5, 2.0, 0)], &g, 0.01, &table, 1.0);
        assert!(matches!(err, Err(Error::Ordering { agent: 0, .. })));
        assert_eq!(s, before);
    }
}
