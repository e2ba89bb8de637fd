use crate::geometry::Position3;
use crate::grid::GridMap;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub cell: usize,
    pub position: Position3<T>,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMaxima<T> {
    pub peaks: Vec<Peak<T>>,
    /// Fewer strict maxima exist than were requested.
    pub short: bool,
}

/// Only cells with `sensitivity[j] < s_max` qualify.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityGate<'a, T> {
    pub sensitivity: &'a [T],
    pub s_max: T,
}

/// Whether `j` is strictly greater than all of its 8 neighbors.
pub fn is_strict_local_max<T: Real>(values: &[T], grid: &GridMap<T>, j: usize) -> bool {
    let v = values[j];
    grid.neighbors8(j).all(|k| v > values[k])
}

/// The `n` strict 8-neighborhood maxima with the largest values, sorted by
/// value (descending) and then cell index.
pub fn local_maxima<T: Real>(
    values: &[T],
    grid: &GridMap<T>,
    n: usize,
    gate: Option<SensitivityGate<'_, T>>,
) -> LocalMaxima<T> {
    let mut peaks: Vec<Peak<T>> = (0..values.len().min(grid.len()))
        .filter(|&j| gate.is_none_or(|g| g.sensitivity[j] < g.s_max))
        .filter(|&j| is_strict_local_max(values, grid, j))
        .map(|j| Peak { cell: j, position: grid.centers()[j], value: values[j] })
        .collect();
    peaks.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal).then(a.cell.cmp(&b.cell)));
    let short = peaks.len() < n;
    peaks.truncate(n);
    LocalMaxima { peaks, short }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn grid(n: f64) -> GridMap<f64> {
        GridMap::from_config(Vec3::zero(), n, n, 1.0, None).unwrap()
    }

    #[test]
    fn uniform_has_none() {
        let g = grid(5.0);
        let m = local_maxima(&vec![2.0; g.len()], &g, 3, None);
        assert!(m.peaks.is_empty() && m.short);
    }

    #[test]
    fn single_peak() {
        let g = grid(5.0);
        let vals: Vec<f64> = g.centers().iter().map(|c| -((c.x - 1.5).powi(2) + (c.y - 3.5).powi(2))).collect();
        let m = local_maxima(&vals, &g, 1, None);
        assert_eq!(m.peaks.len(), 1);
        assert!(!m.short);
        assert_eq!(m.peaks[0].cell, g.index(1, 3));
    }

    #[test]
    fn two_gaussians_match_exhaustive_scan() {
        let g = grid(20.0);
        let bump = |c: &Vec3<f64>, x: f64, y: f64, a: f64| a * (-((c.x - x).powi(2) + (c.y - y).powi(2)) / 8.0).exp();
        let vals: Vec<f64> =
            g.centers().iter().map(|c| bump(c, 4.5, 5.5, 1.0) + bump(c, 14.5, 15.5, 0.7)).collect();
        // brute force: compare each cell against every cell within Chebyshev distance 1
        let mut modes = Vec::new();
        for j in 0..g.len() {
            if (0..g.len()).filter(|&k| k != j && g.chebyshev(j, k) <= 1).all(|k| vals[j] > vals[k]) {
                modes.push(j);
            }
        }
        assert_eq!(modes.len(), 2);
        let m = local_maxima(&vals, &g, 2, None);
        assert_eq!(m.peaks.iter().map(|p| p.cell).collect::<Vec<_>>(), vec![g.index(4, 5), g.index(14, 15)]);
        assert_eq!(modes, vec![g.index(4, 5), g.index(14, 15)]);
    }

    #[test]
    fn gate_excludes_well_observed_peaks() {
        let g = grid(9.0);
        let vals: Vec<f64> = g.centers().iter().map(|c| -((c.x - 4.5).powi(2) + (c.y - 4.5).powi(2))).collect();
        let mut s = vec![0.0; g.len()];
        s[g.index(4, 4)] = 10.0;
        let gate = SensitivityGate { sensitivity: &s, s_max: 5.0 };
        assert!(local_maxima(&vals, &g, 1, Some(gate)).peaks.is_empty());
    }

    #[test]
    fn scale_invariant() {
        let g = grid(10.0);
        let vals: Vec<f64> = (0..g.len()).map(|j| ((j * 37) % 11) as f64).collect();
        let a = local_maxima(&vals, &g, 4, None);
        let scaled: Vec<f64> = vals.iter().map(|v| v * 3.7).collect();
        let b = local_maxima(&scaled, &g, 4, None);
        assert_eq!(
            a.peaks.iter().map(|p| p.cell).collect::<Vec<_>>(),
            b.peaks.iter().map(|p| p.cell).collect::<Vec<_>>()
        );
    }
}
