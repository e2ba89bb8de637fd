//! Discretized candidate-source area.
//!
//! Cells are enumerated row-major from the origin: cell `j = iy * nx + ix`
//! has its center at `origin + ((ix + 0.5) r, (iy + 0.5) r, height_j)`.
//! Indices are zero-based.

use crate::error::{Error, Result};
use crate::geometry::{Position3, Vec3};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GridMap<T> {
    origin: Position3<T>,
    resolution: T,
    nx: usize,
    ny: usize,
    heights: Vec<T>,
    centers: Vec<Position3<T>>,
}

impl<T: Real> GridMap<T> {
    /// Builds a grid covering `extent_x × extent_y` meters. `heights` is the
    /// per-cell terrain elevation (row-major); `None` means flat ground.
    pub fn from_config(
        origin: Position3<T>,
        extent_x: T,
        extent_y: T,
        resolution: T,
        heights: Option<Vec<T>>,
    ) -> Result<Self> {
        if !(extent_x > T::zero()) || !extent_x.is_finite() {
            return Err(Error::config("grid.extent_x", "must be > 0"));
        }
        if !(extent_y > T::zero()) || !extent_y.is_finite() {
            return Err(Error::config("grid.extent_y", "must be > 0"));
        }
        if !(resolution > T::zero()) || !resolution.is_finite() {
            return Err(Error::config("grid.resolution", "must be > 0"));
        }
        if !origin.is_finite() {
            return Err(Error::config("grid.origin", "must be finite"));
        }
        let cells = |extent: T| -> usize {
            let n = (extent / resolution - T::lit(1e-9)).ceil();
            n.to_usize().unwrap_or(0).max(1)
        };
        let (nx, ny) = (cells(extent_x), cells(extent_y));
        let heights = match heights {
            Some(h) if h.len() != nx * ny => {
                return Err(Error::config(
                    "grid.heights",
                    format!("expected {} values, got {}", nx * ny, h.len()),
                ))
            }
            Some(h) if h.iter().any(|v| !v.is_finite()) => {
                return Err(Error::config("grid.heights", "non-finite height"))
            }
            Some(h) => h,
            None => vec![T::zero(); nx * ny],
        };
        let half = T::lit(0.5);
        let mut centers = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let off = Vec3::new(
                    (T::lit(ix as f64) + half) * resolution,
                    (T::lit(iy as f64) + half) * resolution,
                    heights[iy * nx + ix],
                );
                centers.push(origin + off);
            }
        }
        Ok(Self { origin, resolution, nx, ny, heights, centers })
    }

    pub fn origin(&self) -> Position3<T> {
        self.origin
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of cells J.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn centers(&self) -> &[Position3<T>] {
        &self.centers
    }

    pub fn cell_center(&self, j: usize) -> Result<Position3<T>> {
        self.centers.get(j).copied().ok_or(Error::Index { index: j, len: self.len() })
    }

    pub fn coords(&self, j: usize) -> (usize, usize) {
        (j % self.nx, j / self.nx)
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Cell containing the horizontal projection of `p`, clamped to the grid.
    pub fn nearest_cell(&self, p: Position3<T>) -> usize {
        let clamp = |v: T, n: usize| -> usize {
            let i = (v / self.resolution).floor();
            if !(i > T::zero()) {
                0
            } else {
                i.to_usize().unwrap_or(n - 1).min(n - 1)
            }
        };
        let ix = clamp(p.x - self.origin.x, self.nx);
        let iy = clamp(p.y - self.origin.y, self.ny);
        self.index(ix, iy)
    }

    /// Terrain height at the cell nearest to `p`.
    pub fn terrain_height(&self, p: Position3<T>) -> T {
        self.origin.z + self.heights[self.nearest_cell(p)]
    }

    pub fn contains_xy(&self, p: Position3<T>) -> bool {
        let ex = T::lit(self.nx as f64) * self.resolution;
        let ey = T::lit(self.ny as f64) * self.resolution;
        p.x >= self.origin.x && p.y >= self.origin.y && p.x <= self.origin.x + ex && p.y <= self.origin.y + ey
    }

    /// The up to 8 neighbors of cell `j`.
    pub fn neighbors8(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        let (ix, iy) = self.coords(j);
        let (ix, iy) = (ix as isize, iy as isize);
        (-1isize..=1)
            .flat_map(|dy| (-1isize..=1).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| dx != 0 || dy != 0)
            .filter_map(move |(dx, dy)| {
                let (x, y) = (ix + dx, iy + dy);
                (x >= 0 && y >= 0 && (x as usize) < self.nx && (y as usize) < self.ny)
                    .then(|| self.index(x as usize, y as usize))
            })
    }

    /// Chebyshev (8-connected) distance in cells.
    pub fn chebyshev(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        ax.abs_diff(bx).max(ay.abs_diff(by))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(ex: f64, ey: f64, r: f64) -> GridMap<f64> {
        GridMap::from_config(Vec3::zero(), ex, ey, r, None).unwrap()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(grid(50.0, 50.0, 0.5).len(), 10_000);
        let g = grid(1.0, 1.0, 1.0);
        assert_eq!(g.len(), 1);
        assert_eq!(g.cell_center(0).unwrap(), Vec3::new(0.5, 0.5, 0.0));
        assert_eq!(grid(3.0, 2.0, 1.0).len(), 6);
        assert_eq!(grid(2.5, 1.0, 1.0).nx(), 3);
    }

    #[test]
    fn row_major_enumeration() {
        let g = grid(3.0, 2.0, 1.0);
        let expect = [(0.5, 0.5), (1.5, 0.5), (2.5, 0.5), (0.5, 1.5), (1.5, 1.5), (2.5, 1.5)];
        for (j, (x, y)) in expect.iter().enumerate() {
            assert_eq!(g.cell_center(j).unwrap(), Vec3::new(*x, *y, 0.0));
        }
        assert!(matches!(g.cell_center(6), Err(Error::Index { index: 6, len: 6 })));
    }

    #[test]
    fn heights_and_origin() {
        let h = vec![0.0, 1.0, 2.0, 3.0];
        let g = GridMap::from_config(Vec3::new(10.0, -5.0, 1.0), 2.0, 2.0, 1.0, Some(h)).unwrap();
        assert_eq!(g.cell_center(3).unwrap(), Vec3::new(11.5, -3.5, 4.0));
        assert!(GridMap::from_config(Vec3::zero(), 2.0, 2.0, 1.0, Some(vec![0.0; 3])).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        for (ex, ey, r, key) in [
            (0.0, 1.0, 1.0, "grid.extent_x"),
            (1.0, -1.0, 1.0, "grid.extent_y"),
            (1.0, 1.0, 0.0, "grid.resolution"),
        ] {
            match GridMap::from_config(Vec3::<f64>::zero(), ex, ey, r, None) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn nearest_cell_inverts_center_and_spacing_is_exact() {
        let g = grid(7.0, 4.5, 0.5);
        for j in 0..g.len() {
            assert_eq!(g.nearest_cell(g.cell_center(j).unwrap()), j);
            let (ix, iy) = g.coords(j);
            if ix + 1 < g.nx() {
                let d = g.cell_center(j + 1).unwrap() - g.cell_center(j).unwrap();
                assert_eq!((d.x, d.y), (0.5, 0.0));
            }
            if iy + 1 < g.ny() {
                let d = g.cell_center(j + g.nx()).unwrap() - g.cell_center(j).unwrap();
                assert_eq!((d.x, d.y), (0.0, 0.5));
            }
        }
    }

    #[test]
    fn neighbors() {
        let g = grid(3.0, 3.0, 1.0);
        let mut n: Vec<_> = g.neighbors8(4).collect();
        n.sort();
        assert_eq!(n, vec![0, 1, 2, 3, 5, 6, 7, 8]);
        let mut c: Vec<_> = g.neighbors8(0).collect();
        c.sort();
        assert_eq!(c, vec![1, 3, 4]);
        assert_eq!(g.chebyshev(0, 8), 2);
    }
}
