//! Online reconstruction state: stored system rows plus sensitivity.
//!
//! Reconstruction may run on the search grid padded by a margin of cells on
//! every side. Cones whose band leaves the search area otherwise pile their
//! whole responsibility onto the edge cells; the margin absorbs that mass.
//! Fields handed out are always cropped back to the search grid.
//!
//! By default every estimate restarts MLEM from the uniform field. With warm
//! start enabled the previous estimate seeds the next one, so iterations
//! accumulate across cycles.

use crate::error::Result;
use crate::recon::{mlem, system_row, LambdaField, MlemDiagnostics, ProjectionParams};
use crate::{Cone, Grid, Lambda, Row, Sensitivity, Table, Vec3, Viewpoint};

#[derive(Debug, Clone)]
pub struct Estimator {
    grid: Grid,
    recon_grid: Grid,
    margin: usize,
    table: Table,
    params: ProjectionParams<f64>,
    n_iter: usize,
    first_dt: f64,
    rows: Vec<Row>,
    n_cones: usize,
    sensitivity: Sensitivity,
    warm_start: bool,
    /// Previous estimate and whether each cell had sensitivity then.
    previous: Option<(Vec<f64>, Vec<bool>)>,
}

/// `grid` grown by `margin` cells on every side; terrain heights are
/// extended from the nearest edge cell.
pub fn padded_grid(grid: &Grid, margin: usize) -> Result<Grid> {
    if margin == 0 {
        return Ok(grid.clone());
    }
    let r = grid.resolution();
    let (nx, ny) = (grid.nx() + 2 * margin, grid.ny() + 2 * margin);
    let mut heights = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let sx = ix.saturating_sub(margin).min(grid.nx() - 1);
            let sy = iy.saturating_sub(margin).min(grid.ny() - 1);
            heights.push(grid.heights()[grid.index(sx, sy)]);
        }
    }
    let m = margin as f64 * r;
    Grid::from_config(grid.origin() - Vec3::new(m, m, 0.0), nx as f64 * r, ny as f64 * r, r, Some(heights))
}

impl Estimator {
    pub fn new(grid: Grid, table: Table, params: ProjectionParams<f64>, n_iter: usize, first_dt: f64) -> Self {
        Self::with_margin(grid, 0, table, params, n_iter, first_dt).expect("unpadded grid is always valid")
    }

    /// Reconstructs on `grid` padded by `margin` cells per side.
    pub fn with_margin(
        grid: Grid,
        margin: usize,
        table: Table,
        params: ProjectionParams<f64>,
        n_iter: usize,
        first_dt: f64,
    ) -> Result<Self> {
        let recon_grid = padded_grid(&grid, margin)?;
        let sensitivity = Sensitivity::zeros(recon_grid.len());
        Ok(Self { grid, recon_grid, margin, table, params, n_iter, first_dt, rows: Vec::new(), n_cones: 0, sensitivity, warm_start: false, previous: None })
    }

    pub fn warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn recon_grid(&self) -> &Grid {
        &self.recon_grid
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    fn crop(&self, values: &[f64]) -> Vec<f64> {
        if self.margin == 0 {
            return values.to_vec();
        }
        let mut out = Vec::with_capacity(self.grid.len());
        for iy in 0..self.grid.ny() {
            for ix in 0..self.grid.nx() {
                out.push(values[self.recon_grid.index(ix + self.margin, iy + self.margin)]);
            }
        }
        out
    }

    /// Sensitivity over the search grid.
    pub fn sensitivity(&self) -> Vec<f64> {
        self.crop(self.sensitivity.values())
    }

    /// Cones ingested so far, including ones that touch no cell.
    pub fn n_cones(&self) -> usize {
        self.n_cones
    }

    /// Stored rows, indexed over the reconstruction grid.
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn ingest_viewpoints(&mut self, viewpoints: &[Viewpoint]) -> Result<()> {
        self.sensitivity.update(viewpoints, &self.recon_grid, self.params.mu, &self.table, self.first_dt)
    }

    pub fn ingest_cones(&mut self, cones: &[Cone]) {
        for cone in cones {
            self.n_cones += 1;
            if let Some(row) = system_row(cone, &self.recon_grid, &self.params, &self.table) {
                self.rows.push(row);
            }
        }
    }

    /// Starting field: uniform, or the previous estimate under warm start.
    /// Cells that gained sensitivity since then start at the mean of the
    /// previously positive cells.
    fn initial(&self) -> Lambda {
        let mut init = LambdaField::uniform(self.sensitivity.values());
        let Some((prev, seen)) = self.previous.as_ref().filter(|_| self.warm_start) else {
            return init;
        };
        let (sum, n) = prev.iter().filter(|v| **v > 0.0).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        let fill = if n > 0 { sum / n as f64 } else { 1.0 };
        for ((v, p), seen) in init.values.iter_mut().zip(prev).zip(seen) {
            if *v > 0.0 {
                *v = if *seen { *p } else { fill };
            }
        }
        init
    }

    /// MLEM over all stored rows, cropped to the search grid. Without any
    /// rows the starting field is returned unchanged.
    pub fn estimate(&mut self) -> Result<(Lambda, MlemDiagnostics)> {
        let init = self.initial();
        let (field, diag) = if self.rows.is_empty() {
            (init, MlemDiagnostics::default())
        } else {
            mlem(&init, &self.rows, self.sensitivity.values(), self.n_iter)?
        };
        if self.warm_start && !self.rows.is_empty() {
            let seen = self.sensitivity.values().iter().map(|v| *v > 0.0).collect();
            self.previous = Some((field.values.clone(), seen));
        }
        let values = self.crop(&field.values);
        Ok((LambdaField { values, iteration: field.iteration }, diag))
    }
}
