//! Plain-text field dumps: `grid nx ny r ox oy` then one value per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridMap;
use crate::scalar::Real;

pub fn field_to_text<T: Real>(grid: &GridMap<T>, values: &[T]) -> String {
    let o = grid.origin();
    let mut out = format!("grid {} {} {} {} {}\n", grid.nx(), grid.ny(), grid.resolution(), o.x, o.y);
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_field<T: Real>(path: &Path, grid: &GridMap<T>, values: &[T]) -> Result<()> {
    std::fs::write(path, field_to_text(grid, values)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: usize,
    pub ny: usize,
    pub resolution: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub values: Vec<f64>,
}

pub fn parse_field(text: &str) -> std::result::Result<FieldDump, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty dump")?.split_whitespace().collect();
    if header.len() != 6 || header[0] != "grid" {
        return Err(format!("bad header {header:?}"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
    let int = |s: &str| s.parse::<usize>().map_err(|e| format!("bad count `{s}`: {e}"));
    let (nx, ny) = (int(header[1])?, int(header[2])?);
    let values = lines.filter(|l| !l.trim().is_empty()).map(|l| num(l.trim())).collect::<std::result::Result<Vec<_>, _>>()?;
    if values.len() != nx * ny {
        return Err(format!("expected {} values, got {}", nx * ny, values.len()));
    }
    Ok(FieldDump { nx, ny, resolution: num(header[3])?, origin_x: num(header[4])?, origin_y: num(header[5])?, values })
}
