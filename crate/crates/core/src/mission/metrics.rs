//! Per-cycle localization metrics and their CSV form.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::recon::{local_maxima, localization_metrics, DEFAULT_TOLERANCE};
use crate::{Grid, Vec3};

pub const METRICS_SCHEMA: &str = "# schema: metrics v1";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub t: f64,
    pub cycle: u64,
    pub n_cones: usize,
    /// `None` while λ has no local maximum.
    pub rmse: Option<f64>,
    pub n_localized: usize,
    pub frac_unexplored: f64,
    /// Distance from each true source to its nearest estimate.
    pub per_source: Vec<f64>,
}

/// Source position estimates: the `n` strict local maxima of λ with the
/// largest values.
pub fn source_estimates(lambda: &[f64], grid: &Grid, n: usize) -> Vec<Vec3> {
    local_maxima(lambda, grid, n, None).peaks.into_iter().map(|p| p.position).collect()
}

pub fn metrics_row(
    t: f64,
    cycle: u64,
    n_cones: usize,
    lambda: &[f64],
    sensitivity: &[f64],
    s_min: f64,
    grid: &Grid,
    sources: &[Vec3],
) -> MetricsRow {
    let estimates = source_estimates(lambda, grid, sources.len());
    let m = localization_metrics(&estimates, sources, DEFAULT_TOLERANCE);
    let unexplored = sensitivity.iter().filter(|s| **s < s_min).count();
    MetricsRow {
        t,
        cycle,
        n_cones,
        rmse: m.rmse,
        n_localized: m.n_within,
        frac_unexplored: unexplored as f64 / sensitivity.len().max(1) as f64,
        per_source: m.per_source,
    }
}

pub fn metrics_header(n_sources: usize) -> String {
    let mut h = String::from("t,cycle,n_cones,rmse,n_localized,frac_unexplored");
    for k in 1..=n_sources {
        let _ = write!(h, ",per_source_err_{k}");
    }
    h
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| x.to_string())
}

pub fn metrics_to_csv(rows: &[MetricsRow], n_sources: usize) -> String {
    let mut out = format!("{METRICS_SCHEMA}\n{}\n", metrics_header(n_sources));
    for r in rows {
        let _ = write!(out, "{},{},{},{},{},{}", r.t, r.cycle, r.n_cones, opt(r.rmse), r.n_localized, r.frac_unexplored);
        for e in &r.per_source {
            let _ = write!(out, ",{e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_metrics(text: &str, path: &Path) -> Result<Vec<MetricsRow>> {
    let err = |line: usize, msg: String| Error::Parse { path: path.into(), line, msg };
    let mut rows = Vec::new();
    let mut n_sources = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let Some(n) = n_sources else {
            if !line.starts_with("t,cycle,n_cones,rmse,n_localized,frac_unexplored") {
                return Err(err(i + 1, "expected metrics header".into()));
            }
            n_sources = Some(cols.len() - 6);
            continue;
        };
        if cols.len() != 6 + n {
            return Err(err(i + 1, format!("expected {} columns, got {}", 6 + n, cols.len())));
        }
        let f = |k: usize| cols[k].parse::<f64>().map_err(|e| err(i + 1, format!("column {}: {e}", k + 1)));
        let u = |k: usize| cols[k].parse::<u64>().map_err(|e| err(i + 1, format!("column {}: {e}", k + 1)));
        let rmse = f(3)?;
        rows.push(MetricsRow {
            t: f(0)?,
            cycle: u(1)?,
            n_cones: u(2)? as usize,
            rmse: (!rmse.is_nan()).then_some(rmse),
            n_localized: u(4)? as usize,
            frac_unexplored: f(5)?,
            per_source: (6..6 + n).map(f).collect::<Result<_>>()?,
        });
    }
    Ok(rows)
}

/// Earliest cycle time from which every source stays localized until the
/// end of the series.
pub fn time_to_all_localized(rows: &[MetricsRow], n_sources: usize) -> Option<f64> {
    if n_sources == 0 {
        return rows.first().map(|r| r.t);
    }
    let mut t = None;
    for r in rows {
        if r.n_localized == n_sources {
            t.get_or_insert(r.t);
        } else {
            t = None;
        }
    }
    t
}
