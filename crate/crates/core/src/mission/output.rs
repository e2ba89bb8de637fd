//! Writing mission artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::SMin;
use crate::error::{Error, Result};
use crate::mission::{metrics_to_csv, time_to_all_localized, MetricsRow, MissionOutcome, PLAN_HEADER};
use crate::recon::write_field;
use crate::sim::log::{cones_to_csv, viewpoints_to_csv};

#[derive(Debug, Clone, PartialEq)]
pub struct MissionReport {
    pub metrics: Vec<MetricsRow>,
    pub time_to_all_localized: Option<f64>,
    pub terminated_early: bool,
    pub header: PathBuf,
    pub cone_log: PathBuf,
    pub viewpoint_log: PathBuf,
    pub metrics_csv: PathBuf,
    pub lambda_dump: PathBuf,
    pub sensitivity_dump: PathBuf,
    pub field_dumps: Vec<PathBuf>,
    pub plan_dump: Option<PathBuf>,
}

impl MissionReport {
    pub fn final_metrics(&self) -> Option<&MetricsRow> {
        self.metrics.last()
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Comment block followed by the resolved configuration, which parses back
/// as a configuration file.
pub fn run_header(outcome: &MissionOutcome, mode: &str) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# schema: run-header v1");
    let _ = writeln!(h, "# cone-mapper {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# mode: {mode}");
    let _ = writeln!(h, "# seed: {}", outcome.config.run.seed);
    let auto = matches!(outcome.config.strategy.s_min, SMin::Value(v) if v == outcome.strategy.s_min);
    let _ = writeln!(h, "# s_min: {}{}", outcome.strategy.s_min, if auto { "" } else { " (overridden)" });
    let _ = writeln!(h, "# s_max: {}", outcome.strategy.s_max);
    let _ = writeln!(h, "# cycles: {}", outcome.metrics.len());
    let _ = writeln!(h, "# terminated_early: {}", outcome.terminated_early);
    let _ = writeln!(h, "# photoelectric_events: {}", outcome.photoelectric);
    let _ = write!(h, "{}", outcome.config);
    h
}

/// Writes the header, metrics, final fields and optional dumps into
/// `out_dir`. Logs are written there too unless `logs` points at existing
/// ones (replay).
pub fn write_outputs(
    outcome: &MissionOutcome,
    out_dir: &Path,
    mode: &str,
    logs: Option<(PathBuf, PathBuf)>,
) -> Result<MissionReport> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let grid = outcome.config.build_grid()?;
    let n_sources = outcome.config.sources.len();

    let header = out_dir.join("run_header.cfg");
    write(&header, &run_header(outcome, mode))?;
    let (cone_log, viewpoint_log) = match logs {
        Some(l) => l,
        None => {
            let c = out_dir.join("cones.csv");
            let v = out_dir.join("viewpoints.csv");
            write(&c, &cones_to_csv(&outcome.cones))?;
            write(&v, &viewpoints_to_csv(&outcome.viewpoints))?;
            (c, v)
        }
    };
    let metrics_csv = out_dir.join("metrics.csv");
    write(&metrics_csv, &metrics_to_csv(&outcome.metrics, n_sources))?;
    let lambda_dump = out_dir.join("lambda.txt");
    let sensitivity_dump = out_dir.join("sensitivity.txt");
    write_field(&lambda_dump, &grid, &outcome.lambda)?;
    write_field(&sensitivity_dump, &grid, &outcome.sensitivity)?;

    let mut field_dumps = Vec::new();
    if !outcome.field_history.is_empty() {
        let dir = out_dir.join("fields");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (cycle, lambda, s) in &outcome.field_history {
            let l = dir.join(format!("lambda_{cycle:04}.txt"));
            let sp = dir.join(format!("sensitivity_{cycle:04}.txt"));
            write_field(&l, &grid, lambda)?;
            write_field(&sp, &grid, s)?;
            field_dumps.push(l);
            field_dumps.push(sp);
        }
    }
    let plan_dump = if outcome.config.run.dump_plans && mode == "run" {
        let p = out_dir.join("plans.csv");
        write(&p, &format!("# schema: plans v1\n{PLAN_HEADER}\n{}", outcome.plans))?;
        Some(p)
    } else {
        None
    };
    Ok(MissionReport {
        metrics: outcome.metrics.clone(),
        time_to_all_localized: time_to_all_localized(&outcome.metrics, n_sources),
        terminated_early: outcome.terminated_early,
        header,
        cone_log,
        viewpoint_log,
        metrics_csv,
        lambda_dump,
        sensitivity_dump,
        field_dumps,
        plan_dump,
    })
}
