//! Repeated missions over consecutive seeds.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{MissionConfig, StrategyKind};
use crate::error::{Error, Result};
use crate::mission::{simulate, time_to_all_localized, write_outputs, MetricsRow};
use crate::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub strategy: StrategyKind,
    pub metrics: Vec<MetricsRow>,
    pub time_to_all_localized: Option<f64>,
}

impl RunSummary {
    pub fn final_metrics(&self) -> Option<&MetricsRow> {
        self.metrics.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t: f64,
    /// Mean over runs whose RMSE is defined at this time.
    pub mean_rmse: Option<f64>,
    pub mean_localized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub runs: Vec<RunSummary>,
    pub runs_csv: PathBuf,
    pub aggregate_csv: PathBuf,
    pub paired_csv: Option<PathBuf>,
}

pub fn strategy_name(k: StrategyKind) -> &'static str {
    match k {
        StrategyKind::Active => "active",
        StrategyKind::Zigzag => "zigzag",
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |x| x.to_string())
}

/// Mean metrics across runs at each cycle. A run that ended early keeps
/// contributing its last row.
pub fn aggregate(runs: &[&RunSummary]) -> Vec<AggregateRow> {
    let len = runs.iter().map(|r| r.metrics.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let rows: Vec<&MetricsRow> =
                runs.iter().filter_map(|r| r.metrics.get(i).or_else(|| r.metrics.last())).collect();
            let t = runs.iter().find_map(|r| r.metrics.get(i)).map_or(0.0, |r| r.t);
            let rmse: Vec<f64> = rows.iter().filter_map(|r| r.rmse).collect();
            AggregateRow {
                t,
                mean_rmse: (!rmse.is_empty()).then(|| rmse.iter().sum::<f64>() / rmse.len() as f64),
                mean_localized: rows.iter().map(|r| r.n_localized as f64).sum::<f64>() / rows.len().max(1) as f64,
            }
        })
        .collect()
}

/// Whether the active run localized everything strictly earlier. A run
/// that never localizes everything counts as infinitely slow.
pub fn active_faster(active: Option<f64>, zigzag: Option<f64>) -> bool {
    active.unwrap_or(f64::INFINITY) < zigzag.unwrap_or(f64::INFINITY)
}

/// Runs seeds `seed_base .. seed_base + n_runs` with the configured
/// strategy, or with both strategies when `paired`. Each run writes its own
/// directory; the run summary file is appended as runs finish so a failure
/// leaves the completed rows in place.
pub fn batch(
    cfg: &MissionConfig,
    table: &Table,
    n_runs: u64,
    seed_base: u64,
    out_dir: &Path,
    paired: bool,
) -> Result<BatchReport> {
    if n_runs == 0 {
        return Err(Error::Invalid("batch needs at least one run".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let kinds: Vec<StrategyKind> =
        if paired { vec![StrategyKind::Active, StrategyKind::Zigzag] } else { vec![cfg.run.strategy] };
    let n_sources = cfg.sources.len();

    let runs_csv = out_dir.join("runs.csv");
    let mut header = "# schema: batch-runs v1\nseed,strategy,final_t,final_rmse,final_n_localized,time_to_all_localized"
        .to_string();
    for k in 1..=n_sources {
        let _ = write!(header, ",final_err_{k}");
    }
    header.push('\n');
    fs::write(&runs_csv, header).map_err(|e| Error::io(&runs_csv, e))?;

    let mut runs = Vec::new();
    for seed in seed_base..seed_base + n_runs {
        for &kind in &kinds {
            let mut c = cfg.clone();
            c.run.seed = seed;
            c.run.strategy = kind;
            let outcome = simulate(&c, table.clone())?;
            let dir = out_dir.join(format!("{}_seed{seed}", strategy_name(kind)));
            write_outputs(&outcome, &dir, "run", None)?;
            let summary = RunSummary {
                seed,
                strategy: kind,
                time_to_all_localized: time_to_all_localized(&outcome.metrics, n_sources),
                metrics: outcome.metrics,
            };
            let mut line = String::new();
            let last = summary.final_metrics();
            let _ = write!(
                line,
                "{seed},{},{},{},{},{}",
                strategy_name(kind),
                last.map_or(0.0, |m| m.t),
                fmt_opt(last.and_then(|m| m.rmse)),
                last.map_or(0, |m| m.n_localized),
                fmt_opt(summary.time_to_all_localized),
            );
            for k in 0..n_sources {
                let _ = write!(line, ",{}", last.map_or(f64::INFINITY, |m| m.per_source[k]));
            }
            line.push('\n');
            OpenOptions::new()
                .append(true)
                .open(&runs_csv)
                .and_then(|mut f| f.write_all(line.as_bytes()))
                .map_err(|e| Error::io(&runs_csv, e))?;
            log::info!("seed {seed} {}: time to all localized {}", strategy_name(kind), fmt_opt(summary.time_to_all_localized));
            runs.push(summary);
        }
    }

    let aggregate_csv = out_dir.join("aggregate.csv");
    let mut agg = String::from("# schema: batch-aggregate v1\nstrategy,t,mean_rmse,mean_localized\n");
    for &kind in &kinds {
        let of_kind: Vec<&RunSummary> = runs.iter().filter(|r| r.strategy == kind).collect();
        for row in aggregate(&of_kind) {
            let _ = writeln!(agg, "{},{},{},{}", strategy_name(kind), row.t, fmt_opt(row.mean_rmse), row.mean_localized);
        }
    }
    fs::write(&aggregate_csv, agg).map_err(|e| Error::io(&aggregate_csv, e))?;

    let paired_csv = if paired {
        let p = out_dir.join("paired.csv");
        let mut text =
            String::from("# schema: batch-paired v1\nseed,active_time_to_all,zigzag_time_to_all,active_faster\n");
        for seed in seed_base..seed_base + n_runs {
            let get = |k| runs.iter().find(|r| r.seed == seed && r.strategy == k).and_then(|r| r.time_to_all_localized);
            let (a, z) = (get(StrategyKind::Active), get(StrategyKind::Zigzag));
            let _ = writeln!(text, "{seed},{},{},{}", fmt_opt(a), fmt_opt(z), active_faster(a, z));
        }
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        Some(p)
    } else {
        None
    };
    Ok(BatchReport { runs, runs_csv, aggregate_csv, paired_csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(rows: &[(f64, Option<f64>, usize)]) -> RunSummary {
        RunSummary {
            seed: 0,
            strategy: StrategyKind::Active,
            time_to_all_localized: None,
            metrics: rows
                .iter()
                .map(|&(t, rmse, n)| MetricsRow {
                    t,
                    cycle: 0,
                    n_cones: 0,
                    rmse,
                    n_localized: n,
                    frac_unexplored: 0.0,
                    per_source: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn aggregate_of_one_is_identity() {
        let r = summary(&[(5.0, Some(3.0), 1), (10.0, None, 2)]);
        let a = aggregate(&[&r]);
        assert_eq!(a[0], AggregateRow { t: 5.0, mean_rmse: Some(3.0), mean_localized: 1.0 });
        assert_eq!(a[1], AggregateRow { t: 10.0, mean_rmse: None, mean_localized: 2.0 });
    }

    #[test]
    fn aggregate_carries_short_runs_forward() {
        let a = summary(&[(5.0, Some(2.0), 1)]);
        let b = summary(&[(5.0, Some(4.0), 3), (10.0, Some(1.0), 5)]);
        let agg = aggregate(&[&a, &b]);
        assert_eq!(agg[1], AggregateRow { t: 10.0, mean_rmse: Some(1.5), mean_localized: 3.0 });
    }

    #[test]
    fn pair_comparison() {
        assert!(active_faster(Some(100.0), Some(200.0)));
        assert!(active_faster(Some(100.0), None));
        assert!(!active_faster(None, None));
        assert!(!active_faster(Some(100.0), Some(100.0)));
    }
}
