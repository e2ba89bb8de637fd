use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cone_mapper::config::MissionConfig;
use cone_mapper::mission::{batch, replay_mission, run_mission, MissionReport};
use cone_mapper::Error;

/// Multi-agent Compton camera mission simulator and estimator.
#[derive(Parser)]
#[command(name = "cone-mapper", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a mission and write logs, metrics and field dumps.
    Run { config: PathBuf },
    /// Reconstruct from recorded cone and viewpoint logs.
    Replay {
        config: PathBuf,
        #[arg(long)]
        cones: PathBuf,
        #[arg(long)]
        viewpoints: PathBuf,
    },
    /// Run consecutive seeds and aggregate the metrics.
    Batch {
        config: PathBuf,
        #[arg(long)]
        runs: u64,
        #[arg(long = "seed-base", default_value_t = 0)]
        seed_base: u64,
        /// Run both strategies on every seed and compare them.
        #[arg(long)]
        paired: bool,
    },
    /// Direction-sensitivity lookup table tools.
    Table {
        #[command(subcommand)]
        command: TableCommand,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Build the chord-length table from the configured detector.
    Build {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load(path: &Path) -> Result<(MissionConfig, PathBuf), Failure> {
    let cfg = MissionConfig::read(path).map_err(Failure::Config)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn output_dir(cfg: &MissionConfig) -> PathBuf {
    std::env::var_os("CONE_MAPPER_OUT").map(PathBuf::from).unwrap_or_else(|| cfg.run.output.clone())
}

fn summarize(report: &MissionReport) {
    match report.final_metrics() {
        Some(m) => {
            let rmse = m.rmse.map_or_else(|| "n/a".into(), |r| format!("{r:.3} m"));
            println!("t = {} s: {} cones, RMSE {rmse}, {} localized", m.t, m.n_cones, m.n_localized);
        }
        None => println!("no cycles completed"),
    }
    if let Some(t) = report.time_to_all_localized {
        println!("all sources localized from t = {t} s");
    }
    println!("metrics: {}", report.metrics_csv.display());
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config } => {
            let (cfg, base) = load(&config)?;
            let report = run_mission(&cfg, &base, &output_dir(&cfg))?;
            summarize(&report);
        }
        Command::Replay { config, cones, viewpoints } => {
            let (cfg, base) = load(&config)?;
            let out = output_dir(&cfg).join("replay");
            let report = replay_mission(&cfg, &base, &cones, &viewpoints, &out)?;
            summarize(&report);
        }
        Command::Batch { config, runs, seed_base, paired } => {
            let (cfg, base) = load(&config)?;
            if runs == 0 {
                return Err(Failure::Config(Error::config("--runs", "must be >= 1")));
            }
            let table = cfg.load_table(&base)?;
            let out = output_dir(&cfg).join("batch");
            let report = batch(&cfg, &table, runs, seed_base, &out, paired)?;
            println!("{} runs: {}", report.runs.len(), report.runs_csv.display());
            println!("aggregate: {}", report.aggregate_csv.display());
            if let Some(p) = report.paired_csv {
                println!("paired comparison: {}", p.display());
            }
        }
        Command::Table { command: TableCommand::Build { config, out } } => {
            let (cfg, base) = load(&config)?;
            let table = cfg.load_table(&base)?;
            table.write(&out)?;
            println!("{}×{} table, mean {:.4e}: {}", table.n_phi(), table.n_theta(), table.mean(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
