//! Mission configuration: flat `section.key = value` text.
//!
//! Blank lines and anything after `#` are ignored. Vectors are written as
//! comma-separated components. Sources and agent starts are indexed from 0:
//! `source.0.position = 10, 20, 0`. Unknown keys, duplicates and values
//! outside their bounds are rejected with the key named in the error.
//!
//! `Display` writes every field, defaults included, in a fixed order; the
//! output parses back to an equal configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::physics::{build_chord_lookup, DetectorGeometry, LookupTable, DEFAULT_KAPPA};
use crate::sim::{NoiseSpec, SourceSpec};
use crate::strategy::{pass_sensitivity, StrategyConfig};
use crate::{Grid, Table, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub origin: Vec3,
    pub extent_x: f64,
    pub extent_y: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentsConfig {
    pub count: usize,
    /// Horizontal start positions; the agents take off at flight height.
    pub starts: Vec<Vec3>,
    pub max_speed: f64,
    pub flight_height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableSource {
    /// Chord-length table built from the detector geometry at startup.
    Builtin,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    pub mu: f64,
    pub kappa: f64,
    pub table: TableSource,
    pub table_phi: usize,
    pub table_theta: usize,
    pub table_samples: usize,
    pub table_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconConfig {
    pub sigma: f64,
    pub n_iter: usize,
    pub eps_t: f64,
    /// Padding around the search area for reconstruction, meters.
    pub margin: f64,
    /// Seed each estimate with the previous one instead of a uniform field.
    pub warm_start: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SMin {
    /// `s_min_passes` passes at flight height within 3 m lateral distance
    /// clear it.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySection {
    pub s_min: SMin,
    /// Reference passes that make up the automatic s_min.
    pub s_min_passes: f64,
    pub s_max_factor: f64,
    pub k_explore: usize,
    pub replan_period: f64,
    pub recent_radius: f64,
    pub recent_window: f64,
    pub max_exploit: usize,
    pub exploit_min_frac: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Active,
    Zigzag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub strategy: StrategyKind,
    pub zigzag_step: f64,
    pub output: PathBuf,
    /// Write λ and s after every cycle.
    pub dump_fields: bool,
    /// Write the per-cycle plans.
    pub dump_plans: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub grid: GridConfig,
    pub sources: Vec<SourceSpec>,
    pub agents: AgentsConfig,
    pub physics: PhysicsConfig,
    pub recon: ReconConfig,
    pub noise: NoiseSpec,
    pub strategy: StrategySection,
    pub run: RunConfig,
}

/// Lateral offset of the reference pass that defines the automatic s_min.
pub const S_MIN_LATERAL: f64 = 3.0;

struct Entries {
    path: PathBuf,
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse { path: path.into(), line: i + 1, msg: "expected `key = value`".into() });
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(Error::Parse { path: path.into(), line: i + 1, msg: "empty key".into() });
            }
            if map.insert(k.clone(), (i + 1, v)).is_some() {
                return Err(Error::config(k, "given more than once"));
            }
        }
        Ok(Self { path: path.into(), map })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn f64(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.take(key) {
            Some(v) => parse_f64(key, &v),
            None => default.ok_or_else(|| Error::config(key, "required key is missing")),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`"))),
            None => Ok(default),
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`"))),
            None => Ok(default),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key).as_deref() {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(Error::config(key, format!("expected true or false, got `{v}`"))),
        }
    }

    fn vec3(&mut self, key: &str, default: Option<Vec3>) -> Result<Vec3> {
        match self.take(key) {
            Some(v) => parse_vec(key, &v),
            None => default.ok_or_else(|| Error::config(key, "required key is missing")),
        }
    }

    /// Indices `K` present under `prefix.K.*`.
    fn indices(&self, prefix: &str) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for k in self.map.keys() {
            if let Some(rest) = k.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) {
                let idx = rest.split('.').next().unwrap_or("");
                let n: usize = idx.parse().map_err(|_| Error::config(k.clone(), "expected a numeric index"))?;
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            Some((k, (line, _))) => Err(Error::config(k, format!("unknown key ({}:{line})", self.path.display()))),
            None => Ok(()),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(x)
}

fn parse_vec(key: &str, v: &str) -> Result<Vec3> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    let c = parts.iter().map(|p| parse_f64(key, p)).collect::<Result<Vec<f64>>>()?;
    match c.as_slice() {
        [x, y] => Ok(Vec3::new(*x, *y, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(Error::config(key, format!("expected 2 or 3 components, got {}", c.len()))),
    }
}

fn check(ok: bool, key: &str, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, msg))
    }
}

impl MissionConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut e = Entries::parse(text, path)?;

        let grid = GridConfig {
            origin: e.vec3("grid.origin", Some(Vec3::zero()))?,
            extent_x: e.f64("grid.extent_x", None)?,
            extent_y: e.f64("grid.extent_y", None)?,
            resolution: e.f64("grid.resolution", None)?,
        };

        let mut sources = Vec::new();
        for (n, k) in e.indices("source")?.into_iter().enumerate() {
            if n != k {
                return Err(Error::config(format!("source.{n}.position"), "source indices must be 0, 1, 2, …"));
            }
            sources.push(SourceSpec {
                position: e.vec3(&format!("source.{k}.position"), None)?,
                activity: e.f64(&format!("source.{k}.activity"), None)?,
            });
        }

        let count = e.usize("agents.count", 3)?;
        let mut starts = Vec::with_capacity(count);
        let given = e.indices("agent")?;
        if let Some(&k) = given.iter().find(|&&k| k >= count) {
            return Err(Error::config(format!("agent.{k}.start"), format!("index beyond agents.count = {count}")));
        }
        for k in 0..count {
            let default = grid.origin + Vec3::new(1.0 + 2.0 * k as f64, 1.0, 0.0);
            let mut p = e.vec3(&format!("agent.{k}.start"), Some(default))?;
            p.z = 0.0;
            starts.push(p);
        }
        let agents = AgentsConfig {
            count,
            starts,
            max_speed: e.f64("agents.max_speed", Some(8.0))?,
            flight_height: e.f64("agents.flight_height", Some(2.0))?,
        };

        let table = match e.take("physics.table").as_deref() {
            None | Some("builtin") => TableSource::Builtin,
            Some(v) => match v.strip_prefix("file:") {
                Some(p) if !p.trim().is_empty() => TableSource::File(PathBuf::from(p.trim())),
                _ => return Err(Error::config("physics.table", format!("expected builtin or file:<path>, got `{v}`"))),
            },
        };
        let physics = PhysicsConfig {
            mu: e.f64("physics.mu", Some(0.01))?,
            kappa: e.f64("physics.kappa", Some(DEFAULT_KAPPA))?,
            table,
            table_phi: e.usize("physics.table_phi", 36)?,
            table_theta: e.usize("physics.table_theta", 18)?,
            table_samples: e.usize("physics.table_samples", 256)?,
            table_seed: e.u64("physics.table_seed", 0)?,
        };

        let recon = ReconConfig {
            sigma: e.f64("recon.sigma", Some(0.17))?,
            n_iter: e.usize("recon.n_iter", 10)?,
            eps_t: e.f64("recon.eps_t", Some(1e-3))?,
            margin: e.f64("recon.margin", Some(0.0))?,
            warm_start: e.bool("recon.warm_start", false)?,
        };

        let d = NoiseSpec::default();
        let noise = NoiseSpec {
            sigma: e.f64("noise.sigma", Some(d.sigma))?,
            p_amb: e.f64("noise.p_amb", Some(d.p_amb))?,
            background_rate: e.f64("noise.background_rate", Some(d.background_rate))?,
            beta_min: e.f64("noise.beta_min", Some(d.beta_min))?,
            beta_max: e.f64("noise.beta_max", Some(d.beta_max))?,
        };

        let sd = StrategyConfig::default();
        let s_min = match e.take("strategy.s_min").as_deref() {
            None | Some("auto") => SMin::Auto,
            Some(v) => SMin::Value(parse_f64("strategy.s_min", v)?),
        };
        let strategy = StrategySection {
            s_min,
            s_min_passes: e.f64("strategy.s_min_passes", Some(1.0))?,
            s_max_factor: e.f64("strategy.s_max_factor", Some(20.0))?,
            k_explore: e.usize("strategy.k_explore", sd.k_explore)?,
            replan_period: e.f64("strategy.replan_period", Some(sd.replan_period))?,
            recent_radius: e.f64("strategy.recent_radius", Some(sd.recent_radius))?,
            recent_window: e.f64("strategy.recent_window", Some(sd.recent_window))?,
            max_exploit: e.usize("strategy.max_exploit", sd.max_exploit)?,
            exploit_min_frac: e.f64("strategy.exploit_min_frac", Some(sd.exploit_min_frac))?,
        };

        let kind = match e.take("run.strategy").as_deref() {
            None | Some("active") => StrategyKind::Active,
            Some("zigzag") => StrategyKind::Zigzag,
            Some(v) => return Err(Error::config("run.strategy", format!("expected active or zigzag, got `{v}`"))),
        };
        let run = RunConfig {
            dt: e.f64("run.dt", Some(0.5))?,
            duration: e.f64("run.duration", Some(400.0))?,
            seed: e.u64("run.seed", 0)?,
            strategy: kind,
            zigzag_step: e.f64("run.zigzag_step", Some(2.0))?,
            output: PathBuf::from(e.take("run.output").unwrap_or_else(|| "out".into())),
            dump_fields: e.bool("run.dump_fields", false)?,
            dump_plans: e.bool("run.dump_plans", false)?,
        };
        e.finish()?;

        let cfg = Self { grid, sources, agents, physics, recon, noise, strategy, run };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.build_grid()?;
        for (k, s) in self.sources.iter().enumerate() {
            check(s.position.is_finite(), &format!("source.{k}.position"), "must be finite")?;
            check(s.activity > 0.0, &format!("source.{k}.activity"), "must be > 0")?;
        }
        let a = &self.agents;
        check(a.count >= 1, "agents.count", "must be >= 1")?;
        check(a.starts.len() == a.count, "agents.count", "start list length differs from count")?;
        for (k, p) in a.starts.iter().enumerate() {
            check(grid.contains_xy(*p), &format!("agent.{k}.start"), "must lie inside the grid")?;
            let cell = grid.nearest_cell(*p);
            for (m, q) in a.starts[..k].iter().enumerate() {
                if grid.nearest_cell(*q) == cell {
                    return Err(Error::config(format!("agent.{k}.start"), format!("same grid cell as agent.{m}.start")));
                }
            }
        }
        check(a.max_speed > 0.0, "agents.max_speed", "must be > 0")?;
        check(a.flight_height > 0.0, "agents.flight_height", "must be > 0")?;

        let p = &self.physics;
        check(p.mu >= 0.0, "physics.mu", "must be >= 0")?;
        check(p.kappa > 0.0, "physics.kappa", "must be > 0")?;
        check(p.table_phi >= 1, "physics.table_phi", "must be >= 1")?;
        check(p.table_theta >= 1, "physics.table_theta", "must be >= 1")?;
        check(p.table_samples >= 1, "physics.table_samples", "must be >= 1")?;

        let r = &self.recon;
        check(r.sigma > 0.0, "recon.sigma", "must be > 0")?;
        check(r.n_iter >= 1, "recon.n_iter", "must be >= 1")?;
        check(r.eps_t >= 0.0 && r.eps_t < 1.0, "recon.eps_t", "must be in [0, 1)")?;
        check(r.margin >= 0.0 && r.margin.is_finite(), "recon.margin", "must be finite and >= 0")?;

        self.noise.validate()?;

        let s = &self.strategy;
        if let SMin::Value(v) = s.s_min {
            check(v > 0.0, "strategy.s_min", "must be > 0 or auto")?;
        }
        check(s.s_min_passes > 0.0 && s.s_min_passes.is_finite(), "strategy.s_min_passes", "must be finite and > 0")?;
        check(s.s_max_factor >= 1.0, "strategy.s_max_factor", "must be >= 1")?;
        let sc = StrategyConfig {
            s_min: 1.0,
            s_max: s.s_max_factor,
            k_explore: s.k_explore,
            recent_radius: s.recent_radius,
            recent_window: s.recent_window,
            replan_period: s.replan_period,
            max_exploit: s.max_exploit,
            exploit_min_frac: s.exploit_min_frac,
        };
        sc.validate()?;

        let run = &self.run;
        check(run.dt > 0.0, "run.dt", "must be > 0")?;
        check(run.duration >= 0.0, "run.duration", "must be >= 0")?;
        check(run.zigzag_step > 0.0, "run.zigzag_step", "must be > 0")?;
        check(!run.output.as_os_str().is_empty(), "run.output", "must not be empty")?;
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::from_config(g.origin, g.extent_x, g.extent_y, g.resolution, None)
    }

    /// Loads or builds the direction-sensitivity table. Relative table
    /// paths are resolved against `base`.
    pub fn load_table(&self, base: &Path) -> Result<Table> {
        let p = &self.physics;
        match &p.table {
            TableSource::Builtin => {
                let geometry = DetectorGeometry { kappa: p.kappa, ..DetectorGeometry::default() };
                build_chord_lookup(&geometry, p.table_phi, p.table_theta, p.table_samples, p.table_seed)
            }
            TableSource::File(f) => {
                let path = if f.is_absolute() { f.clone() } else { base.join(f) };
                LookupTable::read(&path).map_err(|e| match e {
                    Error::Io { .. } => Error::config("physics.table", e.to_string()),
                    other => other,
                })
            }
        }
    }

    /// Strategy parameters with `s_min = auto` resolved against `table`.
    pub fn strategy_config(&self, table: &Table) -> StrategyConfig {
        let s = &self.strategy;
        let s_min = match s.s_min {
            SMin::Value(v) => v,
            SMin::Auto => {
                s.s_min_passes
                    * pass_sensitivity(
                        table,
                        self.physics.mu,
                        self.agents.max_speed,
                        self.agents.flight_height,
                        S_MIN_LATERAL,
                        self.run.dt,
                    )
            }
        };
        StrategyConfig {
            s_min,
            s_max: s.s_max_factor * s_min,
            k_explore: s.k_explore,
            recent_radius: s.recent_radius,
            recent_window: s.recent_window,
            replan_period: s.replan_period,
            max_exploit: s.max_exploit,
            exploit_min_frac: s.exploit_min_frac,
        }
    }

    /// Copy with `s_min` fixed to the value `auto` resolves to.
    pub fn resolved(&self, table: &Table) -> Self {
        let mut c = self.clone();
        c.strategy.s_min = SMin::Value(self.strategy_config(table).s_min);
        c
    }
}

impl fmt::Display for MissionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |p: Vec3| format!("{}, {}, {}", p.x, p.y, p.z);
        let g = &self.grid;
        writeln!(f, "grid.origin = {}", v(g.origin))?;
        writeln!(f, "grid.extent_x = {}", g.extent_x)?;
        writeln!(f, "grid.extent_y = {}", g.extent_y)?;
        writeln!(f, "grid.resolution = {}", g.resolution)?;
        for (k, s) in self.sources.iter().enumerate() {
            writeln!(f, "source.{k}.position = {}", v(s.position))?;
            writeln!(f, "source.{k}.activity = {}", s.activity)?;
        }
        let a = &self.agents;
        writeln!(f, "agents.count = {}", a.count)?;
        for (k, p) in a.starts.iter().enumerate() {
            writeln!(f, "agent.{k}.start = {}, {}", p.x, p.y)?;
        }
        writeln!(f, "agents.max_speed = {}", a.max_speed)?;
        writeln!(f, "agents.flight_height = {}", a.flight_height)?;
        let p = &self.physics;
        writeln!(f, "physics.mu = {}", p.mu)?;
        writeln!(f, "physics.kappa = {}", p.kappa)?;
        match &p.table {
            TableSource::Builtin => writeln!(f, "physics.table = builtin")?,
            TableSource::File(path) => writeln!(f, "physics.table = file:{}", path.display())?,
        }
        writeln!(f, "physics.table_phi = {}", p.table_phi)?;
        writeln!(f, "physics.table_theta = {}", p.table_theta)?;
        writeln!(f, "physics.table_samples = {}", p.table_samples)?;
        writeln!(f, "physics.table_seed = {}", p.table_seed)?;
        let r = &self.recon;
        writeln!(f, "recon.sigma = {}", r.sigma)?;
        writeln!(f, "recon.n_iter = {}", r.n_iter)?;
        writeln!(f, "recon.eps_t = {}", r.eps_t)?;
        writeln!(f, "recon.margin = {}", r.margin)?;
        writeln!(f, "recon.warm_start = {}", r.warm_start)?;
        let n = &self.noise;
        writeln!(f, "noise.sigma = {}", n.sigma)?;
        writeln!(f, "noise.p_amb = {}", n.p_amb)?;
        writeln!(f, "noise.background_rate = {}", n.background_rate)?;
        writeln!(f, "noise.beta_min = {}", n.beta_min)?;
        writeln!(f, "noise.beta_max = {}", n.beta_max)?;
        let s = &self.strategy;
        match s.s_min {
            SMin::Auto => writeln!(f, "strategy.s_min = auto")?,
            SMin::Value(x) => writeln!(f, "strategy.s_min = {x}")?,
        }
        writeln!(f, "strategy.s_min_passes = {}", s.s_min_passes)?;
        writeln!(f, "strategy.s_max_factor = {}", s.s_max_factor)?;
        writeln!(f, "strategy.k_explore = {}", s.k_explore)?;
        writeln!(f, "strategy.replan_period = {}", s.replan_period)?;
        writeln!(f, "strategy.recent_radius = {}", s.recent_radius)?;
        writeln!(f, "strategy.recent_window = {}", s.recent_window)?;
        writeln!(f, "strategy.max_exploit = {}", s.max_exploit)?;
        writeln!(f, "strategy.exploit_min_frac = {}", s.exploit_min_frac)?;
        let run = &self.run;
        writeln!(f, "run.dt = {}", run.dt)?;
        writeln!(f, "run.duration = {}", run.duration)?;
        writeln!(f, "run.seed = {}", run.seed)?;
        let kind = match run.strategy {
            StrategyKind::Active => "active",
            StrategyKind::Zigzag => "zigzag",
        };
        writeln!(f, "run.strategy = {kind}")?;
        writeln!(f, "run.zigzag_step = {}", run.zigzag_step)?;
        writeln!(f, "run.output = {}", run.output.display())?;
        writeln!(f, "run.dump_fields = {}", run.dump_fields)?;
        writeln!(f, "run.dump_plans = {}", run.dump_plans)
    }
}
