//! Mission loop: simulate, reconstruct and replan at a fixed period.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::config::{MissionConfig, StrategyKind};
use crate::error::{Error, Result};
use crate::geometry::SensorPose;
use crate::mission::{metrics_row, Estimator, MetricsRow};
use crate::recon::ProjectionParams;
use crate::rng::substream;
use crate::sim::{AgentState, World};
use crate::strategy::{
    assign_to_agents, find_conflicts, generate_waypoints, plan_paths, sequence, zigzag, StrategyConfig, WaypointKind,
};
use crate::{Cone, Grid, Table, Vec3, Viewpoint};

const PLAN_KEY: u64 = 0x706c_616e;

/// Planning decisions of one cycle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CycleInfo {
    pub t: f64,
    pub cycle: u64,
    pub exploit: usize,
    pub explore: usize,
    /// Waypoints before the recent-visit filter.
    pub unfiltered: usize,
    /// Exploitation waypoints before the recent-visit filter.
    pub unfiltered_exploit: usize,
    pub skipped: usize,
    pub conflicts: usize,
}

#[derive(Debug, Clone)]
pub struct MissionOutcome {
    /// Configuration with `s_min` resolved.
    pub config: MissionConfig,
    pub strategy: StrategyConfig,
    pub metrics: Vec<MetricsRow>,
    /// Planning cycles, starting with the one at t = 0. Empty for replays
    /// and zigzag runs.
    pub cycles: Vec<CycleInfo>,
    pub cones: Vec<Cone>,
    pub viewpoints: Vec<Viewpoint>,
    pub lambda: Vec<f64>,
    pub sensitivity: Vec<f64>,
    /// `(cycle, λ, s)` after each cycle when field dumps are enabled.
    pub field_history: Vec<(u64, Vec<f64>, Vec<f64>)>,
    /// Plan dump CSV body when plan dumps are enabled.
    pub plans: String,
    /// Stopped before the time budget because nothing was left to do.
    pub terminated_early: bool,
    pub photoelectric: u64,
}

/// Decides when a reconstruction cycle is due: once the clock reaches the
/// next multiple of the replan period. Run and replay use the same rule on
/// the same clock values, so they cycle at identical steps.
#[derive(Debug, Clone)]
struct CycleClock {
    period: f64,
    next: u64,
    count: u64,
}

impl CycleClock {
    fn new(period: f64) -> Self {
        Self { period, next: 1, count: 0 }
    }

    fn due(&self, t: f64) -> bool {
        t >= self.next as f64 * self.period - 1e-9
    }

    fn fire(&mut self, t: f64) -> u64 {
        self.next = (t / self.period + 1e-9).floor() as u64 + 1;
        self.count += 1;
        self.count
    }
}

fn estimator(cfg: &MissionConfig, grid: &Grid, table: &Table) -> Result<Estimator> {
    let params = ProjectionParams::new(cfg.recon.sigma, cfg.physics.mu, cfg.recon.eps_t)?;
    let margin = (cfg.recon.margin / grid.resolution() - 1e-9).ceil().max(0.0) as usize;
    Ok(Estimator::with_margin(grid.clone(), margin, table.clone(), params, cfg.recon.n_iter, cfg.run.dt)?
        .warm_start(cfg.recon.warm_start))
}

fn n_steps(cfg: &MissionConfig) -> u64 {
    (cfg.run.duration / cfg.run.dt - 1e-9).ceil().max(0.0) as u64
}

struct Recorder<'a> {
    cfg: &'a MissionConfig,
    grid: &'a Grid,
    s_min: f64,
    sources: Vec<Vec3>,
    metrics: Vec<MetricsRow>,
    field_history: Vec<(u64, Vec<f64>, Vec<f64>)>,
}

impl Recorder<'_> {
    fn record(&mut self, est: &mut Estimator, t: f64, cycle: u64) -> Result<Vec<f64>> {
        let (lambda, diag) = est.estimate()?;
        if let Some(&k) = diag.skipped_rows.last().filter(|&&k| k > 0) {
            log::debug!("cycle {cycle}: {k} rows with zero forward projection");
        }
        let s = &est.sensitivity()[..];
        self.metrics.push(metrics_row(t, cycle, est.n_cones(), &lambda.values, s, self.s_min, self.grid, &self.sources));
        if self.cfg.run.dump_fields {
            self.field_history.push((cycle, lambda.values.clone(), s.to_vec()));
        }
        Ok(lambda.values)
    }
}

/// Flight waypoints for a grid path: cell centers lifted to flight height,
/// with waits and straight runs collapsed.
fn flight_path(grid: &Grid, cells: &[usize], height: f64) -> Vec<Vec3> {
    let Some(&start) = cells.first() else {
        return Vec::new();
    };
    let mut kept: Vec<usize> = Vec::new();
    let mut last = start;
    for &c in &cells[1..] {
        if c != last {
            kept.push(c);
            last = c;
        }
    }
    let dir = |a: usize, b: usize| {
        let (ax, ay) = grid.coords(a);
        let (bx, by) = grid.coords(b);
        (bx as isize - ax as isize, by as isize - ay as isize)
    };
    let mut out: Vec<usize> = Vec::new();
    let mut prev = Some(start);
    for (i, &c) in kept.iter().enumerate() {
        let straight = match (prev, kept.get(i + 1)) {
            (Some(p), Some(&n)) => dir(p, c) == dir(c, n),
            _ => false,
        };
        if !straight {
            out.push(c);
        }
        prev = Some(c);
    }
    out.into_iter()
        .map(|c| {
            let m = grid.centers()[c];
            Vec3::new(m.x, m.y, m.z + height)
        })
        .collect()
}

struct Planner<'a> {
    grid: &'a Grid,
    sc: StrategyConfig,
    seed: u64,
    height: f64,
    dump: Option<String>,
}

impl Planner<'_> {
    /// One planning cycle. Returns `None` when there is nothing left to
    /// explore or confirm.
    fn plan(
        &mut self,
        agents: &mut [AgentState],
        lambda: &[f64],
        s: &[f64],
        recent: &VecDeque<Viewpoint>,
        t: f64,
        cycle: u64,
    ) -> Option<CycleInfo> {
        let recent: Vec<Viewpoint> = recent.iter().copied().collect();
        let plan_seed: u64 = substream(self.seed, &[PLAN_KEY, cycle]).random();
        let set = generate_waypoints(lambda, s, self.grid, &self.sc, &recent, t, plan_seed);
        let mut info = CycleInfo {
            t,
            cycle,
            exploit: set.count(WaypointKind::Exploit),
            explore: set.count(WaypointKind::Explore),
            unfiltered: set.unfiltered,
            unfiltered_exploit: set.unfiltered_exploit,
            ..CycleInfo::default()
        };
        if set.unfiltered == 0 {
            return None;
        }
        if set.is_empty() {
            // Everything left was visited recently: keep flying the current plan.
            return Some(info);
        }
        let positions: Vec<Vec3> = set.waypoints.iter().map(|w| w.position).collect();
        let agent_pos: Vec<Vec3> = agents.iter().map(|a| a.position()).collect();
        let groups = assign_to_agents(&positions, &agent_pos);
        let mut sequences = Vec::with_capacity(agents.len());
        for (a, group) in groups.iter().enumerate() {
            let pts: Vec<Vec3> = group.iter().map(|&i| positions[i]).collect();
            match sequence(agent_pos[a], &pts) {
                Ok(order) => sequences.push(order.iter().map(|&k| set.waypoints[group[k]].cell).collect::<Vec<_>>()),
                Err(e) => {
                    log::warn!("cycle {cycle}: agent {a}: {e}; keeping previous plan");
                    return Some(info);
                }
            }
        }
        let starts: Vec<usize> = agent_pos.iter().map(|p| self.grid.nearest_cell(*p)).collect();
        let plan = plan_paths(self.grid, &starts, &sequences);
        info.skipped = plan.skipped.len();
        info.conflicts = find_conflicts(&plan).len();
        if info.conflicts > 0 {
            log::warn!("cycle {cycle}: plan has {} conflicts", info.conflicts);
        }
        for (agent, path) in agents.iter_mut().zip(&plan.paths) {
            agent.set_path(flight_path(self.grid, path, self.height));
        }
        if let Some(out) = self.dump.as_mut() {
            for (a, seq) in plan.sequences.iter().enumerate() {
                for (i, &c) in seq.iter().enumerate() {
                    let m = self.grid.centers()[c];
                    let _ = writeln!(out, "{cycle},{t},{a},waypoint,{i},{c},{},{}", m.x, m.y);
                }
            }
            for (a, path) in plan.paths.iter().enumerate() {
                for (i, &c) in path.iter().enumerate() {
                    let m = self.grid.centers()[c];
                    let _ = writeln!(out, "{cycle},{t},{a},path,{i},{c},{},{}", m.x, m.y);
                }
            }
        }
        Some(info)
    }
}

pub const PLAN_HEADER: &str = "cycle,t,agent,item,index,cell,x,y";

fn lift(grid: &Grid, p: Vec3, height: f64) -> Vec3 {
    Vec3::new(p.x, p.y, grid.terrain_height(p) + height)
}

/// Runs a full simulated mission.
pub fn simulate(cfg: &MissionConfig, table: Table) -> Result<MissionOutcome> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let sc = cfg.strategy_config(&table);
    let resolved = cfg.resolved(&table);
    let height = cfg.agents.flight_height;
    let agents: Vec<AgentState> = cfg
        .agents
        .starts
        .iter()
        .enumerate()
        .map(|(k, p)| AgentState::new(k as u32, SensorPose::at(lift(&grid, *p, height)), cfg.agents.max_speed, height))
        .collect();
    let mut world = World::new(
        grid.clone(),
        cfg.sources.clone(),
        agents,
        table.clone(),
        cfg.physics.mu,
        cfg.noise,
        cfg.run.seed,
    )?;
    let mut est = estimator(cfg, &grid, &table)?;
    let mut rec = Recorder {
        cfg,
        grid: &grid,
        s_min: sc.s_min,
        sources: cfg.sources.iter().map(|s| s.position).collect(),
        metrics: Vec::new(),
        field_history: Vec::new(),
    };
    let mut planner = Planner {
        grid: &grid,
        sc,
        seed: cfg.run.seed,
        height,
        dump: cfg.run.dump_plans.then(String::new),
    };
    let mut cycles = Vec::new();
    let mut recent: VecDeque<Viewpoint> = VecDeque::new();

    // Zigzag flies a fixed pattern back and forth; active plans at t = 0
    // from the empty maps.
    let mut patterns: Vec<Vec<Vec3>> = Vec::new();
    match cfg.run.strategy {
        StrategyKind::Zigzag => {
            let g = &cfg.grid;
            patterns = zigzag(g.origin, g.extent_x, g.extent_y, cfg.run.zigzag_step, cfg.agents.count)?
                .into_iter()
                .map(|p| p.into_iter().map(|q| lift(&grid, q, height)).collect())
                .collect();
            for (agent, p) in world.agents.iter_mut().zip(&patterns) {
                agent.set_path(p.clone());
            }
        }
        StrategyKind::Active => {
            let (lambda, _) = est.estimate()?;
            match planner.plan(&mut world.agents, &lambda.values, &est.sensitivity(), &recent, 0.0, 0) {
                Some(info) => cycles.push(info),
                None => cycles.push(CycleInfo::default()),
            }
        }
    }

    let mut clock = CycleClock::new(sc.replan_period);
    let mut cones = Vec::new();
    let mut viewpoints = Vec::new();
    let (mut pending_cones, mut pending_vps) = (Vec::new(), Vec::new());
    let total = n_steps(cfg);
    let mut terminated_early = false;
    let mut last = None;
    for step in 1..=total {
        if cfg.run.strategy == StrategyKind::Zigzag {
            for (agent, p) in world.agents.iter_mut().zip(patterns.iter_mut()) {
                if agent.is_idle() {
                    p.reverse();
                    agent.set_path(p.clone());
                }
            }
        }
        let out = world.step(cfg.run.dt)?;
        let t = world.clock();
        recent.extend(out.viewpoints.iter().copied());
        while recent.front().is_some_and(|v| v.timestamp < t - sc.recent_window) {
            recent.pop_front();
        }
        pending_cones.extend_from_slice(&out.cones);
        pending_vps.extend_from_slice(&out.viewpoints);
        cones.extend(out.cones);
        viewpoints.extend(out.viewpoints);
        if !(clock.due(t) || step == total) {
            continue;
        }
        let cycle = clock.fire(t);
        est.ingest_viewpoints(&pending_vps)?;
        est.ingest_cones(&pending_cones);
        pending_vps.clear();
        pending_cones.clear();
        let lambda = rec.record(&mut est, t, cycle)?;
        last = Some(lambda.clone());
        if step == total || cfg.run.strategy == StrategyKind::Zigzag {
            continue;
        }
        match planner.plan(&mut world.agents, &lambda, &est.sensitivity(), &recent, t, cycle) {
            Some(info) => cycles.push(info),
            None => {
                log::info!("t = {t}: no waypoints left, mission complete");
                terminated_early = true;
                break;
            }
        }
    }
    // The last recorded estimate; estimating again would advance a warm start.
    let lambda = match last {
        Some(l) => l,
        None => est.estimate()?.0.values,
    };
    Ok(MissionOutcome {
        config: resolved,
        strategy: sc,
        metrics: rec.metrics,
        cycles,
        cones,
        viewpoints,
        lambda,
        sensitivity: est.sensitivity().to_vec(),
        field_history: rec.field_history,
        plans: planner.dump.unwrap_or_default(),
        terminated_early,
        photoelectric: world.photoelectric_count(),
    })
}

/// Reconstruction and metrics over recorded logs, cycling on the same
/// clock values the recording run used.
pub fn replay(cfg: &MissionConfig, table: Table, cones: &[Cone], viewpoints: &[Viewpoint]) -> Result<MissionOutcome> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let sc = cfg.strategy_config(&table);
    let resolved = cfg.resolved(&table);
    let mut est = estimator(cfg, &grid, &table)?;
    let mut rec = Recorder {
        cfg,
        grid: &grid,
        s_min: sc.s_min,
        sources: cfg.sources.iter().map(|s| s.position).collect(),
        metrics: Vec::new(),
        field_history: Vec::new(),
    };
    let mut vps = viewpoints.to_vec();
    vps.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    let mut cs = cones.to_vec();
    cs.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    if let Some(v) = vps.iter().find(|v| !(v.timestamp > 0.0)) {
        return Err(Error::Invalid(format!("viewpoint timestamp {} is not positive", v.timestamp)));
    }

    // Step clocks are the distinct viewpoint timestamps.
    let mut steps: Vec<f64> = Vec::new();
    for v in &vps {
        if steps.last() != Some(&v.timestamp) {
            steps.push(v.timestamp);
        }
    }
    let mut clock = CycleClock::new(sc.replan_period);
    let (mut vi, mut ci) = (0, 0);
    let mut latest = None;
    for (k, &t) in steps.iter().enumerate() {
        let last = k + 1 == steps.len();
        if !(clock.due(t) || last) {
            continue;
        }
        let cycle = clock.fire(t);
        let v_end = vi + vps[vi..].iter().take_while(|v| v.timestamp <= t).count();
        let c_end = if last { cs.len() } else { ci + cs[ci..].iter().take_while(|c| c.timestamp <= t).count() };
        est.ingest_viewpoints(&vps[vi..v_end])?;
        est.ingest_cones(&cs[ci..c_end]);
        vi = v_end;
        ci = c_end;
        latest = Some(rec.record(&mut est, t, cycle)?);
    }
    // The last recorded estimate; estimating again would advance a warm start.
    let lambda = match latest {
        Some(l) => l,
        None => est.estimate()?.0.values,
    };
    Ok(MissionOutcome {
        config: resolved,
        strategy: sc,
        metrics: rec.metrics,
        cycles: Vec::new(),
        cones: cs,
        viewpoints: vps,
        lambda,
        sensitivity: est.sensitivity().to_vec(),
        field_history: rec.field_history,
        plans: String::new(),
        terminated_early: false,
        photoelectric: 0,
    })
}
