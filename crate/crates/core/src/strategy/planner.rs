//! Prioritized multi-agent path planning on the 8-connected grid.
//!
//! Time advances one unit per move (or wait). Agents are planned in id
//! order; each one avoids the cells earlier agents occupy at the same time
//! step and the edges they traverse in the opposite direction. An agent
//! that has finished its path stays on its last cell forever.
//!
//! Earlier agents also never enter the start cell of a later agent, so a
//! later agent can always fall back to waiting where it is.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use crate::Grid;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanState {
    /// Waypoint cells in visiting order (unreachable ones removed).
    pub sequences: Vec<Vec<usize>>,
    /// Cell occupied at each time step, starting at t = 0.
    pub paths: Vec<Vec<usize>>,
    /// `(agent, cell)` waypoints that could not be reached.
    pub skipped: Vec<(usize, usize)>,
}

impl PlanState {
    /// Cell occupied by `agent` at time `t` (last cell once finished).
    pub fn cell_at(&self, agent: usize, t: usize) -> usize {
        let p = &self.paths[agent];
        p[t.min(p.len() - 1)]
    }

    pub fn horizon(&self) -> usize {
        self.paths.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conflict {
    Vertex { a: usize, b: usize, cell: usize, t: usize },
    Swap { a: usize, b: usize, t: usize },
}

/// All vertex and swap conflicts between agent pairs, counting finished
/// agents as parked on their last cell.
pub fn find_conflicts(plan: &PlanState) -> Vec<Conflict> {
    let n = plan.paths.len();
    let horizon = plan.horizon();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for t in 0..horizon.max(1) {
                let (ca, cb) = (plan.cell_at(a, t), plan.cell_at(b, t));
                if ca == cb {
                    out.push(Conflict::Vertex { a, b, cell: ca, t });
                }
                if t + 1 < horizon {
                    let (na, nb) = (plan.cell_at(a, t + 1), plan.cell_at(b, t + 1));
                    if ca != na && ca == nb && cb == na {
                        out.push(Conflict::Swap { a, b, t });
                    }
                }
            }
        }
    }
    out
}

#[derive(Default)]
struct Reservations {
    vertex: HashSet<(usize, usize)>,
    edge: HashSet<(usize, usize, usize)>,
    /// Cells held from the given time onward.
    parked: HashMap<usize, usize>,
    /// Cells that must never be entered (later agents' starts).
    blocked: HashSet<usize>,
    /// Last time with a vertex reservation on each cell.
    last_use: HashMap<usize, usize>,
    /// Beyond this time the reservation table is static.
    horizon: usize,
}

impl Reservations {
    fn free(&self, cell: usize, t: usize) -> bool {
        !self.blocked.contains(&cell)
            && !self.vertex.contains(&(cell, t))
            && self.parked.get(&cell).is_none_or(|&p| t < p)
    }

    fn can_move(&self, from: usize, to: usize, t: usize) -> bool {
        self.free(to, t + 1) && (from == to || !self.edge.contains(&(to, from, t)))
    }

    /// Whether `cell` stays free from time `t` on.
    fn free_forever(&self, cell: usize, t: usize) -> bool {
        !self.blocked.contains(&cell)
            && !self.parked.contains_key(&cell)
            && self.last_use.get(&cell).is_none_or(|&l| l < t)
    }

    fn add_path(&mut self, path: &[usize]) {
        for (t, &c) in path.iter().enumerate() {
            self.vertex.insert((c, t));
            let l = self.last_use.entry(c).or_insert(t);
            *l = (*l).max(t);
            if t + 1 < path.len() {
                self.edge.insert((c, path[t + 1], t));
            }
        }
        let end = path.len() - 1;
        self.parked.insert(path[end], end);
        self.horizon = self.horizon.max(end + 1);
    }
}

fn moves(grid: &Grid, cell: usize) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(cell).chain(grid.neighbors8(cell))
}

/// Time-expanded A* from `(start, t0)` to the first state satisfying
/// `goal`. Returns the cells visited after `t0`.
fn search(
    grid: &Grid,
    res: &Reservations,
    start: usize,
    t0: usize,
    goal: impl Fn(usize, usize) -> bool,
    h: impl Fn(usize) -> usize,
    max_t: usize,
) -> Option<Vec<usize>> {
    let cap = |t: usize| t.min(res.horizon + 1);
    let mut open = BinaryHeap::new();
    let mut parent: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut closed: HashSet<(usize, usize)> = HashSet::new();
    open.push(Reverse((t0 + h(start), Reverse(t0), start)));
    while let Some(Reverse((_, Reverse(t), cell))) = open.pop() {
        if !closed.insert((cell, cap(t))) {
            continue;
        }
        if goal(cell, t) {
            let mut path = vec![cell];
            let mut key = (cell, t);
            while let Some(&prev) = parent.get(&key) {
                path.push(prev.0);
                key = prev;
            }
            path.pop();
            path.reverse();
            return Some(path);
        }
        if t >= max_t {
            continue;
        }
        for next in moves(grid, cell) {
            if res.can_move(cell, next, t) && !closed.contains(&(next, cap(t + 1))) {
                parent.entry((next, t + 1)).or_insert((cell, t));
                open.push(Reverse((t + 1 + h(next), Reverse(t + 1), next)));
            }
        }
    }
    None
}

/// Plans conflict-free grid paths visiting each agent's waypoint cells in
/// order. `starts[a]` is agent `a`'s current cell.
pub fn plan_paths(grid: &Grid, starts: &[usize], sequences: &[Vec<usize>]) -> PlanState {
    let n = starts.len();
    let mut res = Reservations::default();
    let mut plan = PlanState { sequences: vec![Vec::new(); n], paths: Vec::with_capacity(n), skipped: Vec::new() };
    let slack = 2 * (grid.nx() + grid.ny());
    for a in 0..n {
        res.blocked = starts[a + 1..].iter().copied().collect();
        res.blocked.remove(&starts[a]);
        let mut path = vec![starts[a]];
        let empty = Vec::new();
        for &wp in sequences.get(a).unwrap_or(&empty) {
            let cur = *path.last().expect("non-empty");
            let t0 = path.len() - 1;
            let mut max_t = t0.max(res.horizon) + grid.chebyshev(cur, wp) + slack;
            if let Some(&p) = res.parked.get(&wp) {
                max_t = max_t.min(p.saturating_sub(1));
            }
            let leg = if res.blocked.contains(&wp) {
                None
            } else { search(grid, &res, cur, t0, |c, _| c == wp, |c| grid.chebyshev(c, wp), max_t)
            };
            match leg {
                Some(leg) => {
                    path.extend(leg);
                    plan.sequences[a].push(wp);
                }
                None => plan.skipped.push((a, wp)),
            }
        }
        // Settle on a cell nobody will enter later.
        let end = *path.last().expect("non-empty");
        let t_end = path.len() - 1;
        if !res.free_forever(end, t_end) {
            let max_t = t_end.max(res.horizon) + slack;
            match park(grid, &res, end, t_end, max_t) {
                Some(tail) => path.extend(tail),
                None => {
                    log::warn!("agent {a}: no parking cell, holding start");
                    path = vec![starts[a]];
                    plan.sequences[a].clear();
                }
            }
        }
        res.add_path(&path);
        plan.paths.push(path);
    }
    plan
}

/// Breadth-first search in time for the nearest state from which the cell
/// stays free forever.
fn park(grid: &Grid, res: &Reservations, start: usize, t0: usize, max_t: usize) -> Option<Vec<usize>> {
    let cap = |t: usize| t.min(res.horizon + 1);
    let mut queue = VecDeque::from([(start, t0)]);
    let mut parent: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut seen = HashSet::from([(start, cap(t0))]);
    while let Some((cell, t)) = queue.pop_front() {
        if res.free_forever(cell, t) {
            let mut path = vec![cell];
            let mut key = (cell, t);
            while let Some(&prev) = parent.get(&key) {
                path.push(prev.0);
                key = prev;
            }
            path.pop();
            path.reverse();
            return Some(path);
        }
        if t >= max_t {
            continue;
        }
        for next in moves(grid, cell) {
            if res.can_move(cell, next, t) && seen.insert((next, cap(t + 1))) {
                parent.insert((next, t + 1), (cell, t));
                queue.push_back((next, t + 1));
            }
        }
    }
    None
}
