//! Open-path waypoint sequencing.

use crate::error::{Error, Result};
use crate::Vec3;

pub const MAX_SEQUENCE_LEN: usize = 50;
const MAX_SEGMENT: usize = 3;

/// Length of the open path `start → points[order[0]] → …`.
pub fn path_cost(start: Vec3, points: &[Vec3], order: &[usize]) -> f64 {
    let mut prev = start;
    let mut cost = 0.0;
    for &i in order {
        cost += prev.distance(points[i]);
        prev = points[i];
    }
    cost
}

pub fn nearest_neighbor(start: Vec3, points: &[Vec3]) -> Vec<usize> {
    nearest_neighbor_from(start, points, None)
}

/// Nearest-neighbor tour, optionally forcing the first waypoint.
fn nearest_neighbor_from(start: Vec3, points: &[Vec3], first: Option<usize>) -> Vec<usize> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut order = Vec::with_capacity(points.len());
    let mut cur = start;
    if let Some(f) = first {
        left.retain(|&i| i != f);
        order.push(f);
        cur = points[f];
    }
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| cur.distance(points[*a.1]).total_cmp(&cur.distance(points[*b.1])))
            .expect("non-empty");
        let i = left.remove(k);
        order.push(i);
        cur = points[i];
    }
    order
}

/// Improves `order` with segment reversals until none shortens the path.
/// The start is fixed and the end is free.
pub fn two_opt(start: Vec3, points: &[Vec3], order: &mut [usize]) {
    let n = order.len();
    let at = |order: &[usize], k: usize| if k == 0 { start } else { points[order[k - 1]] };
    // Positions 1..=n in the path; position 0 is the start.
    loop {
        let mut improved = false;
        for i in 1..n {
            for j in i + 1..=n {
                let a = at(order, i - 1);
                let b = at(order, i);
                let c = at(order, j);
                let before = a.distance(b) + if j < n { c.distance(at(order, j + 1)) } else { 0.0 };
                let after = a.distance(c) + if j < n { b.distance(at(order, j + 1)) } else { 0.0 };
                if after < before - 1e-12 {
                    order[i - 1..j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Moves segments of up to `MAX_SEGMENT` waypoints (either orientation) to a
/// better place in the path. Returns whether anything changed.
pub fn or_opt(start: Vec3, points: &[Vec3], order: &mut Vec<usize>) -> bool {
    let n = order.len();
    let mut changed = false;
    let mut best = path_cost(start, points, order);
    for len in 1..=MAX_SEGMENT.min(n.saturating_sub(1)) {
        let mut i = 0;
        while i + len <= order.len() {
            let mut rest = order.clone();
            let seg: Vec<usize> = rest.drain(i..i + len).collect();
            let mut found = None;
            for pos in 0..=rest.len() {
                if pos == i {
                    continue;
                }
                for rev in [false, true] {
                    let mut cand = rest.clone();
                    let mut s = seg.clone();
                    if rev {
                        s.reverse();
                    }
                    cand.splice(pos..pos, s);
                    let c = path_cost(start, points, &cand);
                    if c < best - 1e-12 {
                        best = c;
                        found = Some(cand);
                    }
                }
            }
            if let Some(cand) = found {
                *order = cand;
                changed = true;
            } else {
                i += 1;
            }
        }
    }
    changed
}

fn improve(start: Vec3, points: &[Vec3], order: &mut Vec<usize>) {
    loop {
        two_opt(start, points, order);
        if !or_opt(start, points, order) {
            break;
        }
    }
}

/// Visiting order for `points` starting from `start`.
///
/// Nearest-neighbor construction refined by 2-opt, with or-opt moves to
/// escape 2-opt local optima. The construction is restarted once per
/// possible first waypoint and the cheapest result kept.
pub fn sequence(start: Vec3, points: &[Vec3]) -> Result<Vec<usize>> {
    if points.len() > MAX_SEQUENCE_LEN {
        return Err(Error::Invalid(format!(
            "{} waypoints exceed the sequencing limit of {MAX_SEQUENCE_LEN}",
            points.len()
        )));
    }
    let mut best = nearest_neighbor(start, points);
    improve(start, points, &mut best);
    let mut best_cost = path_cost(start, points, &best);
    for first in 0..points.len() {
        let mut order = nearest_neighbor_from(start, points, Some(first));
        improve(start, points, &mut order);
        let cost = path_cost(start, points, &order);
        if cost < best_cost - 1e-12 {
            best = order;
            best_cost = cost;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn brute_force(start: Vec3, points: &[Vec3]) -> f64 {
        fn rec(start: Vec3, points: &[Vec3], used: &mut Vec<bool>, prev: Vec3, acc: f64, best: &mut f64) {
            if acc >= *best {
                return;
            }
            if used.iter().all(|u| *u) {
                *best = acc;
                return;
            }
            for i in 0..points.len() {
                if !used[i] {
                    used[i] = true;
                    rec(start, points, used, points[i], acc + prev.distance(points[i]), best);
                    used[i] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(start, points, &mut vec![false; points.len()], start, 0.0, &mut best);
        best
    }

    #[test]
    fn trivial_cases() {
        assert!(sequence(Vec3::zero(), &[]).unwrap().is_empty());
        assert_eq!(sequence(Vec3::zero(), &[Vec3::new(3.0, 1.0, 0.0)]).unwrap(), vec![0]);
        let line: Vec<Vec3> = [4.0, 1.0, 3.0, 2.0].iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect();
        assert_eq!(sequence(Vec3::zero(), &line).unwrap(), vec![1, 3, 2, 0]);
        assert!(sequence(Vec3::zero(), &vec![Vec3::zero(); 51]).is_err());
    }

    #[test]
    fn seeded_instances_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let (mut exact, trials) = (0, 300);
        for _ in 0..trials {
            let n = rng.random_range(1..=8);
            let points: Vec<Vec3> =
                (0..n).map(|_| Vec3::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0), 0.0)).collect();
            let start = Vec3::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0), 0.0);
            let order = sequence(start, &points).unwrap();
            let mut sorted = order.clone();
            sorted.sort();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            let got = path_cost(start, &points, &order);
            let opt = brute_force(start, &points);
            assert!(got <= 1.05 * opt + 1e-9, "{got} vs {opt}");
            if got <= opt + 1e-9 {
                exact += 1;
            }
        }
        assert!(exact * 10 >= trials * 9, "{exact}/{trials}");
    }

    proptest! {
        #[test]
        fn local_search_never_worse_than_construction(
            pts in prop::collection::vec((0.0..50.0f64, 0.0..50.0f64), 1..=12),
        ) {
            let points: Vec<Vec3> = pts.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect();
            let start = Vec3::new(25.0, 25.0, 0.0);
            let nn = nearest_neighbor(start, &points);
            let mut two = nn.clone();
            two_opt(start, &points, &mut two);
            let got = path_cost(start, &points, &sequence(start, &points).unwrap());
            prop_assert!(path_cost(start, &points, &two) <= path_cost(start, &points, &nn) + 1e-9);
            prop_assert!(got <= path_cost(start, &points, &two) + 1e-9);
        }
    }
}
