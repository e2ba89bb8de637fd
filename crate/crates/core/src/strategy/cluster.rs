//! K-means for waypoint reduction and agent assignment.
//!
//! Distances are horizontal: waypoints sit on terrain, agents at flight
//! height, and only the ground-plane layout matters for both uses.

use rand::Rng;

use crate::rng::substream;
use crate::Vec3;

const MAX_ITERATIONS: usize = 100;

fn d2(a: Vec3, b: Vec3) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

fn nearest(p: Vec3, centroids: &[Vec3]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centroids.iter().enumerate() {
        let d = d2(p, *c);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// Lloyd iterations from `centroids` until the assignment stops changing.
/// Empty clusters keep their centroid. Returns the final assignment.
fn lloyd(points: &[Vec3], centroids: &mut [Vec3]) -> Vec<usize> {
    let mut assign: Vec<usize> = points.iter().map(|p| nearest(*p, centroids)).collect();
    for _ in 0..MAX_ITERATIONS {
        let k = centroids.len();
        let mut sum = vec![(0.0, 0.0, 0.0); k];
        let mut count = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assign) {
            sum[a].0 += p.x;
            sum[a].1 += p.y;
            sum[a].2 += p.z;
            count[a] += 1;
        }
        for (c, (s, n)) in centroids.iter_mut().zip(sum.iter().zip(&count)) {
            if *n > 0 {
                let n = *n as f64;
                *c = Vec3::new(s.0 / n, s.1 / n, s.2 / n);
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(*p, centroids)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    assign
}

/// Within-cluster sum of squared horizontal distances.
pub fn within_cluster_ss(points: &[Vec3], assign: &[usize], k: usize) -> f64 {
    let mut sum = vec![(0.0, 0.0); k];
    let mut count = vec![0usize; k];
    for (p, &a) in points.iter().zip(assign) {
        sum[a].0 += p.x;
        sum[a].1 += p.y;
        count[a] += 1;
    }
    points
        .iter()
        .zip(assign)
        .map(|(p, &a)| {
            let n = count[a] as f64;
            (p.x - sum[a].0 / n).powi(2) + (p.y - sum[a].1 / n).powi(2)
        })
        .sum()
}

/// Seeded k-means: k-means++ start, then Lloyd iterations. Returns the
/// centroids and each point's cluster. Requires `1 ≤ k ≤ |points|`.
pub fn kmeans(points: &[Vec3], k: usize, seed: u64) -> (Vec<Vec3>, Vec<usize>) {
    let mut rng = substream(seed, &[0x6b6d65616e73]);
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())]);
    let mut dist: Vec<f64> = points.iter().map(|p| d2(*p, centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, d) in dist.iter().enumerate() {
                if r < *d {
                    idx = i;
                    break;
                }
                r -= d;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centroids.push(points[pick]);
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(d2(*p, points[pick]));
        }
    }
    let assign = lloyd(points, &mut centroids);
    (centroids, assign)
}

/// Reduces `points` to `k` representatives: each k-means centroid is
/// replaced by the member point closest to it, so every representative is
/// one of the inputs.
///
/// Returns indices into `points`, ordered by cluster. With `k ≥ |points|`
/// every point is returned.
pub fn cluster_exploration(points: &[Vec3], k: usize, seed: u64) -> Vec<usize> {
    if k >= points.len() {
        return (0..points.len()).collect();
    }
    if k == 0 {
        return Vec::new();
    }
    let (centroids, assign) = kmeans(points, k, seed);
    let mut reps = Vec::with_capacity(k);
    for (c_idx, c) in centroids.iter().enumerate() {
        let member = points
            .iter()
            .enumerate()
            .filter(|(i, _)| assign[*i] == c_idx)
            .min_by(|a, b| d2(*a.1, *c).total_cmp(&d2(*b.1, *c)).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i);
        if let Some(i) = member {
            if !reps.contains(&i) {
                reps.push(i);
            }
        }
    }
    reps
}

/// Splits `waypoints` among agents: K-means with one centroid per agent,
/// seeded at the agent positions. Cluster `a` goes to agent `a`.
pub fn assign_to_agents(waypoints: &[Vec3], agents: &[Vec3]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); agents.len()];
    if waypoints.is_empty() || agents.is_empty() {
        return out;
    }
    let mut centroids = agents.to_vec();
    let assign = lloyd(waypoints, &mut centroids);
    for (i, a) in assign.into_iter().enumerate() {
        out[a].push(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn pts(v: &[(f64, f64)]) -> Vec<Vec3> {
        v.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect()
    }

    #[test]
    fn k_at_least_n_returns_points() {
        let p = pts(&[(0.0, 0.0), (1.0, 1.0), (5.0, 5.0)]);
        assert_eq!(cluster_exploration(&p, 3, 1), vec![0, 1, 2]);
        assert_eq!(cluster_exploration(&p, 7, 1), vec![0, 1, 2]);
    }

    #[test]
    fn one_representative_per_blob() {
        let p = pts(&[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (30.0, 30.0), (30.5, 30.0), (30.0, 30.5)]);
        for seed in 0..20 {
            let mut r = cluster_exploration(&p, 2, seed);
            r.sort();
            assert_eq!(r.len(), 2);
            assert!(r[0] < 3 && r[1] >= 3, "{r:?}");
        }
    }

    #[test]
    fn beats_random_and_tracks_exhaustive_optimum() {
        // Exhaustive 2-partition oracle; random baseline averaged over draws.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut ratio_sum = 0.0;
        for case in 0..50 {
            let n = rng.random_range(3..=8);
            let p: Vec<Vec3> =
                (0..n).map(|_| Vec3::new(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), 0.0)).collect();
            let mut best = f64::INFINITY;
            for mask in 1u32..(1 << n) - 1 {
                let a: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
                best = best.min(within_cluster_ss(&p, &a, 2));
            }
            let (_, assign) = kmeans(&p, 2, case);
            let got = within_cluster_ss(&p, &assign, 2);
            let mut random = 0.0;
            for _ in 0..200 {
                let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
                random += within_cluster_ss(&p, &a, 2) / 200.0;
            }
            assert!(got >= best - 1e-9);
            assert!(got <= random + 1e-9, "{got} {random}");
            ratio_sum += got / best;
        }
        assert!(ratio_sum / 50.0 < 1.1, "{}", ratio_sum / 50.0);

        let p: Vec<Vec3> = (0..100).map(|_| Vec3::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0), 0.0)).collect();
        let (_, assign) = kmeans(&p, 4, 1);
        let random: Vec<usize> = (0..100).map(|_| rng.random_range(0..4)).collect();
        assert!(within_cluster_ss(&p, &assign, 4) <= within_cluster_ss(&p, &random, 4));
    }

    #[test]
    fn deterministic_in_seed() {
        let p: Vec<Vec3> = (0..100).map(|i| Vec3::new((i * 7 % 13) as f64, (i * 3 % 11) as f64, 0.0)).collect();
        assert_eq!(cluster_exploration(&p, 4, 9), cluster_exploration(&p, 4, 9));
        assert_eq!(cluster_exploration(&p, 4, 9).len(), 4);
    }

    #[test]
    fn assignment_follows_agents() {
        let w = pts(&[(0.0, 0.0), (1.0, 0.0), (40.0, 40.0), (41.0, 40.0)]);
        assert_eq!(assign_to_agents(&w, &pts(&[(0.0, 5.0)])), vec![vec![0, 1, 2, 3]]);
        assert_eq!(assign_to_agents(&w, &pts(&[(45.0, 45.0), (0.0, 2.0)])), vec![vec![2, 3], vec![0, 1]]);
        let blobs = pts(&[
            (0.0, 0.0), (1.0, 0.0), (0.0, 1.0),
            (20.0, 0.0), (21.0, 0.0), (20.0, 1.0),
            (10.0, 20.0), (11.0, 20.0), (10.0, 21.0),
        ]);
        let agents = pts(&[(10.0, 25.0), (-3.0, -3.0), (24.0, -2.0)]);
        assert_eq!(assign_to_agents(&blobs, &agents), vec![vec![6, 7, 8], vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(assign_to_agents(&[], &agents), vec![Vec::<usize>::new(); 3]);
    }
}
