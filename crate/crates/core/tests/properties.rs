use proptest::prelude::*;

use cone_mapper::geometry::{polar_angles, ComptonCone, SensorPose};
use cone_mapper::physics::{build_chord_lookup, compton_angle, DetectorGeometry, LookupTable};
use cone_mapper::recon::{
    local_maxima, log_likelihood, mlem_step, system_row, LambdaField, ProjectionParams, SystemRow,
};
use cone_mapper::sim::{advance_agent, synthesize_cone, AgentState, NoiseSpec};
use cone_mapper::strategy::{
    find_conflicts, generate_waypoints, plan_paths, StrategyConfig, WaypointKind,
};
use cone_mapper::{Grid, Sensitivity, Vec3, Viewpoint};

fn instance() -> impl Strategy<Value = (Vec<SystemRow<f64>>, Vec<f64>, Vec<f64>)> {
    (1usize..60, 1usize..40).prop_flat_map(|(j, i)| {
        let rows = prop::collection::vec(
            prop::collection::btree_map(0..j as u32, 1e-3f64..1.0, 1..=j.min(10)),
            i,
        )
        .prop_map(|rows| rows.into_iter().map(SystemRow::from_pairs).collect::<Vec<_>>());
        (rows, prop::collection::vec(0.01f64..10.0, j), prop::collection::vec(1e-3f64..1e3, j))
    })
}

proptest! {
    #[test]
    fn grid_centers_are_spaced_by_resolution(
        ex in 0.5f64..12.0, ey in 0.5f64..12.0, r in 0.25f64..2.0, ox in -50.0f64..50.0, oy in -50.0f64..50.0,
    ) {
        let g = Grid::from_config(Vec3::new(ox, oy, 0.0), ex, ey, r, None).unwrap();
        prop_assert_eq!(g.nx(), (ex / r - 1e-9).ceil() as usize);
        for j in 0..g.len() {
            let (ix, iy) = g.coords(j);
            let c = g.centers()[j];
            prop_assert!((c.x - (ox + (ix as f64 + 0.5) * r)).abs() < 1e-9);
            prop_assert!((c.y - (oy + (iy as f64 + 0.5) * r)).abs() < 1e-9);
            prop_assert_eq!(g.nearest_cell(c), j);
        }
    }

    #[test]
    fn cone_axis_tolerance(dev in -1e-3f64..1e-3, beta in 0.01f64..3.1) {
        let axis = Vec3::new(0.6, 0.0, 0.8) * (1.0 + dev);
        let cone = ComptonCone::new(SensorPose::at(Vec3::zero()), axis, beta, 0.0, 0);
        if dev.abs() > 1.0001e-6 {
            prop_assert!(cone.is_err());
        } else if dev.abs() < 0.9999e-6 {
            prop_assert!((cone.unwrap().axis.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compton_angle_grows_with_electron_energy(e0 in 30.0f64..3000.0, a in 1e-3f64..1.0, b in 1e-3f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let e_max = 2.0 * e0 * e0 / (511.0 - 2.0 * e0).max(1e-9);
        let scale = if 2.0 * e0 >= 511.0 { 1e5 } else { e_max };
        if let (Ok(x), Ok(y)) = (compton_angle(e0, lo * scale), compton_angle(e0, hi * scale)) {
            prop_assert!(x.beta <= y.beta);
            prop_assert!(x.b >= y.b);
        }
    }

    #[test]
    fn lookup_is_total_over_wrapped_angles(phi in -50.0f64..50.0, theta in -10.0f64..10.0) {
        let t = build_chord_lookup(&DetectorGeometry { kappa: 40.0, ..DetectorGeometry::default() }, 12, 6, 16, 2).unwrap();
        let v = t.lookup(phi, theta);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, t.lookup(phi, theta));
        let (i, k) = t.bin(phi, theta);
        prop_assert!(i < t.n_phi() && k < t.n_theta());
        prop_assert_eq!(v, t.lookup(phi + std::f64::consts::TAU, theta));
    }

    #[test]
    fn mlem_conserves_and_ascends((rows, s, init) in instance()) {
        let mut lambda = LambdaField { values: init, iteration: 0 };
        let n = rows.len() as f64;
        let mut prev = log_likelihood(&lambda.values, &rows, &s);
        for _ in 0..5 {
            mlem_step(&mut lambda, &rows, &s);
            prop_assert!(lambda.values.iter().all(|v| *v >= 0.0));
            let total: f64 = lambda.values.iter().zip(&s).map(|(l, s)| l * s).sum();
            prop_assert!((total - n).abs() <= 1e-9 * n);
            let next = log_likelihood(&lambda.values, &rows, &s);
            prop_assert!(next >= prev - 1e-9 * prev.abs().max(1.0));
            prev = next;
        }
    }

    #[test]
    fn maxima_ignore_positive_scale(values in prop::collection::vec(0.0f64..1.0, 64), k in 1e-6f64..1e6) {
        let g = Grid::from_config(Vec3::zero(), 8.0, 8.0, 1.0, None).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
        let a: Vec<usize> = local_maxima(&values, &g, 5, None).peaks.iter().map(|p| p.cell).collect();
        let b: Vec<usize> = local_maxima(&scaled, &g, 5, None).peaks.iter().map(|p| p.cell).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn system_rows_rotate_with_the_scene(
        ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in -1.0f64..1.0,
        px in 0.0f64..10.0, py in 0.0f64..10.0, beta in 0.2f64..2.9,
    ) {
        let axis = Vec3::new(ax, ay, az);
        prop_assume!(axis.norm() > 0.1);
        let axis = axis.normalized().unwrap();
        let g = Grid::from_config(Vec3::zero(), 10.0, 10.0, 0.5, None).unwrap();
        let table = LookupTable::uniform(8, 4, 1e-3).unwrap();
        let params = ProjectionParams::new(0.17, 0.01, 1e-3).unwrap();
        // quarter turn about the grid center maps the grid onto itself
        let turn = |v: Vec3| Vec3::new(10.0 - v.y, v.x, v.z);
        let spin = |v: Vec3| Vec3::new(-v.y, v.x, v.z);
        let apex = Vec3::new(px, py, 2.0);
        let a = ComptonCone::new(SensorPose::at(apex), axis, beta, 0.0, 0).unwrap();
        let b = ComptonCone::new(SensorPose::with_yaw(turn(apex), std::f64::consts::FRAC_PI_2), spin(axis), beta, 0.0, 0).unwrap();
        let ra = system_row(&a, &g, &params, &table);
        let rb = system_row(&b, &g, &params, &table);
        prop_assert_eq!(ra.is_some(), rb.is_some());
        if let (Some(ra), Some(rb)) = (ra, rb) {
            let wb: std::collections::HashMap<usize, f64> = rb.iter().collect();
            for (j, t) in ra.iter() {
                let k = g.nearest_cell(turn(g.centers()[j]));
                let u = wb.get(&k).copied().unwrap_or(0.0);
                prop_assert!((t - u).abs() <= 1e-9 * t.max(u), "cell {} → {}: {} vs {}", j, k, t, u);
            }
        }
    }

    #[test]
    fn sensitivity_splits_are_exact(steps in prop::collection::vec((0u32..3, 0.1f64..1.0, 0.0f64..8.0, 0.0f64..8.0), 1..60), cuts in prop::collection::vec(0usize..60, 0..6)) {
        let g = Grid::from_config(Vec3::zero(), 8.0, 8.0, 1.0, None).unwrap();
        let table = LookupTable::uniform(8, 4, 1e-3).unwrap();
        let mut clock = [0.0f64; 3];
        let stream: Vec<Viewpoint> = steps.iter().map(|&(a, dt, x, y)| {
            clock[a as usize] += dt;
            Viewpoint { pose: SensorPose::at(Vec3::new(x, y, 2.0)), timestamp: clock[a as usize], agent_id: a }
        }).collect();
        let mut whole = Sensitivity::zeros(g.len());
        whole.update(&stream, &g, 0.01, &table, 0.5).unwrap();
        let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c.min(stream.len())).collect();
        cuts.push(0);
        cuts.push(stream.len());
        cuts.sort_unstable();
        let mut parts = Sensitivity::zeros(g.len());
        for w in cuts.windows(2) {
            parts.update(&stream[w[0]..w[1]], &g, 0.01, &table, 0.5).unwrap();
        }
        prop_assert_eq!(whole.values(), parts.values());
    }

    #[test]
    fn noiseless_cones_contain_the_source(sx in -20.0f64..20.0, sy in -20.0f64..20.0, yaw in -3.0f64..3.0, seed in any::<u64>()) {
        use rand::SeedableRng;
        let source = Vec3::new(sx, sy, 0.0);
        let pose = SensorPose::with_yaw(Vec3::new(0.5, -0.3, 2.0), yaw);
        let noise = NoiseSpec { sigma: 0.0, p_amb: 0.0, background_rate: 0.0, ..NoiseSpec::default() };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (cone, spurious) = synthesize_cone(source, &pose, 0.0, 0, &noise, &mut rng).unwrap();
        prop_assert!(spurious.is_none());
        let dir = (source - pose.position).normalized().unwrap();
        prop_assert!((cone.axis.angle_to(dir) - cone.opening_angle).abs() < 1e-9);
        prop_assert!(polar_angles(&pose, source).is_ok());
    }

    #[test]
    fn agents_respect_max_speed(path in prop::collection::vec((0.0f64..30.0, 0.0f64..30.0), 1..8), speed in 0.5f64..10.0, dt in 0.05f64..2.0) {
        let mut agent = AgentState::new(0, SensorPose::at(Vec3::new(0.0, 0.0, 2.0)), speed, 2.0);
        agent.set_path(path.iter().map(|&(x, y)| Vec3::new(x, y, 2.0)).collect());
        for _ in 0..100 {
            let next = advance_agent(&agent, dt);
            prop_assert!(next.position().distance(agent.position()) / dt <= speed + 1e-9);
            agent = next;
        }
    }

    #[test]
    fn waypoints_are_tagged_cell_centers(lambda in prop::collection::vec(0.0f64..1.0, 100), s in prop::collection::vec(0.0f64..3.0, 100), seed in any::<u64>()) {
        let g = Grid::from_config(Vec3::zero(), 10.0, 10.0, 1.0, None).unwrap();
        let cfg = StrategyConfig { s_min: 1.0, s_max: 2.0, ..StrategyConfig::default() };
        let set = generate_waypoints(&lambda, &s, &g, &cfg, &[], 0.0, seed);
        let mut seen = std::collections::HashSet::new();
        for w in &set.waypoints {
            prop_assert_eq!(g.centers()[w.cell], w.position);
            prop_assert!(seen.insert(w.cell), "cell {} listed twice", w.cell);
            if w.kind == WaypointKind::Explore {
                prop_assert!(s[w.cell] < cfg.s_min);
            } else {
                prop_assert!(s[w.cell] < cfg.s_max);
            }
        }
    }

    #[test]
    fn plans_are_conflict_free(side in 3usize..10, starts in prop::collection::vec(0usize..100, 3), goals in prop::collection::vec(prop::collection::vec(0usize..100, 0..5), 3)) {
        let g = Grid::from_config(Vec3::zero(), side as f64, side as f64, 1.0, None).unwrap();
        let mut st: Vec<usize> = Vec::new();
        for s in starts {
            let mut c = s % g.len();
            while st.contains(&c) {
                c = (c + 1) % g.len();
            }
            st.push(c);
        }
        let seqs: Vec<Vec<usize>> = goals.iter().map(|q| q.iter().map(|c| c % g.len()).collect()).collect();
        let plan = plan_paths(&g, &st, &seqs);
        prop_assert!(find_conflicts(&plan).is_empty());
        for (a, p) in plan.paths.iter().enumerate() {
            prop_assert_eq!(p[0], st[a]);
            prop_assert!(p.windows(2).all(|w| g.chebyshev(w[0], w[1]) <= 1));
        }
    }
}
