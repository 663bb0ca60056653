//! Fast marching against a dense-graph Dijkstra written from scratch over
//! the same stencil edges, and closed-form checks of the metric.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubetrack_core::geodesic::{
    backtrack, fast_march, metric_eval, path_cost, LiftedGrid, LiftedMetric, LiftedPoint,
    MarchOptions, MetricKind, MetricParams, STENCIL,
};

#[derive(PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Plain Dijkstra over the full lifted grid. Edge prices are recomputed from
/// the closed-form metric at both endpoints, independent of the tabulated
/// values used by the marcher.
fn dijkstra(w: usize, h: usize, n: usize, cost: &[f32], params: &MetricParams, src: (i32, i32, usize)) -> Vec<f64> {
    let idx = |x: i32, y: i32, k: usize| (y as usize * w + x as usize) * n + k;
    let h2 = 2.0 * PI / n as f64;
    let mut dist = vec![f64::INFINITY; w * h * n];
    let mut heap = BinaryHeap::new();
    dist[idx(src.0, src.1, src.2)] = 0.0;
    heap.push(Reverse((Key(0.0), src)));
    while let Some(Reverse((Key(d), (x, y, k)))) = heap.pop() {
        if d > dist[idx(x, y, k)] {
            continue;
        }
        for off in STENCIL.iter() {
            let (qx, qy) = (x + off.dx, y + off.dy);
            if qx < 0 || qy < 0 || qx >= w as i32 || qy >= h as i32 {
                continue;
            }
            let qk = (k as i32 + off.dk).rem_euclid(n as i32) as usize;
            let u = (off.dx as f64, off.dy as f64);
            let nu = off.dk as f64 * h2;
            let cp = cost[idx(x, y, k)] as f64;
            let cq = cost[idx(qx, qy, qk)] as f64;
            let len = 0.5
                * (metric_eval(params, cp, k as f64 * h2, u, nu).unwrap()
                    + metric_eval(params, cq, qk as f64 * h2, u, nu).unwrap());
            let nd = d + len;
            if nd < dist[idx(qx, qy, qk)] {
                dist[idx(qx, qy, qk)] = nd;
                heap.push(Reverse((Key(nd), (qx, qy, qk))));
            }
        }
    }
    dist
}

#[test]
fn twenty_random_scenes_match_dijkstra() {
    let (w, h, n) = (16usize, 16usize, 8usize);
    let grid = LiftedGrid::new(w, h, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = std::time::Instant::now();
    for scene in 0..20 {
        let cost: Vec<f32> = (0..grid.len()).map(|_| rng.random_range(0.05f32..1.0)).collect();
        let kind = if scene % 2 == 0 { MetricKind::Fsr } else { MetricKind::Fe };
        let params = MetricParams::new(kind, 0.1, 20.0).unwrap();
        let src = (rng.random_range(0..w as i32), rng.random_range(0..h as i32), rng.random_range(0..n));
        let metric = LiftedMetric::new(grid, params, &cost).unwrap();
        let r = fast_march(&metric, &[LiftedPoint::new(src.0, src.1, src.2)], &[], &MarchOptions::default()).unwrap();
        let oracle = dijkstra(w, h, n, &cost, &params, src);
        for (i, &b) in oracle.iter().enumerate() {
            let p = grid.point(i);
            let a = r.u(p);
            assert!(
                (a - b).abs() <= 1e-6 * b.max(1e-12),
                "scene {scene} point {p:?}: march {a} oracle {b}"
            );
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "{:?}", start.elapsed());
}

#[test]
fn aligned_straight_line_on_a_large_grid() {
    let grid = LiftedGrid::new(64, 64, 16).unwrap();
    let cost = vec![1.0f32; grid.len()];
    let params = MetricParams::default();
    let metric = LiftedMetric::new(grid, params, &cost).unwrap();
    let s = LiftedPoint::new(20, 30, 0);
    let t = LiftedPoint::new(40, 30, 0);
    let r = fast_march(&metric, &[s], &[t], &MarchOptions::default()).unwrap();
    assert!((r.u(t) - 20.0).abs() <= 0.05 * 20.0, "{}", r.u(t));
    let oracle = dijkstra(64, 64, 16, &cost, &params, (20, 30, 0));
    assert!((oracle[grid.index(t)] - r.u(t)).abs() < 1e-9);
}

#[test]
fn backtracked_paths_reprice_to_u() {
    let grid = LiftedGrid::new(24, 24, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in [MetricKind::Fsr, MetricKind::Fe] {
        let cost: Vec<f32> = (0..grid.len()).map(|_| rng.random_range(0.1f32..1.0)).collect();
        let metric = LiftedMetric::new(grid, MetricParams::new(kind, 0.1, 20.0).unwrap(), &cost).unwrap();
        let s = LiftedPoint::new(3, 3, 0);
        let t = LiftedPoint::new(20, 17, 4);
        let r = fast_march(&metric, &[s], &[t], &MarchOptions::default()).unwrap();
        let path = backtrack(&r, t).unwrap();
        assert_eq!(path.nodes.first(), Some(&s));
        assert_eq!(path.nodes.last(), Some(&t));
        let c = path_cost(&metric, &path).unwrap();
        assert!((c - r.u(t)).abs() <= 0.02 * r.u(t), "{c} vs {}", r.u(t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_positively_homogeneous(
        theta in 0.0..(2.0 * PI),
        ux in -3.0..3.0f64,
        uy in -3.0..3.0f64,
        nu in -1.0..1.0f64,
        s in 0.01..10.0f64,
        fe in any::<bool>(),
    ) {
        prop_assume!(ux.abs() + uy.abs() + nu.abs() > 1e-6);
        let kind = if fe { MetricKind::Fe } else { MetricKind::Fsr };
        let p = MetricParams::new(kind, 0.1, 20.0).unwrap();
        let a = metric_eval(&p, 1.0, theta, (ux, uy), nu).unwrap();
        let b = metric_eval(&p, 1.0, theta, (s * ux, s * uy), s * nu).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((b - s * a).abs() <= 1e-9 * b.max(1.0));
    }

    #[test]
    fn forward_unit_step_is_cheapest(theta in 0.0..(2.0 * PI), phi in 0.0..(2.0 * PI), fe in any::<bool>()) {
        let kind = if fe { MetricKind::Fe } else { MetricKind::Fsr };
        let p = MetricParams::new(kind, 0.1, 20.0).unwrap();
        let aligned = metric_eval(&p, 1.0, theta, (theta.cos(), theta.sin()), 0.0).unwrap();
        let other = metric_eval(&p, 1.0, theta, (phi.cos(), phi.sin()), 0.0).unwrap();
        prop_assert!((aligned - 1.0).abs() < 1e-12);
        prop_assert!(other >= aligned - 1e-12);
    }

    #[test]
    fn march_distances_satisfy_triangle_inequality(seed in 0u64..1000) {
        let grid = LiftedGrid::new(10, 10, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cost: Vec<f32> = (0..grid.len()).map(|_| rng.random_range(0.1f32..1.0)).collect();
        let metric = LiftedMetric::new(grid, MetricParams::default(), &cost).unwrap();
        let s = LiftedPoint::new(rng.random_range(0..10), rng.random_range(0..10), rng.random_range(0..8));
        let r = fast_march(&metric, &[s], &[], &MarchOptions::default()).unwrap();
        for i in 0..grid.len() {
            let p = grid.point(i);
            for o in 0..STENCIL.len() {
                if let Some(q) = metric.step(p, o) {
                    prop_assert!(r.u(q) <= r.u(p) + metric.edge_cost(p, q, o) + 1e-9);
                }
            }
        }
    }
}
