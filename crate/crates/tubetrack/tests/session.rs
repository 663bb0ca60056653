use std::time::Instant;

use tubetrack::core::eval::{accuracy, generate_scene, SceneKind, SceneSpec, SyntheticScene};
use tubetrack::core::{GrayImage, MetricKind, PipelineConfig, Pixel, Weighting};
use tubetrack::{Error, Session};

const FSR: Weighting = Weighting::Geodesic(MetricKind::Fsr);
const FE: Weighting = Weighting::Geodesic(MetricKind::Fe);

fn small_line(seed: u64) -> SyntheticScene {
    let mut spec = SceneSpec::new(SceneKind::Line, seed);
    spec.width = 200;
    spec.height = 140;
    generate_scene(&spec).unwrap()
}

fn scene_config() -> PipelineConfig {
    PipelineConfig {
        threshold_quantile: 0.9,
        ..PipelineConfig::default()
    }
}

#[test]
fn cache_hit_reports_cached_and_tracks_identically() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small_line(3);
    let cfg = scene_config();
    let st = &sc.structures[0];
    let seeds = [st.seeds.0, st.seeds.1];

    let (fresh, s1) = Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    assert!(!s1.features_cached && !s1.graph_cached);
    let (cached, s2) = Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    assert!(s2.features_cached && s2.graph_cached);
    assert_eq!(fresh.id(), cached.id());

    let a = fresh.track(&seeds, FSR).unwrap();
    let b = cached.track(&seeds, FSR).unwrap();
    assert_eq!(a.path, b.path);
    let ja = serde_json::to_string(&a.path).unwrap();
    let jb = serde_json::to_string(&b.path).unwrap();
    assert_eq!(ja, jb);
    assert!(accuracy(&a.path.polyline, &st.mask).unwrap().j > 0.9);
}

#[test]
fn changing_beta_invalidates_the_graph_only() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small_line(4);
    let cfg = scene_config();
    Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    let mut other = cfg.clone();
    other.beta = 40.0;
    let (s, stats) = Session::prepare(sc.image.clone(), &other, Some(dir.path())).unwrap();
    assert!(stats.features_cached);
    assert!(!stats.graph_cached);
    let (s0, _) = Session::prepare(sc.image.clone(), &cfg, None).unwrap();
    assert_ne!(s.id(), s0.id());
}

#[test]
fn corrupt_cache_files_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small_line(5);
    let cfg = scene_config();
    Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() / 3]).unwrap();
    }
    let (_, stats) = Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    assert!(!stats.features_cached && !stats.graph_cached);
    let (_, stats) = Session::prepare(sc.image, &cfg, Some(dir.path())).unwrap();
    assert!(stats.features_cached && stats.graph_cached);
}

#[test]
fn full_size_cache_hit_is_ten_times_faster() {
    let dir = tempfile::tempdir().unwrap();
    let sc = generate_scene(&SceneSpec::new(SceneKind::CrossingPair, 1)).unwrap();
    let cfg = scene_config();
    let t = Instant::now();
    Session::prepare(sc.image.clone(), &cfg, Some(dir.path())).unwrap();
    let miss = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let (_, stats) = Session::prepare(sc.image, &cfg, Some(dir.path())).unwrap();
    let hit = t.elapsed().as_secs_f64();
    assert!(stats.graph_cached);
    assert!(hit * 10.0 <= miss, "miss {miss:.2}s, hit {hit:.2}s");
}

#[test]
fn three_seeds_concatenate_two_legs() {
    let sc = small_line(6);
    let (s, _) = Session::prepare(sc.image.clone(), &scene_config(), None).unwrap();
    let st = &sc.structures[0];
    let c = &st.centerline;
    let mid = c[c.len() / 2];
    let mid = Pixel::new(mid.0.round() as i32, mid.1.round() as i32);
    let whole = s.track(&[st.seeds.0, mid, st.seeds.1], FE).unwrap();
    let first = s.track(&[st.seeds.0, mid], FE).unwrap();
    let second = s.track(&[mid, st.seeds.1], FE).unwrap();
    assert_eq!(whole.legs.len(), 2);
    assert_eq!(whole.legs[0].nodes, first.legs[0].nodes);
    assert_eq!(whole.legs[1].nodes, second.legs[0].nodes);
    assert_eq!(
        whole.path.polyline.len(),
        first.path.polyline.len() + second.path.polyline.len() - 1
    );
    assert_eq!(whole.path.polyline.first(), first.path.polyline.first());
    assert_eq!(whole.path.polyline.last(), second.path.polyline.last());
}

#[test]
fn seeds_on_trajectory_ends_recover_that_trajectory() {
    let sc = small_line(7);
    let (s, _) = Session::prepare(sc.image, &scene_config(), None).unwrap();
    let traj = s
        .extraction()
        .trajectories
        .iter()
        .max_by_key(|t| t.points.len())
        .unwrap()
        .clone();
    let (a, b) = (traj.points[0], *traj.points.last().unwrap());
    let r = s.track(&[a, b], FSR).unwrap();
    let p = &r.path.polyline;
    assert_eq!(p.first().copied(), Some((a.x as f64, a.y as f64)));
    assert_eq!(p.last().copied(), Some((b.x as f64, b.y as f64)));
    // every traced point stays on the trajectory
    for &(x, y) in p {
        let near = traj
            .points
            .iter()
            .any(|q| (q.x as f64 - x).abs() <= 1.0 && (q.y as f64 - y).abs() <= 1.0);
        assert!(near, "({x}, {y}) left the trajectory");
    }
}

#[test]
fn blank_image_has_no_route() {
    let img = GrayImage::new(96, 64, vec![0.5; 96 * 64]).unwrap();
    let (s, _) = Session::prepare(img, &PipelineConfig::default(), None).unwrap();
    assert!(s.extraction().trajectories.is_empty());
    let err = s
        .track(&[Pixel::new(10, 10), Pixel::new(80, 50)], FSR)
        .unwrap_err();
    assert_eq!(err.code(), "no_route");
    match err {
        Error::NoRoute { nearest, .. } => {
            assert_eq!(nearest.len(), 2);
            assert!(nearest.iter().all(|n| n.trajectories.is_empty()));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn seeds_outside_the_image_are_rejected() {
    let sc = small_line(8);
    let (s, _) = Session::prepare(sc.image, &scene_config(), None).unwrap();
    let err = s
        .track(&[Pixel::new(-1, 3), Pixel::new(5, 5)], FSR)
        .unwrap_err();
    assert_eq!(err.code(), "invalid_input");
}
