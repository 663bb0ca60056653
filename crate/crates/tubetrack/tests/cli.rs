use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tubetrack::bench::persist_scene;
use tubetrack::core::eval::{generate_scene, SceneKind, SceneSpec};

fn tubetrack(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_tubetrack"))
        .args(args)
        .output()
        .expect("binary runs");
    out
}

fn ok(args: &[&str]) -> String {
    let out = tubetrack(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn small_scene(dir: &Path) -> Value {
    let mut spec = SceneSpec::new(SceneKind::Line, 21);
    spec.width = 200;
    spec.height = 140;
    persist_scene(dir, &generate_scene(&spec).unwrap()).unwrap();
    serde_json::from_str(&std::fs::read_to_string(dir.join("gt.json")).unwrap()).unwrap()
}

#[test]
fn prepare_track_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gt = small_scene(d);
    let cfg = d.join("cfg.toml");
    std::fs::write(&cfg, "threshold_quantile = 0.9\n").unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (image, cache, cfg) = (s(&d.join("scene.png")), s(&d.join("cache")), s(&cfg));

    let first: Value = serde_json::from_str(&ok(&[
        "prepare", "--image", &image, "--config", &cfg, "--cache", &cache,
        "--trajectories", &s(&d.join("traj.json")),
    ]))
    .unwrap();
    assert_eq!(first["graph_cached"], false);
    let second: Value =
        serde_json::from_str(&ok(&["prepare", "--image", &image, "--config", &cfg, "--cache", &cache])).unwrap();
    assert_eq!(second["graph_cached"], true);
    assert_eq!(first["session_id"], second["session_id"]);
    let traj: Value = serde_json::from_str(&std::fs::read_to_string(d.join("traj.json")).unwrap()).unwrap();
    assert_eq!(traj["trajectories"].as_array().unwrap().len() as u64, first["trajectories"].as_u64().unwrap());

    let seeds = &gt["structures"][0]["seeds"];
    let points = format!("{},{};{},{}", seeds[0][0], seeds[0][1], seeds[1][0], seeds[1][1]);
    let out_a = s(&d.join("a.json"));
    let out_b = s(&d.join("b.json"));
    ok(&["track", "--image", &image, "--config", &cfg, "--cache", &cache, "--points", &points, "--out", &out_a]);
    ok(&["track", "--image", &image, "--config", &cfg, "--points", &points, "--out", &out_b]);
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());

    let score: Value =
        serde_json::from_str(&ok(&["eval", "--path", &out_a, "--gt", &s(&d.join("gt_0.png"))])).unwrap();
    assert!(score["j"].as_f64().unwrap() > 0.9, "{score}");
}

#[test]
fn bench_writes_csv_rows_per_model() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let md = dir.path().join("bench.md");
    ok(&[
        "bench", "--scene", "line", "--seed", "2",
        "--report", csv.to_str().unwrap(), "--summary", md.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scene,model,J,seconds");
    assert_eq!(lines.len(), 4);
    for (line, model) in lines[1..].iter().zip(["group-fsr", "group-fe", "group-angle"]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], "line-2");
        assert_eq!(cols[1], model);
        let j: f64 = cols[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&j));
    }
    assert!(std::fs::read_to_string(&md).unwrap().starts_with("| scene | model |"));
}

#[test]
fn bad_input_fails_with_a_message() {
    let out = tubetrack(&["track", "--image", "/nonexistent.png", "--points", "1,2;3,4"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
    let out = tubetrack(&["track", "--image", "/nonexistent.png", "--points", "1,2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("two points"));
    let out = tubetrack(&["bench", "--scene", "maze"]);
    assert!(!out.status.success());
}
