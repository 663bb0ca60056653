//! Model comparison on synthetic scenes.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use tubetrack_core::eval::{accuracy, SyntheticScene};
use tubetrack_core::pipeline::Extraction;
use tubetrack_core::{PipelineConfig, Pixel, TrackingModel, Weighting};

use crate::error::{Error, Result};
use crate::io::{write_mask, write_png16};
use crate::session::{build_graph_parallel, WEIGHTINGS};

/// Vessel-score quantile used for the synthetic scenes. Their background
/// noise produces so many spurious ridges that the general default keeps
/// far too many of them.
pub const SCENE_QUANTILE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scene: String,
    pub model: String,
    #[serde(rename = "J")]
    pub j: f64,
    pub seconds: f64,
    #[serde(skip)]
    pub note: Option<String>,
}

/// Runs every weighting on one shared extraction and scores the path
/// between `seeds` against the mask of structure `target`. Failures score
/// zero and keep the error as a note.
pub fn compare_models(
    name: &str,
    scene: &SyntheticScene,
    target: usize,
    seeds: &[Pixel],
    config: &PipelineConfig,
) -> Result<Vec<BenchRow>> {
    let st = scene
        .structures
        .get(target)
        .ok_or_else(|| Error::Request(format!("scene has no structure {target}")))?;
    let start = Instant::now();
    let extraction = Arc::new(Extraction::run(&scene.image, config)?);
    let shared = start.elapsed().as_secs_f64();
    let mut rows = Vec::new();
    for w in WEIGHTINGS {
        let t = Instant::now();
        let outcome = run_one(&extraction, w, seeds).and_then(|poly| Ok(accuracy(&poly, &st.mask)?.j));
        let seconds = shared + t.elapsed().as_secs_f64();
        let (j, note) = match outcome {
            Ok(j) => (j, None),
            Err(e) => (0.0, Some(e.detail())),
        };
        rows.push(BenchRow {
            scene: name.to_string(),
            model: w.name().to_string(),
            j,
            seconds,
            note,
        });
    }
    Ok(rows)
}

fn run_one(ex: &Arc<Extraction>, w: Weighting, seeds: &[Pixel]) -> Result<Vec<(f64, f64)>> {
    let graph = build_graph_parallel(ex, w)?;
    let model = TrackingModel::new(ex.clone(), w, graph)?;
    Ok(model.track(seeds)?.path.polyline)
}

pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(file, rows).map_err(|e| Error::io(path, std::io::Error::other(e)))
}

pub fn write_csv_to<W: std::io::Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn markdown_summary(rows: &[BenchRow]) -> String {
    let mut s = String::from("| scene | model | J | seconds |\n|---|---|---:|---:|\n");
    for r in rows {
        let _ = writeln!(s, "| {} | {} | {:.4} | {:.2} |", r.scene, r.model, r.j, r.seconds);
    }
    let notes: Vec<&BenchRow> = rows.iter().filter(|r| r.note.is_some()).collect();
    if !notes.is_empty() {
        s.push_str("\nErrors (scored as J = 0):\n\n");
        for r in notes {
            let _ = writeln!(s, "- {} / {}: {}", r.scene, r.model, r.note.as_deref().unwrap());
        }
    }
    s.push_str(
        "\ngroup-angle is a simplified straight-segment stand-in \
         (length times one plus the endpoint angles), not a reimplementation \
         of a published grouping model.\n",
    );
    s
}

#[derive(Serialize)]
struct GtDoc<'a> {
    kind: &'static str,
    seed: u64,
    width: usize,
    height: usize,
    noise: f64,
    structures: Vec<GtStructure<'a>>,
}

#[derive(Serialize)]
struct GtStructure<'a> {
    width: f64,
    seeds: [[i32; 2]; 2],
    mask: String,
    centerline: &'a [(f64, f64)],
}

/// Writes `scene.png`, one `gt_<k>.png` mask per structure and `gt.json`.
pub fn persist_scene(dir: &Path, scene: &SyntheticScene) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_png16(&dir.join("scene.png"), &scene.image)?;
    let mut structures = Vec::new();
    for (k, st) in scene.structures.iter().enumerate() {
        let name = format!("gt_{k}.png");
        write_mask(&dir.join(&name), &st.mask)?;
        structures.push(GtStructure {
            width: st.width,
            seeds: [[st.seeds.0.x, st.seeds.0.y], [st.seeds.1.x, st.seeds.1.y]],
            mask: name,
            centerline: &st.centerline,
        });
    }
    let doc = GtDoc {
        kind: scene.spec.kind.name(),
        seed: scene.spec.seed,
        width: scene.spec.width,
        height: scene.spec.height,
        noise: scene.spec.noise,
        structures,
    };
    let path = dir.join("gt.json");
    let text = serde_json::to_string_pretty(&doc).expect("ground truth serializes");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_the_four_columns() {
        let rows = vec![BenchRow {
            scene: "s".into(),
            model: "group-fsr".into(),
            j: 1.0,
            seconds: 0.5,
            note: Some("x".into()),
        }];
        let mut out = Vec::new();
        write_csv_to(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "scene,model,J,seconds\ns,group-fsr,1.0,0.5\n");
        assert!(markdown_summary(&rows).contains("- s / group-fsr: x"));
    }
}
