//! Prepared sessions: the offline stage with an on-disk cache, and the
//! interactive tracking queries run against it.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use tubetrack_core::graph::{SeedNode, TrackedPath, TrajectoryGraph};
use tubetrack_core::pipeline::{Extraction, Leg};
use tubetrack_core::{GrayImage, MetricKind, PipelineConfig, Pixel, TrackingModel, Weighting};

use crate::config::{feature_key, graph_key, image_hash};
use crate::container::{graph_from_bytes, graph_to_bytes, FieldFile};
use crate::error::{Error, NearestTrajectories, Result};

pub const WEIGHTINGS: [Weighting; 3] = [
    Weighting::Geodesic(MetricKind::Fsr),
    Weighting::Geodesic(MetricKind::Fe),
    Weighting::GroupAngle,
];

fn slot(w: Weighting) -> usize {
    WEIGHTINGS.iter().position(|&x| x == w).unwrap()
}

/// What the offline stage reused from the cache.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrepareStats {
    pub features_cached: bool,
    pub graph_cached: bool,
    pub seconds: f64,
}

/// Image, configuration and the derived extraction, plus the priced graphs
/// built so far. Graphs other than the configured one are priced on first
/// use; each is built at most once and never changes afterwards.
#[derive(Debug)]
pub struct Session {
    id: String,
    image_hash: [u8; 32],
    config: PipelineConfig,
    image: GrayImage,
    extraction: Arc<Extraction>,
    cache_dir: Option<PathBuf>,
    models: [Mutex<Option<Arc<TrackingModel>>>; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackReport {
    pub metric: &'static str,
    pub path: TrackedPath,
    pub seeds: Vec<SeedNode>,
    pub legs: Vec<Leg>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDoc {
    pub id: usize,
    pub points: Vec<[i32; 2]>,
}

/// Trajectory export with the extraction parameters it depends on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoriesDoc {
    pub trajectories: Vec<TrajectoryDoc>,
    pub threshold_quantile: f64,
    pub threshold: Option<f32>,
    pub min_len: usize,
    pub prolong_len: usize,
    pub tau: f64,
}

/// Session id for an image and configuration.
pub fn session_id(image_hash: &[u8; 32], cfg: &PipelineConfig) -> String {
    hex::encode(&graph_key(image_hash, cfg, cfg.weighting())[..12])
}

impl Session {
    /// Runs the offline stage for the configured metric, reusing cached
    /// features and graph from `cache_dir` when their keys match.
    pub fn prepare(image: GrayImage, config: &PipelineConfig, cache_dir: Option<&Path>) -> Result<(Self, PrepareStats)> {
        let start = Instant::now();
        config.validate()?;
        if let Some(dir) = cache_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let ih = image_hash(&image);
        let fkey = feature_key(&ih, config);
        let fpath = cache_dir.map(|d| d.join(format!("{}.tff", hex::encode(fkey))));
        let cached = fpath.as_deref().and_then(load_features);
        let features_cached = cached.is_some();
        let features = match cached {
            Some(f) => f,
            None => {
                let f = tubetrack_core::features::TubularFeatures::compute(&image, &config.feature_params())?;
                if let Some(p) = &fpath {
                    write_atomic(p, &FieldFile::from_features(&f).to_bytes())?;
                }
                f
            }
        };
        let extraction = Arc::new(Extraction::from_features(features, config)?);
        let session = Session {
            id: session_id(&ih, config),
            image_hash: ih,
            config: config.clone(),
            image,
            extraction,
            cache_dir: cache_dir.map(Path::to_path_buf),
            models: Default::default(),
        };
        let (_, graph_cached) = session.model_with_origin(config.weighting())?;
        Ok((
            session,
            PrepareStats {
                features_cached,
                graph_cached,
                seconds: start.elapsed().as_secs_f64(),
            },
        ))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn image_hash(&self) -> &[u8; 32] {
        &self.image_hash
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn image(&self) -> &GrayImage {
        &self.image
    }

    pub fn extraction(&self) -> &Arc<Extraction> {
        &self.extraction
    }

    /// The tracking model for `weighting`, pricing its graph on first use.
    pub fn model(&self, weighting: Weighting) -> Result<Arc<TrackingModel>> {
        self.model_with_origin(weighting).map(|(m, _)| m)
    }

    fn model_with_origin(&self, weighting: Weighting) -> Result<(Arc<TrackingModel>, bool)> {
        let mut guard = self.models[slot(weighting)].lock().unwrap_or_else(|e| e.into_inner());
        if let Some(m) = guard.as_ref() {
            return Ok((m.clone(), true));
        }
        let key = graph_key(&self.image_hash, &self.config, weighting);
        let path = self
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("{}.tgr", hex::encode(key))));
        let cached = path
            .as_deref()
            .and_then(|p| load_graph(p, &key, &self.extraction));
        let from_cache = cached.is_some();
        let graph = match cached {
            Some(g) => g,
            None => {
                let g = build_graph_parallel(&self.extraction, weighting)?;
                if let Some(p) = &path {
                    write_atomic(p, &graph_to_bytes(&g, &key))?;
                }
                g
            }
        };
        let model = Arc::new(TrackingModel::new(self.extraction.clone(), weighting, graph)?);
        *guard = Some(model.clone());
        Ok((model, from_cache))
    }

    /// Traces the centerline through `seeds` in order.
    pub fn track(&self, seeds: &[Pixel], weighting: Weighting) -> Result<TrackReport> {
        for s in seeds {
            if !self.image.contains(*s) {
                return Err(Error::Request(format!(
                    "seed ({}, {}) lies outside the {}x{} image",
                    s.x,
                    s.y,
                    self.image.width(),
                    self.image.height()
                )));
            }
        }
        let model = self.model(weighting)?;
        let start = Instant::now();
        match model.track(seeds) {
            Ok(r) => Ok(TrackReport {
                metric: weighting.name(),
                path: r.path,
                seeds: r.seeds,
                legs: r.legs,
                seconds: start.elapsed().as_secs_f64(),
            }),
            Err(e @ tubetrack_core::Error::NoRoute { .. }) => Err(Error::NoRoute {
                source: e,
                nearest: seeds.iter().map(|&s| self.nearest_trajectories(s, 3)).collect(),
            }),
            Err(e) => Err(e.into()),
        }
    }

    fn nearest_trajectories(&self, seed: Pixel, k: usize) -> NearestTrajectories {
        let mut d: Vec<(usize, f64)> = self
            .extraction
            .trajectories
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let best = t.points.iter().map(|p| p.dist2(seed)).min().unwrap_or(i64::MAX);
                (i, (best as f64).sqrt())
            })
            .collect();
        d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        d.truncate(k);
        NearestTrajectories {
            seed: [seed.x, seed.y],
            trajectories: d,
        }
    }

    pub fn trajectories_doc(&self) -> TrajectoriesDoc {
        let ex = &self.extraction;
        TrajectoriesDoc {
            trajectories: ex
                .trajectories
                .iter()
                .enumerate()
                .map(|(id, t)| TrajectoryDoc {
                    id,
                    points: t.points.iter().map(|p| [p.x, p.y]).collect(),
                })
                .collect(),
            threshold_quantile: ex.config.threshold_quantile,
            threshold: ex.threshold,
            min_len: ex.config.min_len,
            prolong_len: ex.config.prolong_len,
            tau: ex.config.tau,
        }
    }
}

/// Prices every adjacent pair, farming the bridges out over the rayon pool.
pub fn build_graph_parallel(ex: &Extraction, weighting: Weighting) -> Result<TrajectoryGraph> {
    let metric = ex.metric_for(weighting)?;
    let pairs = ex.candidate_pairs();
    let edges: Vec<_> = pairs
        .par_iter()
        .map(|&(i, j)| ex.edge(metric.as_ref(), weighting, i, j))
        .collect::<std::result::Result<_, _>>()?;
    Ok(ex.graph_from_edges(edges.into_iter().flatten())?)
}

fn load_features(path: &Path) -> Option<tubetrack_core::features::TubularFeatures> {
    let bytes = std::fs::read(path).ok()?;
    match FieldFile::from_bytes(&bytes).and_then(FieldFile::into_features) {
        Ok(f) => Some(f),
        Err(e) => {
            tracing::warn!(path = %path.display(), error = %e, "ignoring unreadable feature cache");
            None
        }
    }
}

fn load_graph(path: &Path, key: &[u8; 32], ex: &Extraction) -> Option<TrajectoryGraph> {
    let bytes = std::fs::read(path).ok()?;
    match graph_from_bytes(&bytes) {
        Ok((g, k)) if &k == key && nodes_match(&g, ex) => Some(g),
        Ok(_) => {
            tracing::warn!(path = %path.display(), "graph cache does not match; rebuilding");
            None
        }
        Err(e) => {
            tracing::warn!(path = %path.display(), error = %e, "ignoring unreadable graph cache");
            None
        }
    }
}

fn nodes_match(g: &TrajectoryGraph, ex: &Extraction) -> bool {
    g.node_count() == ex.trajectories.len()
        && g.nodes().iter().zip(&ex.trajectories).all(|(n, t)| n == &t.points)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
