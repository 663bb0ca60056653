use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::config::{PipelineConfig, Weighting};
use crate::error::{Error, Result};
use crate::extract::{segment_tubularity, skeletonize, split_trajectories, Trajectory};
use crate::features::TubularFeatures;
use crate::geodesic::{LiftedGrid, LiftedMetric, MetricKind};
use crate::graph::{
    attach_seeds, candidate_pairs, geodesic_edge, recover_path, shortest_sequence, straight_edge,
    Edge, NodeShape, SeedNode, TrackedPath, TrajectoryGraph,
};
use crate::image::{GrayImage, Pixel};

/// Everything the offline stage derives from the image before edges are
/// priced: features, trajectories and their node shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub config: PipelineConfig,
    pub features: TubularFeatures,
    /// Vessel-score threshold; `None` for a blank score map.
    pub threshold: Option<f32>,
    pub trajectories: Vec<Trajectory>,
    pub shapes: Vec<NodeShape>,
}

impl Extraction {
    pub fn run(image: &GrayImage, config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let features = TubularFeatures::compute(image, &config.feature_params())?;
        Self::from_features(features, config)
    }

    /// Recomputes trajectories and shapes from cached features.
    pub fn from_features(features: TubularFeatures, config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        if features.n_theta() != config.n_theta {
            return Err(Error::config("feature field and config disagree on n_theta"));
        }
        let (w, h) = (features.width(), features.height());
        let seg = segment_tubularity(features.zeta(), w, h, config.threshold_quantile)?;
        let trajectories = if seg.is_empty() {
            Vec::new()
        } else {
            split_trajectories(&skeletonize(&seg.mask), config.min_len)
        };
        let shapes = trajectories
            .iter()
            .map(|t| NodeShape::trajectory(t, &features, config.prolong_len, config.tau))
            .collect();
        Ok(Extraction {
            config: config.clone(),
            threshold: seg.threshold,
            features,
            trajectories,
            shapes,
        })
    }

    pub fn grid(&self) -> LiftedGrid {
        LiftedGrid::new(self.features.width(), self.features.height(), self.features.n_theta())
            .expect("feature dimensions were validated")
    }

    pub fn metric(&self, kind: MetricKind) -> Result<LiftedMetric<'_>> {
        LiftedMetric::new(self.grid(), self.config.metric_params_for(kind), self.features.cost())
    }

    pub fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        candidate_pairs(&self.shapes)
    }

    /// Prices one edge between arbitrary node shapes.
    pub fn edge_between(
        &self,
        metric: Option<&LiftedMetric<'_>>,
        weighting: Weighting,
        i: usize,
        si: &NodeShape,
        j: usize,
        sj: &NodeShape,
    ) -> Result<Option<Edge>> {
        match weighting {
            Weighting::GroupAngle => straight_edge(self.config.angle_weight, i, si, j, sj).map(Some),
            Weighting::Geodesic(_) => {
                let metric = metric.ok_or_else(|| Error::config("geodesic weighting needs a metric"))?;
                geodesic_edge(
                    metric,
                    &self.config.march_options(),
                    self.config.bridge_margin,
                    i,
                    si,
                    j,
                    sj,
                )
            }
        }
    }

    pub fn metric_for(&self, weighting: Weighting) -> Result<Option<LiftedMetric<'_>>> {
        match weighting {
            Weighting::Geodesic(kind) => self.metric(kind).map(Some),
            Weighting::GroupAngle => Ok(None),
        }
    }

    /// Prices the trajectory pair `(i, j)`.
    pub fn edge(
        &self,
        metric: Option<&LiftedMetric<'_>>,
        weighting: Weighting,
        i: usize,
        j: usize,
    ) -> Result<Option<Edge>> {
        self.edge_between(metric, weighting, i, &self.shapes[i], j, &self.shapes[j])
    }

    /// Assembles a graph from already priced edges.
    pub fn graph_from_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Result<TrajectoryGraph> {
        TrajectoryGraph::new(
            self.trajectories.iter().map(|t| t.points.clone()).collect(),
            edges,
        )
    }

    /// Prices every adjacent pair sequentially.
    pub fn build_graph(&self, weighting: Weighting) -> Result<TrajectoryGraph> {
        let metric = self.metric_for(weighting)?;
        let mut edges = Vec::new();
        for (i, j) in self.candidate_pairs() {
            if let Some(e) = self.edge(metric.as_ref(), weighting, i, j)? {
                edges.push(e);
            }
        }
        self.graph_from_edges(edges)
    }
}

/// One seed-to-seed query of a track request.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Leg {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackResult {
    pub path: TrackedPath,
    pub seeds: Vec<SeedNode>,
    pub legs: Vec<Leg>,
}

/// A prepared graph ready to answer track requests. Immutable; requests
/// borrow it read-only.
#[derive(Debug, Clone)]
pub struct TrackingModel {
    extraction: Arc<Extraction>,
    weighting: Weighting,
    graph: TrajectoryGraph,
}

impl TrackingModel {
    /// Runs the whole offline stage sequentially with the configured metric.
    pub fn build(image: &GrayImage, config: &PipelineConfig) -> Result<Self> {
        let extraction = Arc::new(Extraction::run(image, config)?);
        let weighting = config.weighting();
        let graph = extraction.build_graph(weighting)?;
        Self::new(extraction, weighting, graph)
    }

    pub fn new(extraction: Arc<Extraction>, weighting: Weighting, graph: TrajectoryGraph) -> Result<Self> {
        if graph.node_count() != extraction.shapes.len() {
            return Err(Error::input("graph does not match the extracted trajectories"));
        }
        Ok(TrackingModel {
            extraction,
            weighting,
            graph,
        })
    }

    pub fn extraction(&self) -> &Arc<Extraction> {
        &self.extraction
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn graph(&self) -> &TrajectoryGraph {
        &self.graph
    }

    /// Traces the centerline through `seeds` in order. Consecutive seeds are
    /// solved as independent queries and the pieces concatenated.
    pub fn track(&self, seeds: &[Pixel]) -> Result<TrackResult> {
        if seeds.len() < 2 {
            return Err(Error::input("tracking needs at least two seeds"));
        }
        let ex = &*self.extraction;
        let metric = ex.metric_for(self.weighting)?;
        let sg = attach_seeds(
            &self.graph,
            &ex.shapes,
            seeds,
            &ex.features,
            ex.config.tau,
            |a, sa, b, sb| ex.edge_between(metric.as_ref(), self.weighting, a, sa, b, sb),
        )?;
        let mut path = TrackedPath::default();
        let mut legs = Vec::with_capacity(seeds.len() - 1);
        for k in 0..seeds.len() - 1 {
            let (s, t) = (&sg.seeds()[k], &sg.seeds()[k + 1]);
            let (nodes, cost) = if s.node == t.node {
                (alloc::vec![s.node], 0.0)
            } else {
                let r = shortest_sequence(&sg, s.node, t.node)?;
                (r.nodes, r.cost)
            };
            let piece = recover_path(&sg, &nodes, s.pixel, t.pixel)?;
            legs.push(Leg {
                weights: piece.weights.clone(),
                nodes,
                cost,
            });
            path.extend(&piece);
        }
        Ok(TrackResult {
            path,
            seeds: sg.seeds().to_vec(),
            legs,
        })
    }
}
