use alloc::vec;
use alloc::vec::Vec;

use super::grid::LiftedPoint;
use super::march::MarchResult;
use super::metric::LiftedMetric;
use super::stencil::STENCIL;
use crate::error::{Error, Result};
use crate::math::{hypot, sqrt, wrap_angle, wrap_turn};

/// One sample of a lifted path: position and tangent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathSample {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Geodesic ordered from the source set to the query point.
///
/// `nodes` are the lifted grid points visited; `samples` resample the same
/// polyline so that consecutive positions are at most half a pixel apart.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeodesicPath {
    pub nodes: Vec<LiftedPoint>,
    pub samples: Vec<PathSample>,
}

const MAX_STEPS: usize = 100_000;
const STEP: f64 = 0.5;

impl GeodesicPath {
    /// Builds the path through `nodes` with angles in radians from `h2`.
    pub fn from_nodes(nodes: Vec<LiftedPoint>, h2: f64) -> Self {
        let mut samples = Vec::with_capacity(nodes.len() * 2);
        for (i, n) in nodes.iter().enumerate() {
            let cur = PathSample {
                x: n.x as f64,
                y: n.y as f64,
                theta: n.bin as f64 * h2,
            };
            if i > 0 {
                let prev = samples[samples.len() - 1];
                let PathSample { x, y, theta } = prev;
                let dtheta = wrap_angle(cur.theta - theta);
                let pieces = libm::ceil(hypot(cur.x - x, cur.y - y) / STEP).max(1.0) as usize;
                for s in 1..pieces {
                    let t = s as f64 / pieces as f64;
                    samples.push(PathSample {
                        x: x + t * (cur.x - x),
                        y: y + t * (cur.y - y),
                        theta: wrap_turn(theta + t * dtheta),
                    });
                }
            }
            samples.push(cur);
        }
        GeodesicPath { nodes, samples }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Spatial projection.
    pub fn polyline(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.x, s.y)).collect()
    }

    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.nodes.reverse();
        r.samples.reverse();
        r
    }

    /// Euclidean length of the spatial projection.
    pub fn spatial_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| hypot(w[1].x - w[0].x, w[1].y - w[0].y))
            .sum()
    }
}

/// Follows the upwind parent links from `start` down to the source set.
///
/// Each link is the stencil move realising `U(start) = U(parent) + cost`, so
/// the descent is strict; a non-decreasing step or a missing link is
/// reported with the partial path.
pub fn backtrack(march: &MarchResult, start: LiftedPoint) -> Result<GeodesicPath> {
    let h2 = march.grid().h2();
    if !march.u(start).is_finite() {
        return Err(Error::input("backtracking from a point with infinite distance"));
    }
    let mut nodes = vec![start];
    let mut cur = start;
    let mut u = march.u(start);
    while !march.is_source(cur) {
        let partial = |nodes: &Vec<LiftedPoint>| {
            let mut n = nodes.clone();
            n.reverse();
            Error::BacktrackStalled {
                partial: GeodesicPath::from_nodes(n, h2),
            }
        };
        if nodes.len() > MAX_STEPS {
            return Err(partial(&nodes));
        }
        let Some((prev, _)) = march.parent(cur) else {
            return Err(partial(&nodes));
        };
        let up = march.u(prev);
        if !(up < u - 1e-9 * u.max(1.0)) && up != 0.0 {
            return Err(partial(&nodes));
        }
        nodes.push(prev);
        cur = prev;
        u = up;
    }
    nodes.reverse();
    Ok(GeodesicPath::from_nodes(nodes, h2))
}

/// `sum sqrt(|dx|^2 + beta^2 dtheta^2)` over consecutive samples, angles
/// wrapped into `(-pi, pi]`.
pub fn curvature_length(path: &GeodesicPath, beta: f64) -> f64 {
    path.samples
        .windows(2)
        .map(|w| {
            let dx = w[1].x - w[0].x;
            let dy = w[1].y - w[0].y;
            let dt = wrap_angle(w[1].theta - w[0].theta);
            sqrt(dx * dx + dy * dy + beta * beta * dt * dt)
        })
        .sum()
}

/// Metric length of the node chain using the marching edge prices.
pub fn path_cost(metric: &LiftedMetric<'_>, path: &GeodesicPath) -> Result<f64> {
    let mut total = 0.0;
    for w in path.nodes.windows(2) {
        let o = (0..STENCIL.len())
            .find(|&o| metric.step(w[0], o) == Some(w[1]))
            .ok_or_else(|| Error::input("consecutive path nodes are not a stencil move"))?;
        total += metric.edge_cost(w[0], w[1], o);
    }
    Ok(total)
}
