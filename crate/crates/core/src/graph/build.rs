use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::extract::{
    adjacent, build_neighborhood, endpoint_tangent, lift_point, lift_trajectory, NeighborhoodMask,
    Trajectory,
};
use crate::features::TubularFeatures;
use crate::geodesic::{bridge, GeodesicPath, LiftedMetric, LiftedPoint, MarchOptions, PathSample, Region};
use crate::image::Pixel;
use crate::math::{hypot, sqrt};

/// Geometry of one graph node: its pixels, lifted points and tubular
/// neighbourhood. Seeds are one-pixel nodes without prolongation.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeShape {
    pub points: Vec<Pixel>,
    pub lifted: Vec<LiftedPoint>,
    pub mask: NeighborhoodMask,
}

impl NodeShape {
    pub fn trajectory(
        traj: &Trajectory,
        features: &TubularFeatures,
        prolong_len: usize,
        tau: f64,
    ) -> Self {
        NodeShape {
            points: traj.points.clone(),
            lifted: lift_trajectory(traj, features).points,
            mask: build_neighborhood(traj, prolong_len, tau, features.width(), features.height()),
        }
    }

    pub fn seed(id: usize, pixel: Pixel, features: &TubularFeatures, tau: f64) -> Self {
        let traj = Trajectory::new(id, vec![pixel]);
        NodeShape {
            points: vec![pixel],
            lifted: lift_point(features, pixel).1.to_vec(),
            mask: build_neighborhood(&traj, 0, tau, features.width(), features.height()),
        }
    }

    pub fn is_point(&self) -> bool {
        self.points.len() == 1
    }
}

/// The bridge stored on an edge, oriented from `from` to `to`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeBridge {
    pub from: usize,
    pub to: usize,
    /// Weighted metric length; absent for straight segments.
    pub distance: Option<f64>,
    pub path: GeodesicPath,
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
    pub bridge: EdgeBridge,
}

impl Edge {
    pub fn other(&self, n: usize) -> usize {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }

    /// Bridge samples ordered to start on node `n`.
    pub fn path_from(&self, n: usize) -> GeodesicPath {
        if self.bridge.from == n {
            self.bridge.path.clone()
        } else {
            self.bridge.path.reversed()
        }
    }
}

/// Undirected weighted graph over node polylines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryGraph {
    nodes: Vec<Vec<Pixel>>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl TrajectoryGraph {
    /// Keeps the first edge for every unordered pair and drops self-loops.
    pub fn new(nodes: Vec<Vec<Pixel>>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut kept: Vec<Edge> = Vec::new();
        for e in edges {
            if e.a >= e.b || e.b >= nodes.len() {
                return Err(Error::input("edge endpoints must satisfy a < b < node count"));
            }
            if !(e.weight >= 0.0) {
                return Err(Error::input("edge weights must be non-negative"));
            }
            if adjacency[e.a].iter().any(|&k: &usize| kept[k].b == e.b) {
                continue;
            }
            adjacency[e.a].push(kept.len());
            adjacency[e.b].push(kept.len());
            kept.push(e);
        }
        Ok(TrajectoryGraph {
            nodes,
            edges: kept,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Vec<Pixel>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_points(&self, n: usize) -> &[Pixel] {
        &self.nodes[n]
    }

    pub fn incident(&self, n: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency[n].iter().map(move |&k| &self.edges[k])
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.adjacency
            .get(a)?
            .iter()
            .map(|&k| &self.edges[k])
            .find(|e| e.b == b)
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.edge(i, j).map(|e| e.weight)
    }
}

fn bbox(points: &[Pixel]) -> (Pixel, Pixel) {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Pixel::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Pixel::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn overlaps(a: (Pixel, Pixel), b: (Pixel, Pixel)) -> bool {
    a.0.x <= b.1.x && b.0.x <= a.1.x && a.0.y <= b.1.y && b.0.y <= a.1.y
}

/// Pairs `i < j` with `M_i ∩ T_j ≠ ∅` or `M_j ∩ T_i ≠ ∅`.
pub fn candidate_pairs(shapes: &[NodeShape]) -> Vec<(usize, usize)> {
    let boxes: Vec<_> = shapes.iter().map(|s| s.mask.bounds()).collect();
    let lines: Vec<_> = shapes.iter().map(|s| bbox(&s.mask.prolonged)).collect();
    let mut out = Vec::new();
    for i in 0..shapes.len() {
        for j in i + 1..shapes.len() {
            let ij = overlaps(boxes[i], lines[j]) && adjacent(&shapes[i].mask, &shapes[j].mask.prolonged);
            let ji = ij
                || (overlaps(boxes[j], lines[i]) && adjacent(&shapes[j].mask, &shapes[i].mask.prolonged));
            if ij || ji {
                out.push((i, j));
            }
        }
    }
    out
}

fn region_for(a: &NodeShape, b: &NodeShape, margin: usize, metric: &LiftedMetric<'_>) -> Region {
    let (a0, a1) = a.mask.bounds();
    let (b0, b1) = b.mask.bounds();
    let m = margin as i32;
    let g = metric.grid();
    Region {
        min: Pixel::new((a0.x.min(b0.x) - m).max(0), (a0.y.min(b0.y) - m).max(0)),
        max: Pixel::new(
            (a1.x.max(b1.x) + m).min(g.width() as i32 - 1),
            (a1.y.max(b1.y) + m).min(g.height() as i32 - 1),
        ),
    }
}

/// Geodesic edge between nodes `i` and `j`: bridges are computed in both
/// directions and the one with the smaller curvature length is kept.
/// Directions that cannot reach their target are skipped; `None` when
/// neither can.
pub fn geodesic_edge(
    metric: &LiftedMetric<'_>,
    opts: &MarchOptions,
    margin: usize,
    i: usize,
    shape_i: &NodeShape,
    j: usize,
    shape_j: &NodeShape,
) -> Result<Option<Edge>> {
    let ((a, sa), (b, sb)) = if i < j {
        ((i, shape_i), (j, shape_j))
    } else {
        ((j, shape_j), (i, shape_i))
    };
    if a == b {
        return Err(Error::input("self-edges are not allowed"));
    }
    let opts = MarchOptions {
        region: Some(region_for(sa, sb, margin, metric)),
        ..*opts
    };
    let run = |from: &NodeShape, to: &NodeShape| match bridge(metric, &from.lifted, &to.lifted, &opts) {
        Ok(br) => Ok(Some(br)),
        Err(Error::Unreachable { .. }) | Err(Error::BacktrackStalled { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let ab = run(sa, sb)?;
    let ba = run(sb, sa)?;
    let (from, to, br) = match (ab, ba) {
        (None, None) => return Ok(None),
        (Some(x), None) => (a, b, x),
        (None, Some(y)) => (b, a, y),
        (Some(x), Some(y)) => {
            if y.length < x.length {
                (b, a, y)
            } else {
                (a, b, x)
            }
        }
    };
    Ok(Some(Edge {
        a,
        b,
        weight: br.length,
        bridge: EdgeBridge {
            from,
            to,
            distance: Some(br.distance),
            path: br.path,
        },
    }))
}

fn angle_between(u: (f64, f64), v: (f64, f64)) -> f64 {
    let nu = hypot(u.0, u.1);
    let nv = hypot(v.0, v.1);
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    libm::acos(((u.0 * v.0 + u.1 * v.1) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Candidate attachment points of a node with their outward tangents.
fn attachments(shape: &NodeShape, toward: &NodeShape) -> Vec<(Pixel, Option<(f64, f64)>)> {
    let pts = &shape.points;
    if shape.is_point() {
        return vec![(pts[0], None)];
    }
    if toward.is_point() {
        // A seed may sit beside the middle of a trajectory.
        return pts.iter().map(|&p| (p, None)).collect();
    }
    vec![
        (pts[0], endpoint_tangent(pts, false)),
        (*pts.last().unwrap(), endpoint_tangent(pts, true)),
    ]
}

fn straight_path(p: Pixel, q: Pixel) -> GeodesicPath {
    let (dx, dy) = ((q.x - p.x) as f64, (q.y - p.y) as f64);
    let len = sqrt(dx * dx + dy * dy);
    let theta = if len > 0.0 {
        let t = libm::atan2(dy, dx);
        if t < 0.0 {
            t + 2.0 * core::f64::consts::PI
        } else {
            t
        }
    } else {
        0.0
    };
    let pieces = libm::ceil(len / 0.5).max(1.0) as usize;
    let samples = (0..=pieces)
        .map(|s| {
            let t = s as f64 / pieces as f64;
            PathSample {
                x: p.x as f64 + t * dx,
                y: p.y as f64 + t * dy,
                theta,
            }
        })
        .collect();
    GeodesicPath {
        nodes: Vec::new(),
        samples,
    }
}

/// Straight-segment edge of the grouping baseline: `d (1 + lambda (phi_i +
/// phi_j))` over the closest pair of endpoints, where each `phi` is the
/// angle between the segment and that endpoint's outward tangent. Seeds
/// have no tangent and contribute no angle.
pub fn straight_edge(
    lambda: f64,
    i: usize,
    shape_i: &NodeShape,
    j: usize,
    shape_j: &NodeShape,
) -> Result<Edge> {
    let ((a, sa), (b, sb)) = if i < j {
        ((i, shape_i), (j, shape_j))
    } else {
        ((j, shape_j), (i, shape_i))
    };
    if a == b {
        return Err(Error::input("self-edges are not allowed"));
    }
    let mut best: Option<(f64, Pixel, Pixel, f64)> = None;
    for (p, tp) in attachments(sa, sb) {
        for (q, tq) in attachments(sb, sa) {
            let d = p.dist(q);
            if best.is_some_and(|b| d >= b.0) {
                continue;
            }
            let seg = ((q.x - p.x) as f64, (q.y - p.y) as f64);
            let phi_p = tp.map_or(0.0, |t| angle_between(t, seg));
            let phi_q = tq.map_or(0.0, |t| angle_between(t, (-seg.0, -seg.1)));
            best = Some((d, p, q, d * (1.0 + lambda * (phi_p + phi_q))));
        }
    }
    let (_, p, q, weight) = best.expect("nodes are non-empty");
    Ok(Edge {
        a,
        b,
        weight,
        bridge: EdgeBridge {
            from: a,
            to: b,
            distance: None,
            path: straight_path(p, q),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{LiftedGrid, MetricParams};
    use core::f64::consts::PI;

    fn row(id: usize, x0: i32, x1: i32, y: i32) -> Trajectory {
        Trajectory::new(id, (x0..=x1).map(|x| Pixel::new(x, y)).collect())
    }

    #[test]
    fn straight_edge_collinear_and_perpendicular() {
        let f = TubularFeatures::uniform(60, 60, 16);
        let a = NodeShape::trajectory(&row(0, 5, 20, 30), &f, 10, 5.0);
        let b = NodeShape::trajectory(&row(1, 30, 45, 30), &f, 10, 5.0);
        let e = straight_edge(1.0, 0, &a, 1, &b).unwrap();
        assert!((e.weight - 10.0).abs() < 1e-12);
        let e2 = straight_edge(1.0, 1, &b, 0, &a).unwrap();
        assert_eq!(e.weight.to_bits(), e2.weight.to_bits());

        // Vertical trajectory whose top end sits 10 px below the end of `a`.
        let v = Trajectory::new(2, (0..10).map(|k| Pixel::new(20, 40 + k)).collect());
        let c = NodeShape::trajectory(&v, &f, 10, 5.0);
        let e3 = straight_edge(1.0, 0, &a, 2, &c).unwrap();
        assert!((e3.weight - 10.0 * (1.0 + PI / 2.0)).abs() < 1e-9, "{}", e3.weight);
    }

    #[test]
    fn adjacency_pairs() {
        let f = TubularFeatures::uniform(100, 40, 16);
        let shapes: Vec<_> = [row(0, 5, 20, 10), row(1, 27, 40, 10), row(2, 47, 60, 10), row(3, 5, 20, 35)]
            .iter()
            .map(|t| NodeShape::trajectory(t, &f, 10, 3.0))
            .collect();
        assert_eq!(candidate_pairs(&shapes), [(0, 1), (1, 2)]);
    }

    #[test]
    fn geodesic_edge_is_order_independent() {
        let f = TubularFeatures::uniform(70, 30, 16);
        let g = LiftedGrid::new(70, 30, 16).unwrap();
        let m = LiftedMetric::new(g, MetricParams::default(), f.cost()).unwrap();
        let a = NodeShape::trajectory(&row(0, 5, 20, 12), &f, 10, 5.0);
        let b = NodeShape::trajectory(&row(1, 31, 50, 15), &f, 10, 5.0);
        let o = MarchOptions::default();
        let e1 = geodesic_edge(&m, &o, 10, 0, &a, 1, &b).unwrap().unwrap();
        let e2 = geodesic_edge(&m, &o, 10, 1, &b, 0, &a).unwrap().unwrap();
        assert_eq!(e1, e2);
        assert!(e1.weight > 11.0);
        let path = e1.path_from(1);
        assert_eq!(path.samples.first().unwrap().y, 15.0);
    }

    #[test]
    fn graph_lookup_is_symmetric() {
        let nodes = vec![vec![Pixel::new(0, 0)], vec![Pixel::new(1, 0)], vec![Pixel::new(2, 0)]];
        let mk = |a, b, w| Edge {
            a,
            b,
            weight: w,
            bridge: EdgeBridge {
                from: a,
                to: b,
                distance: None,
                path: GeodesicPath::default(),
            },
        };
        let g = TrajectoryGraph::new(nodes, [mk(0, 1, 2.0), mk(1, 2, 3.0), mk(0, 1, 9.0)]).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.weight(1, 0), Some(2.0));
        assert_eq!(g.edge(2, 1), g.edge(1, 2));
        assert_eq!(g.weight(0, 2), None);
    }
}
