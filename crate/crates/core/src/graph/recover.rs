use alloc::vec::Vec;

use super::seeds::SeededGraph;
use crate::error::{Error, Result};
use crate::image::Pixel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PieceKind {
    Trajectory,
    Bridge,
}

/// A run of the concatenated polyline. `span` holds inclusive indices into
/// [`TrackedPath::polyline`]; consecutive pieces share their boundary point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Piece {
    pub kind: PieceKind,
    /// Trajectory node, or the two nodes a bridge joins in travel order.
    pub nodes: (usize, usize),
    pub span: (usize, usize),
}

/// Centerline assembled from truncated trajectories and bridges.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackedPath {
    pub nodes: Vec<usize>,
    /// Weight of each traversed edge, in travel order.
    pub weights: Vec<f64>,
    pub pieces: Vec<Piece>,
    pub polyline: Vec<(f64, f64)>,
}

impl TrackedPath {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn length(&self) -> f64 {
        self.polyline
            .windows(2)
            .map(|w| crate::math::hypot(w[1].0 - w[0].0, w[1].1 - w[0].1))
            .sum()
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &TrackedPath) {
        if self.polyline.is_empty() {
            *self = other.clone();
            return;
        }
        let shift = self.polyline.len() - 1;
        let skip_node = self.nodes.last() == other.nodes.first();
        self.nodes
            .extend(other.nodes.iter().skip(usize::from(skip_node)).copied());
        self.weights.extend_from_slice(&other.weights);
        self.polyline.extend(other.polyline.iter().skip(1).copied());
        self.pieces.extend(other.pieces.iter().map(|p| Piece {
            span: (p.span.0 + shift, p.span.1 + shift),
            ..p.clone()
        }));
    }
}

fn nearest_index(points: &[Pixel], at: (f64, f64)) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, p) in points.iter().enumerate() {
        let (dx, dy) = (p.x as f64 - at.0, p.y as f64 - at.1);
        let d = dx * dx + dy * dy;
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

struct Builder {
    out: TrackedPath,
}

impl Builder {
    fn push(&mut self, kind: PieceKind, nodes: (usize, usize), pts: impl IntoIterator<Item = (f64, f64)>) {
        let mut pts = pts.into_iter().peekable();
        let start = match (self.out.polyline.last(), pts.peek()) {
            (Some(&last), Some(&first)) if last == first => {
                pts.next();
                self.out.polyline.len() - 1
            }
            _ => self.out.polyline.len(),
        };
        self.out.polyline.extend(pts);
        let end = self.out.polyline.len().saturating_sub(1).max(start);
        self.out.pieces.push(Piece {
            kind,
            nodes,
            span: (start, end),
        });
    }
}

/// Assembles the centerline for `sequence` running from seed pixel `src`
/// to seed pixel `dst`. On every visited trajectory only the part between
/// its entry and exit points is kept; the entry and exit points are the
/// trajectory pixels closest to the attached bridge ends, or the seeds on
/// the first and last node.
pub fn recover_path(
    g: &SeededGraph<'_>,
    sequence: &[usize],
    src: Pixel,
    dst: Pixel,
) -> Result<TrackedPath> {
    if sequence.is_empty() {
        return Err(Error::input("empty node sequence"));
    }
    let mut bridges = Vec::with_capacity(sequence.len().saturating_sub(1));
    let mut weights = Vec::with_capacity(sequence.len().saturating_sub(1));
    for w in sequence.windows(2) {
        let e = g
            .edge(w[0], w[1])
            .ok_or_else(|| Error::input(alloc::format!("no edge between nodes {} and {}", w[0], w[1])))?;
        weights.push(e.weight);
        bridges.push(e.path_from(w[0]).polyline());
    }
    let mut b = Builder {
        out: TrackedPath {
            nodes: sequence.to_vec(),
            weights,
            ..TrackedPath::default()
        },
    };
    let k_last = sequence.len() - 1;
    for (k, &n) in sequence.iter().enumerate() {
        let pts = g.node_points(n);
        let entry = if k == 0 {
            (src.x as f64, src.y as f64)
        } else {
            *bridges[k - 1].last().expect("bridge paths are non-empty")
        };
        let exit = if k == k_last {
            (dst.x as f64, dst.y as f64)
        } else {
            bridges[k][0]
        };
        let (i0, i1) = (nearest_index(pts, entry), nearest_index(pts, exit));
        let as_f = |p: &Pixel| (p.x as f64, p.y as f64);
        if i0 <= i1 {
            b.push(PieceKind::Trajectory, (n, n), pts[i0..=i1].iter().map(as_f));
        } else {
            b.push(PieceKind::Trajectory, (n, n), pts[i1..=i0].iter().rev().map(as_f));
        }
        if k < k_last {
            let bridge = &bridges[k];
            b.push(PieceKind::Bridge, (n, sequence[k + 1]), bridge.iter().copied());
        }
    }
    Ok(b.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::Trajectory;
    use crate::features::TubularFeatures;
    use crate::geodesic::{LiftedGrid, LiftedMetric, MarchOptions, MetricParams};
    use crate::graph::{attach_seeds, candidate_pairs, geodesic_edge, shortest_sequence, NodeShape, TrajectoryGraph};

    fn row(id: usize, x0: i32, x1: i32, y: i32) -> Trajectory {
        Trajectory::new(id, (x0..=x1).map(|x| Pixel::new(x, y)).collect())
    }

    #[test]
    fn collinear_segments_recover_straight_line() {
        let f = TubularFeatures::uniform(100, 30, 16);
        let grid = LiftedGrid::new(100, 30, 16).unwrap();
        let m = LiftedMetric::new(grid, MetricParams::default(), f.cost()).unwrap();
        let trajs = [row(0, 5, 25, 15), row(1, 32, 60, 15), row(2, 67, 90, 15)];
        let shapes: Vec<_> = trajs.iter().map(|t| NodeShape::trajectory(t, &f, 10, 5.0)).collect();
        let opts = MarchOptions::default();
        let edges: Vec<_> = candidate_pairs(&shapes)
            .into_iter()
            .filter_map(|(i, j)| geodesic_edge(&m, &opts, 10, i, &shapes[i], j, &shapes[j]).unwrap())
            .collect();
        let g = TrajectoryGraph::new(trajs.iter().map(|t| t.points.clone()).collect(), edges).unwrap();
        let (s, t) = (Pixel::new(10, 15), Pixel::new(85, 15));
        let sg = attach_seeds(&g, &shapes, &[s, t], &f, 5.0, |_, _, _, _| Ok(None)).unwrap();
        let r = shortest_sequence(&sg, sg.seeds()[0].node, sg.seeds()[1].node).unwrap();
        assert_eq!(r.nodes, [0, 1, 2]);
        let path = recover_path(&sg, &r.nodes, s, t).unwrap();
        assert_eq!(path.polyline.first(), Some(&(10.0, 15.0)));
        assert_eq!(path.polyline.last(), Some(&(85.0, 15.0)));
        assert!(path.polyline.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 == 15.0));
        assert!((path.length() - 75.0).abs() < 1e-9);
        assert_eq!(path.pieces.len(), 5);
        // Interior trajectory is used in full here, endpoints are truncated.
        assert_eq!(path.pieces[0].span, (0, 15));

        let back = shortest_sequence(&sg, sg.seeds()[1].node, sg.seeds()[0].node).unwrap();
        assert_eq!(back.nodes, [2, 1, 0]);
    }
}
