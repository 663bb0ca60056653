use alloc::vec::Vec;

use super::build::{Edge, NodeShape, TrajectoryGraph};
use super::route::RouteGraph;
use crate::error::{Error, Result};
use crate::extract::adjacent;
use crate::features::TubularFeatures;
use crate::image::Pixel;

/// A user seed mapped onto the graph.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeedNode {
    pub pixel: Pixel,
    /// Graph node standing for the seed: the aliased trajectory or a new
    /// one-pixel node.
    pub node: usize,
    pub alias: Option<usize>,
    /// Closest trajectory and its distance in pixels.
    pub nearest: Option<(usize, f64)>,
}

/// A trajectory graph extended with seed nodes and their edges. The base
/// graph is borrowed and never modified.
#[derive(Debug, Clone)]
pub struct SeededGraph<'g> {
    base: &'g TrajectoryGraph,
    seeds: Vec<SeedNode>,
    extra_nodes: Vec<Vec<Pixel>>,
    extra_edges: Vec<Edge>,
    extra_adj: Vec<Vec<usize>>,
}

impl<'g> SeededGraph<'g> {
    pub fn base(&self) -> &TrajectoryGraph {
        self.base
    }

    pub fn seeds(&self) -> &[SeedNode] {
        &self.seeds
    }

    pub fn seed_edges(&self) -> &[Edge] {
        &self.extra_edges
    }

    pub fn node_points(&self, n: usize) -> &[Pixel] {
        let nb = self.base.node_count();
        if n < nb {
            self.base.node_points(n)
        } else {
            &self.extra_nodes[n - nb]
        }
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.extra_edges
            .iter()
            .find(|e| e.a == a && e.b == b)
            .or_else(|| self.base.edge(a, b))
    }
}

impl RouteGraph for SeededGraph<'_> {
    fn node_count(&self) -> usize {
        self.base.node_count() + self.extra_nodes.len()
    }

    fn for_each_neighbor(&self, n: usize, f: &mut dyn FnMut(usize, f64)) {
        if n < self.base.node_count() {
            self.base.for_each_neighbor(n, f);
        }
        if let Some(list) = self.extra_adj.get(n) {
            for &k in list {
                let e = &self.extra_edges[k];
                f(e.other(n), e.weight);
            }
        }
    }
}

/// Maps every seed to a node. A seed on a trajectory pixel aliases that
/// trajectory. Any other seed becomes a one-pixel node linked to every
/// trajectory whose neighbourhood contains it, every trajectory reaching
/// its own disc of radius `tau`, and its nearest trajectory. `link` prices
/// one such edge and may return `None` when no bridge exists.
pub fn attach_seeds<'g, F>(
    base: &'g TrajectoryGraph,
    shapes: &[NodeShape],
    seeds: &[Pixel],
    features: &TubularFeatures,
    tau: f64,
    mut link: F,
) -> Result<SeededGraph<'g>>
where
    F: FnMut(usize, &NodeShape, usize, &NodeShape) -> Result<Option<Edge>>,
{
    if shapes.len() != base.node_count() {
        return Err(Error::input("node shapes do not match the graph"));
    }
    let (w, h) = (features.width() as i32, features.height() as i32);
    let mut g = SeededGraph {
        base,
        seeds: Vec::new(),
        extra_nodes: Vec::new(),
        extra_edges: Vec::new(),
        extra_adj: Vec::new(),
    };
    for &s in seeds {
        if s.x < 0 || s.y < 0 || s.x >= w || s.y >= h {
            return Err(Error::input(alloc::format!(
                "seed ({}, {}) lies outside the {w}x{h} image",
                s.x, s.y
            )));
        }
        let mut nearest: Option<(usize, f64)> = None;
        let mut alias = None;
        for (t, shape) in shapes.iter().enumerate() {
            let d2 = shape.points.iter().map(|p| p.dist2(s)).min().unwrap_or(i64::MAX);
            if d2 == 0 && alias.is_none() {
                alias = Some(t);
            }
            if nearest.map_or(true, |(_, d)| (d2 as f64) < d * d) {
                nearest = Some((t, crate::math::sqrt(d2 as f64)));
            }
        }
        if let Some(t) = alias {
            g.seeds.push(SeedNode {
                pixel: s,
                node: t,
                alias: Some(t),
                nearest,
            });
            continue;
        }
        let node = base.node_count() + g.extra_nodes.len();
        let shape = NodeShape::seed(node, s, features, tau);
        let mut targets: Vec<usize> = shapes
            .iter()
            .enumerate()
            .filter(|(_, sh)| sh.mask.contains(s) || adjacent(&shape.mask, &sh.mask.prolonged))
            .map(|(t, _)| t)
            .collect();
        if let Some((t, _)) = nearest {
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        g.extra_nodes.push(shape.points.clone());
        for t in targets {
            if let Some(e) = link(node, &shape, t, &shapes[t])? {
                let k = g.extra_edges.len();
                for end in [e.a, e.b] {
                    if g.extra_adj.len() <= end {
                        g.extra_adj.resize(end + 1, Vec::new());
                    }
                    g.extra_adj[end].push(k);
                }
                g.extra_edges.push(e);
            }
        }
        g.seeds.push(SeedNode {
            pixel: s,
            node,
            alias: None,
            nearest,
        });
    }
    Ok(g)
}
