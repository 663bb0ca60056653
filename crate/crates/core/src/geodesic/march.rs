use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;
use rustc_hash::FxBuildHasher;

use super::grid::{LiftedGrid, LiftedPoint};
use super::metric::LiftedMetric;
use super::stencil::STENCIL;
use crate::error::{Error, Result};
use crate::image::Pixel;
use crate::math::sqrt;

/// Inclusive pixel rectangle the front is confined to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub min: Pixel,
    pub max: Pixel,
}

impl Region {
    pub fn contains(&self, x: i32, y: i32) -> bool {
        x >= self.min.x && x <= self.max.x && y >= self.min.y && y <= self.max.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchOptions {
    /// Curvature weight of the accumulated length `E`.
    pub beta_e: f64,
    pub region: Option<Region>,
}

impl Default for MarchOptions {
    fn default() -> Self {
        MarchOptions {
            beta_e: 20.0,
            region: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Far,
    Trial,
    Accepted,
}

const NO_PARENT: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    e: f64,
    parent: u8,
    accepted: bool,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    u: f64,
    seq: u64,
    idx: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed so that the max-heap pops the smallest distance, oldest first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .u
            .total_cmp(&self.u)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distance map `U`, curvature-length map `E` and the upwind parent links of
/// one marching run. Points never reached are `Far` with infinite values.
#[derive(Debug, Clone)]
pub struct MarchResult {
    grid: LiftedGrid,
    nodes: HashMap<u32, Node, FxBuildHasher>,
    order: Vec<u32>,
    reached: Option<LiftedPoint>,
}

impl MarchResult {
    pub fn grid(&self) -> &LiftedGrid {
        &self.grid
    }

    fn node(&self, p: LiftedPoint) -> Option<&Node> {
        if !self.grid.contains(p) {
            return None;
        }
        self.nodes.get(&(self.grid.index(p) as u32))
    }

    pub fn u(&self, p: LiftedPoint) -> f64 {
        self.node(p).map_or(f64::INFINITY, |n| n.u)
    }

    /// Curvature length; finite only on accepted points.
    pub fn e(&self, p: LiftedPoint) -> f64 {
        self.node(p)
            .filter(|n| n.accepted)
            .map_or(f64::INFINITY, |n| n.e)
    }

    pub fn label(&self, p: LiftedPoint) -> Label {
        match self.node(p) {
            None => Label::Far,
            Some(n) if n.accepted => Label::Accepted,
            Some(_) => Label::Trial,
        }
    }

    /// The stop point whose acceptance ended the run.
    pub fn reached(&self) -> Option<LiftedPoint> {
        self.reached
    }

    pub fn is_source(&self, p: LiftedPoint) -> bool {
        self.node(p)
            .is_some_and(|n| n.accepted && n.parent == NO_PARENT)
    }

    /// Upwind predecessor of an accepted point and the stencil move leading
    /// from it.
    pub fn parent(&self, p: LiftedPoint) -> Option<(LiftedPoint, usize)> {
        let n = self.node(p)?;
        if n.parent == NO_PARENT {
            return None;
        }
        let o = n.parent as usize;
        let off = STENCIL[o];
        let q = LiftedPoint::new(p.x - off.dx, p.y - off.dy, self.grid.wrap_bin(p.bin, -off.dk));
        Some((q, o))
    }

    /// Accepted points in acceptance order.
    pub fn accepted(&self) -> impl Iterator<Item = LiftedPoint> + '_ {
        self.order.iter().map(|&i| self.grid.point(i as usize))
    }

    pub fn accepted_count(&self) -> usize {
        self.order.len()
    }

    /// Largest accepted distance.
    pub fn farthest(&self) -> f64 {
        self.order
            .last()
            .map_or(0.0, |i| self.nodes[i].u)
    }
}

fn check_points(grid: &LiftedGrid, pts: &[LiftedPoint], what: &str) -> Result<()> {
    match pts.iter().find(|p| !grid.contains(**p)) {
        Some(p) => Err(Error::input(alloc::format!(
            "{what} point ({}, {}, {}) lies outside the lifted grid",
            p.x, p.y, p.bin
        ))),
        None => Ok(()),
    }
}

/// Label-setting front propagation from `source`.
///
/// Stops as soon as a point of `stop` is accepted; with an empty `stop` the
/// whole reachable domain is accepted. `E` is finalized at acceptance from
/// the parent that produced the final `U`.
pub fn fast_march(
    metric: &LiftedMetric<'_>,
    source: &[LiftedPoint],
    stop: &[LiftedPoint],
    opts: &MarchOptions,
) -> Result<MarchResult> {
    let grid = *metric.grid();
    if source.is_empty() {
        return Err(Error::input("fast marching needs a non-empty source set"));
    }
    check_points(&grid, source, "source")?;
    check_points(&grid, stop, "stop")?;
    if !(opts.beta_e >= 0.0 && opts.beta_e.is_finite()) {
        return Err(Error::config("beta_e must be non-negative"));
    }

    let mut stop_set: HashMap<u32, (), FxBuildHasher> = HashMap::default();
    for p in stop {
        stop_set.insert(grid.index(*p) as u32, ());
    }
    let h2 = grid.h2();
    let be2 = opts.beta_e * opts.beta_e;
    let increments: Vec<f64> = STENCIL
        .iter()
        .map(|o| {
            let dt = o.dk as f64 * h2;
            sqrt((o.dx * o.dx + o.dy * o.dy) as f64 + be2 * dt * dt)
        })
        .collect();

    let mut nodes: HashMap<u32, Node, FxBuildHasher> = HashMap::default();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for p in source {
        let idx = grid.index(*p) as u32;
        if nodes.contains_key(&idx) {
            continue;
        }
        nodes.insert(
            idx,
            Node {
                u: 0.0,
                e: 0.0,
                parent: NO_PARENT,
                accepted: false,
            },
        );
        heap.push(Entry { u: 0.0, seq, idx });
        seq += 1;
    }

    let mut order = Vec::new();
    let mut reached = None;
    while let Some(Entry { u, idx, .. }) = heap.pop() {
        let node = nodes[&idx];
        if node.accepted || node.u != u {
            continue;
        }
        let p = grid.point(idx as usize);
        let e = match node.parent {
            NO_PARENT => 0.0,
            o => {
                let off = STENCIL[o as usize];
                let q = LiftedPoint::new(p.x - off.dx, p.y - off.dy, grid.wrap_bin(p.bin, -off.dk));
                nodes[&(grid.index(q) as u32)].e + increments[o as usize]
            }
        };
        {
            let n = nodes.get_mut(&idx).unwrap();
            n.accepted = true;
            n.e = e;
        }
        order.push(idx);
        if stop_set.contains_key(&idx) {
            reached = Some(p);
            break;
        }
        for o in 0..STENCIL.len() {
            let Some(q) = metric.step(p, o) else { continue };
            if let Some(r) = &opts.region {
                if !r.contains(q.x, q.y) {
                    continue;
                }
            }
            let qi = grid.index(q) as u32;
            let cand = u + metric.edge_cost(p, q, o);
            let slot = nodes.entry(qi).or_insert(Node {
                u: f64::INFINITY,
                e: f64::INFINITY,
                parent: NO_PARENT,
                accepted: false,
            });
            if !slot.accepted && cand < slot.u {
                slot.u = cand;
                slot.parent = o as u8;
                heap.push(Entry { u: cand, seq, idx: qi });
                seq += 1;
            }
        }
    }

    if !stop.is_empty() && reached.is_none() {
        let farthest = order.last().map_or(0.0, |i| nodes[i].u);
        return Err(Error::Unreachable { farthest });
    }
    Ok(MarchResult {
        grid,
        nodes,
        order,
        reached,
    })
}
