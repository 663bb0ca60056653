use alloc::vec;
use alloc::vec::Vec;

use super::mask::{neighbors8, BinaryMask};
use crate::image::Pixel;

/// Ordered 8-connected simple polyline of skeleton pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub id: usize,
    pub points: Vec<Pixel>,
}

impl Trajectory {
    pub fn new(id: usize, points: Vec<Pixel>) -> Self {
        Trajectory { id, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point nearest to `(x, y)`; ties keep the lowest index.
    pub fn nearest_index(&self, x: f64, y: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.points.iter().enumerate() {
            let dx = p.x as f64 - x;
            let dy = p.y as f64 - y;
            let d = dx * dx + dy * dy;
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Number of set 8-neighbours.
pub fn neighbor_count(mask: &BinaryMask, p: Pixel) -> usize {
    neighbors8(p).filter(|&q| mask.get(q)).count()
}

/// Deletes branch points (three or more skeleton neighbours), traces the
/// remaining components into ordered polylines and drops those shorter than
/// `min_len` points. Ids follow the row-major order of each component's
/// first pixel.
pub fn split_trajectories(skeleton: &BinaryMask, min_len: usize) -> Vec<Trajectory> {
    let mut pruned = skeleton.clone();
    for p in skeleton.pixels() {
        if neighbor_count(skeleton, p) >= 3 {
            pruned.set(p, false);
        }
    }
    let w = pruned.width();
    let idx = |p: Pixel| p.y as usize * w + p.x as usize;
    let mut visited = vec![false; w * pruned.height()];
    let mut out = Vec::new();
    for start in pruned.pixels() {
        if visited[idx(start)] {
            continue;
        }
        let component = collect_component(&pruned, start, &mut visited, idx);
        if component.len() < min_len {
            continue;
        }
        let points = order_component(&pruned, &component);
        let id = out.len();
        out.push(Trajectory::new(id, points));
    }
    out
}

fn collect_component(
    m: &BinaryMask,
    start: Pixel,
    visited: &mut [bool],
    idx: impl Fn(Pixel) -> usize,
) -> Vec<Pixel> {
    let mut comp = vec![start];
    visited[idx(start)] = true;
    let mut i = 0;
    while i < comp.len() {
        let p = comp[i];
        for q in neighbors8(p) {
            if m.get(q) && !visited[idx(q)] {
                visited[idx(q)] = true;
                comp.push(q);
            }
        }
        i += 1;
    }
    comp
}

/// Walks a component whose pixels all have at most two neighbours: from the
/// smallest endpoint for open curves, from the smallest pixel for loops.
fn order_component(m: &BinaryMask, component: &[Pixel]) -> Vec<Pixel> {
    let start = component
        .iter()
        .copied()
        .filter(|&p| neighbor_count(m, p) <= 1)
        .min()
        .unwrap_or_else(|| component.iter().copied().min().unwrap());
    let mut ordered = Vec::with_capacity(component.len());
    ordered.push(start);
    let mut prev: Option<Pixel> = None;
    let mut cur = start;
    loop {
        let next = neighbors8(cur)
            .filter(|&q| m.get(q) && Some(q) != prev && !ordered.contains(&q))
            .min();
        match next {
            Some(q) => {
                ordered.push(q);
                prev = Some(cur);
                cur = q;
            }
            None => break,
        }
    }
    debug_assert_eq!(ordered.len(), component.len());
    ordered
}
