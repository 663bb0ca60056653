use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::build::TrajectoryGraph;
use crate::error::{Error, Result};

/// Read access needed by Dijkstra.
pub trait RouteGraph {
    fn node_count(&self) -> usize;
    /// Calls `f(neighbour, weight)` for every edge at `n`.
    fn for_each_neighbor(&self, n: usize, f: &mut dyn FnMut(usize, f64));
}

impl RouteGraph for TrajectoryGraph {
    fn node_count(&self) -> usize {
        TrajectoryGraph::node_count(self)
    }

    fn for_each_neighbor(&self, n: usize, f: &mut dyn FnMut(usize, f64)) {
        for e in self.incident(n) {
            f(e.other(n), e.weight);
        }
    }
}

/// Node sequence from source to destination and its total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<usize>,
    pub cost: f64,
}

#[derive(PartialEq)]
struct Item {
    dist: f64,
    node: usize,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `src` to `dst`. Among equally short routes the one whose
/// predecessors have the smaller ids wins.
pub fn shortest_sequence<G: RouteGraph + ?Sized>(g: &G, src: usize, dst: usize) -> Result<Route> {
    let n = g.node_count();
    if src >= n || dst >= n {
        return Err(Error::input("route endpoint is not a graph node"));
    }
    if src == dst {
        return Err(Error::input("route source and destination coincide"));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Item { dist: 0.0, node: src });
    let mut settled = 0;
    while let Some(Item { dist: d, node: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        settled += 1;
        if u == dst {
            break;
        }
        g.for_each_neighbor(u, &mut |v, w| {
            if done[v] {
                return;
            }
            let cand = d + w;
            if cand < dist[v] || (cand == dist[v] && u < pred[v]) {
                if cand < dist[v] {
                    heap.push(Item { dist: cand, node: v });
                }
                dist[v] = cand;
                pred[v] = u;
            }
        });
    }
    if !done[dst] {
        return Err(Error::NoRoute {
            src,
            dst,
            component_size: settled,
        });
    }
    let mut nodes = vec![dst];
    let mut cur = dst;
    while cur != src {
        cur = pred[cur];
        nodes.push(cur);
    }
    nodes.reverse();
    Ok(Route {
        nodes,
        cost: dist[dst],
    })
}
