use alloc::vec::Vec;

use crate::error::Result;
use crate::graph::{straight_edge, Edge, NodeShape};

/// Straight-segment edge weights for the given adjacent pairs (see
/// [`straight_edge`]). A simplified stand-in for the angle-based grouping
/// model, kept for comparison only.
pub fn group_angle_weights(
    shapes: &[NodeShape],
    pairs: &[(usize, usize)],
    lambda: f64,
) -> Result<Vec<Edge>> {
    pairs
        .iter()
        .map(|&(i, j)| straight_edge(lambda, i, &shapes[i], j, &shapes[j]))
        .collect()
}
