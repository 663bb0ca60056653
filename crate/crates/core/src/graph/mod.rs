//! Trajectory graph: nodes are disjoint trajectories (and user seeds),
//! edges carry a bridge path and a symmetric weight. Routes are found with
//! Dijkstra and turned back into a centerline by truncating the visited
//! trajectories at the bridge attachment points.

mod build;
mod recover;
mod route;
mod seeds;

pub use build::{
    candidate_pairs, geodesic_edge, straight_edge, Edge, EdgeBridge, NodeShape, TrajectoryGraph,
};
pub use recover::{recover_path, Piece, PieceKind, TrackedPath};
pub use route::{shortest_sequence, Route, RouteGraph};
pub use seeds::{attach_seeds, SeedNode, SeededGraph};
