//! Curvature-penalized geodesics on the orientation-lifted grid `Ω × S¹`.
//!
//! The solver is label-setting: every lifted grid point is accepted once, in
//! non-decreasing order of its distance. Neighbours are reached through a
//! fixed stencil of 50 moves and each move is priced with the lifted Finsler
//! metric averaged over its two endpoints, so the marching front coincides
//! with Dijkstra's algorithm on the stencil graph. The curvature length `E`
//! is carried along the same upwind parent links.

mod backtrack;
mod bridge;
mod grid;
mod march;
mod metric;
mod stencil;

pub use backtrack::{backtrack, curvature_length, path_cost, GeodesicPath, PathSample};
pub use bridge::{bridge, Bridge};
pub use grid::{LiftedGrid, LiftedPoint};
pub use march::{fast_march, Label, MarchOptions, MarchResult, Region};
pub use metric::{finsler, metric_eval, LiftedMetric, MetricKind, MetricParams};
pub use stencil::{Offset, STENCIL};
