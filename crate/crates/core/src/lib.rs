//! Minimally interactive centerline tracking for tubular structures.
//!
//! The pipeline has two stages. The offline stage turns a grayscale image
//! into a graph whose nodes are disjoint skeleton trajectories and whose edge
//! weights are curvature-penalized lengths of geodesic "bridge" paths
//! computed in the orientation-lifted domain. The online stage attaches the
//! user's seed points to that graph, runs Dijkstra, and concatenates
//! truncated trajectories and bridges into a centerline.
//!
//! - [`features`]: oriented-flux tubularity, optimal scale, orientation
//!   scores and the data cost on the lifted grid.
//! - [`extract`]: thresholding, thinning, branch-point removal, lifting and
//!   tubular neighbourhoods.
//! - [`geodesic`]: lifted Finsler metrics, label-setting fast marching with
//!   curvature-length accumulation, backtracking and bridges.
//! - [`graph`]: trajectory graph, seed attachment, Dijkstra and path recovery.
//! - [`eval`]: synthetic scenes, the accuracy score and the straight-segment
//!   grouping baseline.
//! - [`pipeline`]: glue tying the stages together.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, caching and
//! the service live in the companion `tubetrack` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod error;
pub mod eval;
pub mod extract;
pub mod features;
pub mod geodesic;
pub mod graph;
pub mod image;
pub mod pipeline;

mod math;

pub use config::{PipelineConfig, Weighting};
pub use error::{Error, Result};
pub use geodesic::{MetricKind, MetricParams};
pub use image::{GrayImage, Pixel};
pub use pipeline::{TrackResult, TrackingModel};
