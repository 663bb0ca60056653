use alloc::string::String;

use crate::geodesic::GeodesicPath;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("image is {width}x{height}, smaller than the required {min}x{min}")]
    Dimension {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("metric length of the zero vector is undefined")]
    ZeroVector,
    #[error("target set unreachable; farthest accepted distance {farthest}")]
    Unreachable { farthest: f64 },
    #[error("geodesic backtracking stalled after {} samples", partial.samples.len())]
    BacktrackStalled { partial: GeodesicPath },
    #[error("no route from node {src} to node {dst}; {component_size} nodes reachable from the source")]
    NoRoute {
        src: usize,
        dst: usize,
        component_size: usize,
    },
    #[error("scene generation failed: {0}")]
    Generation(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
