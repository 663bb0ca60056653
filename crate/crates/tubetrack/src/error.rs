use std::path::PathBuf;

use serde::Serialize;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] tubetrack_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode image: {0}")]
    Image(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("corrupt {kind} container: {detail}")]
    Corrupt { kind: &'static str, detail: String },
    #[error("no route between seeds")]
    NoRoute {
        source: tubetrack_core::Error,
        nearest: Vec<NearestTrajectories>,
    },
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("invalid request: {0}")]
    Request(String),
}

/// Closest trajectories to one seed, reported when routing fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestTrajectories {
    pub seed: [i32; 2],
    /// `(trajectory id, distance in pixels)`, closest first.
    pub trajectories: Vec<(usize, f64)>,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(kind: &'static str, detail: impl Into<String>) -> Self {
        Error::Corrupt {
            kind,
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Core(tubetrack_core::Error::Config(_)) | Error::Config(_) => "invalid_config",
            Error::Core(tubetrack_core::Error::Dimension { .. }) => "image_too_small",
            Error::Core(tubetrack_core::Error::Input(_)) | Error::Request(_) => "invalid_input",
            Error::Core(tubetrack_core::Error::NoRoute { .. }) | Error::NoRoute { .. } => "no_route",
            Error::Core(_) => "tracking_failed",
            Error::Io { .. } => "io",
            Error::Image(_) => "unreadable_image",
            Error::Corrupt { .. } => "corrupt_cache",
            Error::UnknownSession(_) => "unknown_session",
        }
    }

    /// Human-readable detail, including the nearest trajectories for
    /// routing failures.
    pub fn detail(&self) -> String {
        match self {
            Error::NoRoute { source, nearest } => {
                let near: Vec<String> = nearest
                    .iter()
                    .map(|n| {
                        let list: Vec<String> = n
                            .trajectories
                            .iter()
                            .map(|(id, d)| format!("{id} at {d:.1} px"))
                            .collect();
                        format!("seed ({}, {}): {}", n.seed[0], n.seed[1], list.join(", "))
                    })
                    .collect();
                if near.is_empty() {
                    format!("{source}")
                } else {
                    format!("{source}; nearest trajectories: {}", near.join("; "))
                }
            }
            e => e.to_string(),
        }
    }
}
