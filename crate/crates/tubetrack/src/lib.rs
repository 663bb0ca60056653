//! Standard-library companion to `tubetrack-core`: image and mask files,
//! the `TFF1`/`TGR1` containers, TOML configuration, cached sessions, model
//! comparison and the HTTP service. The `tubetrack` binary wraps these in a
//! command line.

pub mod bench;
pub mod config;
pub mod container;
pub mod error;
pub mod io;
pub mod server;
pub mod session;

pub use error::{Error, Result};
pub use session::{PrepareStats, Session, TrackReport};
pub use tubetrack_core as core;
