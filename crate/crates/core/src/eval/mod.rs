//! Synthetic scenes with ground truth, the accuracy score and the
//! straight-segment grouping baseline used for comparisons.

mod baseline;
mod scene;
mod score;

pub use baseline::group_angle_weights;
pub use scene::{generate_scene, SceneKind, SceneSpec, Structure, SyntheticScene};
pub use score::{accuracy, rasterize, Score};
