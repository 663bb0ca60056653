//! From the vessel score map to disjoint, orientation-lifted trajectories
//! and their tubular neighbourhoods.

mod lift;
mod mask;
mod neighborhood;
mod segment;
mod thin;
mod trace;

pub use lift::{lift_point, lift_trajectory, LiftedTrajectory};
pub use mask::BinaryMask;
pub use neighborhood::{adjacent, build_neighborhood, endpoint_tangent, NeighborhoodMask};
pub use segment::{segment_tubularity, Segmentation};
pub use thin::{guo_hall, skeletonize};
pub use trace::{neighbor_count, split_trajectories, Trajectory};
