//! Oriented-flux tubularity features and the lifted data cost.
//!
//! Tubular structures are assumed darker than their surroundings; set the
//! `invert` flag for bright structures. `Ψ(x, r)` is the disk-integrated
//! Hessian of the Gaussian-smoothed image, so across a dark tube it is
//! positive. The tubularity tensor `-Ψ` follows the usual eigenvalue order
//! `λ1 <= λ2`: `λ1` is strongly negative across the tube, and the `λ2`
//! eigenvector points along the tube axis.

mod conv;
mod field;
mod oof;

pub use crate::math::{Eigen2, SymMat2};
pub use conv::{gaussian_derivative_kernels, reflect_index, DerivativeKernels};
pub use field::{
    cost_function, cost_value, orientation_scores, vesselness_and_scale, FeatureParams,
    TubularFeatures,
};
pub use oof::{compute_oof, disk_offsets, OofResponse};
