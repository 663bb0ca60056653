use alloc::vec::Vec;

use super::trace::Trajectory;
use crate::features::TubularFeatures;
use crate::geodesic::LiftedPoint;
use crate::image::Pixel;

/// A trajectory lifted to `Ω × S¹`: every base point appears twice, at its
/// dominant orientation `θ*` and at `θ* + π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedTrajectory {
    pub base: usize,
    /// `θ*` bin (in `0..n_theta / 2`) per base point.
    pub orientations: Vec<usize>,
    /// `(x, θ*)` followed by `(x, θ* + π)` for each base point in order.
    pub points: Vec<LiftedPoint>,
}

impl LiftedTrajectory {
    /// Spatial projection in base order.
    pub fn projection(&self) -> Vec<Pixel> {
        self.points.iter().step_by(2).map(|p| p.pixel()).collect()
    }
}

/// Dominant orientation bin at `pixel` over `[0, π)`, lowest bin on ties,
/// and its two lifted points.
pub fn lift_point(features: &TubularFeatures, pixel: Pixel) -> (usize, [LiftedPoint; 2]) {
    let n = features.n_theta();
    let half = n / 2;
    let scores = features.psi_at(pixel.x as usize, pixel.y as usize);
    let mut best = 0;
    for k in 1..half {
        if scores[k] > scores[best] {
            best = k;
        }
    }
    (
        best,
        [
            LiftedPoint::new(pixel.x, pixel.y, best),
            LiftedPoint::new(pixel.x, pixel.y, best + half),
        ],
    )
}

pub fn lift_trajectory(traj: &Trajectory, features: &TubularFeatures) -> LiftedTrajectory {
    let mut orientations = Vec::with_capacity(traj.len());
    let mut points = Vec::with_capacity(2 * traj.len());
    for &p in &traj.points {
        let (k, lifted) = lift_point(features, p);
        orientations.push(k);
        points.extend(lifted);
    }
    LiftedTrajectory {
        base: traj.id,
        orientations,
        points,
    }
}
