use super::backtrack::{backtrack, GeodesicPath};
use super::grid::LiftedPoint;
use super::march::{fast_march, MarchOptions};
use super::metric::LiftedMetric;
use crate::error::Result;

/// Geodesic link from one lifted trajectory to another.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bridge {
    /// Weighted metric length `D` (diagnostic).
    pub distance: f64,
    /// Data-free curvature length read from `E` at the reached point.
    pub length: f64,
    /// First accepted point of the target set.
    pub reached: LiftedPoint,
    pub path: GeodesicPath,
}

/// Marches from `from` until a point of `to` is accepted and backtracks the
/// connecting geodesic.
pub fn bridge(
    metric: &LiftedMetric<'_>,
    from: &[LiftedPoint],
    to: &[LiftedPoint],
    opts: &MarchOptions,
) -> Result<Bridge> {
    let march = fast_march(metric, from, to, opts)?;
    let reached = march.reached().expect("stop set is non-empty");
    let path = backtrack(&march, reached)?;
    Ok(Bridge {
        distance: march.u(reached),
        length: march.e(reached),
        reached,
        path,
    })
}
