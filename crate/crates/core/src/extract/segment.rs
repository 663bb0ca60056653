use alloc::vec::Vec;

use super::mask::BinaryMask;
use crate::error::{Error, Result};

/// Thresholded vessel score map.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub mask: BinaryMask,
    /// `None` when the score map carries no positive value; the mask is then
    /// empty.
    pub threshold: Option<f32>,
}

impl Segmentation {
    pub fn is_empty(&self) -> bool {
        self.threshold.is_none()
    }
}

/// Scores below this fraction of the peak are numerical noise, not signal.
const NONZERO_FLOOR: f32 = 1e-6;

/// Keeps pixels whose score reaches the `quantile` (nearest rank) of the
/// nonzero scores.
pub fn segment_tubularity(
    zeta: &[f32],
    width: usize,
    height: usize,
    quantile: f64,
) -> Result<Segmentation> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::config("threshold quantile must lie in (0, 1)"));
    }
    if zeta.len() != width * height {
        return Err(Error::input("score map does not match the grid"));
    }
    let peak = zeta.iter().copied().fold(0.0f32, f32::max);
    let mut nonzero: Vec<f32> = zeta
        .iter()
        .copied()
        .filter(|&z| z > 0.0 && z >= peak * NONZERO_FLOOR)
        .collect();
    if nonzero.is_empty() {
        return Ok(Segmentation {
            mask: BinaryMask::new(width, height),
            threshold: None,
        });
    }
    nonzero.sort_by(f32::total_cmp);
    let n = nonzero.len();
    let rank = (libm::ceil(quantile * n as f64) as usize).clamp(1, n) - 1;
    let threshold = nonzero[rank];
    let bits = zeta.iter().map(|&z| z > 0.0 && z >= threshold).collect();
    Ok(Segmentation {
        mask: BinaryMask::from_bits(width, height, bits),
        threshold: Some(threshold),
    })
}
