use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::Pixel;

/// Point of the lifted grid: pixel plus orientation bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LiftedPoint {
    pub y: i32,
    pub x: i32,
    pub bin: usize,
}

impl LiftedPoint {
    pub const fn new(x: i32, y: i32, bin: usize) -> Self {
        LiftedPoint { y, x, bin }
    }

    pub const fn pixel(&self) -> Pixel {
        Pixel::new(self.x, self.y)
    }
}

/// Regular grid on `Ω × S¹` with unit spatial spacing and `n_theta`
/// periodic orientation bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftedGrid {
    width: usize,
    height: usize,
    n_theta: usize,
}

impl LiftedGrid {
    pub fn new(width: usize, height: usize, n_theta: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input("lifted grid needs a non-empty image domain"));
        }
        if n_theta < 4 || n_theta % 2 != 0 {
            return Err(Error::config("n_theta must be even and at least 4"));
        }
        if (width * height * n_theta) as u64 >= u32::MAX as u64 {
            return Err(Error::input("lifted grid too large"));
        }
        Ok(LiftedGrid {
            width,
            height,
            n_theta,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.width * self.height * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h1(&self) -> f64 {
        1.0
    }

    pub fn h2(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn theta(&self, bin: usize) -> f64 {
        self.h2() * bin as f64
    }

    /// Bin shifted by `dk`, wrapped periodically.
    pub fn wrap_bin(&self, bin: usize, dk: i32) -> usize {
        (bin as i64 + dk as i64).rem_euclid(self.n_theta as i64) as usize
    }

    pub fn contains(&self, p: LiftedPoint) -> bool {
        p.x >= 0
            && p.y >= 0
            && (p.x as usize) < self.width
            && (p.y as usize) < self.height
            && p.bin < self.n_theta
    }

    /// Flat index `(y * width + x) * n_theta + bin`, the layout shared with
    /// the feature planes.
    pub fn index(&self, p: LiftedPoint) -> usize {
        (p.y as usize * self.width + p.x as usize) * self.n_theta + p.bin
    }

    pub fn point(&self, index: usize) -> LiftedPoint {
        let bin = index % self.n_theta;
        let pix = index / self.n_theta;
        LiftedPoint::new((pix % self.width) as i32, (pix / self.width) as i32, bin)
    }
}
