use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::extract::BinaryMask;
use crate::image::Pixel;

/// Fraction of traced pixels lying inside the ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Score {
    pub j: f64,
    pub traced: usize,
    pub inside: usize,
}

fn round(v: f64) -> i32 {
    libm::round(v) as i32
}

/// Pixels visited by an 8-connected line walk through the rounded
/// polyline vertices, sorted row-major and deduplicated.
pub fn rasterize(polyline: &[(f64, f64)]) -> Vec<Pixel> {
    let mut out = Vec::new();
    let mut prev: Option<Pixel> = None;
    for &(x, y) in polyline {
        let p = Pixel::new(round(x), round(y));
        match prev {
            None => out.push(p),
            Some(q) => {
                let (dx, dy) = ((p.x - q.x).abs(), -(p.y - q.y).abs());
                let (sx, sy) = ((p.x - q.x).signum(), (p.y - q.y).signum());
                let (mut cx, mut cy, mut err) = (q.x, q.y, dx + dy);
                while (cx, cy) != (p.x, p.y) {
                    let e2 = 2 * err;
                    if e2 >= dy {
                        err += dy;
                        cx += sx;
                    }
                    if e2 <= dx {
                        err += dx;
                        cy += sy;
                    }
                    out.push(Pixel::new(cx, cy));
                }
            }
        }
        prev = Some(p);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `J = |S ∩ GT| / |S|` with `S` the rasterized path.
pub fn accuracy(polyline: &[(f64, f64)], gt: &BinaryMask) -> Result<Score> {
    if polyline.is_empty() {
        return Err(Error::input("cannot score an empty path"));
    }
    let s = rasterize(polyline);
    let inside = s.iter().filter(|p| gt.get(**p)).count();
    Ok(Score {
        j: inside as f64 / s.len() as f64,
        traced: s.len(),
        inside,
    })
}
