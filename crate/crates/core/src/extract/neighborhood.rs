use alloc::vec;
use alloc::vec::Vec;

use super::trace::Trajectory;
use crate::image::Pixel;
use crate::math::SymMat2;

/// Trajectory prolonged along its end tangents, with the set `M` of pixels
/// closer than `tau` to the prolonged polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodMask {
    pub id: usize,
    /// Prolongation at the start (reversed), the trajectory, then the
    /// prolongation at the end.
    pub prolonged: Vec<Pixel>,
    pub tau: f64,
    origin: Pixel,
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl NeighborhoodMask {
    pub fn contains(&self, p: Pixel) -> bool {
        let x = p.x - self.origin.x;
        let y = p.y - self.origin.y;
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    /// Pixels of `M` in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| {
            Pixel::new(
                self.origin.x + (i % self.width) as i32,
                self.origin.y + (i / self.width) as i32,
            )
        })
    }

    /// Inclusive bounding box `(min, max)`.
    pub fn bounds(&self) -> (Pixel, Pixel) {
        (
            self.origin,
            Pixel::new(
                self.origin.x + self.width as i32 - 1,
                self.origin.y + self.height as i32 - 1,
            ),
        )
    }
}

const TANGENT_WINDOW: usize = 5;

/// Unit tangent pointing outward at the start (`at_end == false`) or end of
/// `points`: the total least-squares line over the last five points.
pub fn endpoint_tangent(points: &[Pixel], at_end: bool) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len().min(TANGENT_WINDOW);
    let mut window: Vec<Pixel> = if at_end {
        points[points.len() - m..].to_vec()
    } else {
        points[..m].iter().rev().copied().collect()
    };
    // window now runs inward -> endpoint.
    let tip = *window.last().unwrap();
    let inner = window[0];
    let (mx, my) = window.iter().fold((0.0, 0.0), |acc, p| {
        (acc.0 + p.x as f64 / m as f64, acc.1 + p.y as f64 / m as f64)
    });
    let mut cov = SymMat2::ZERO;
    for p in window.drain(..) {
        let dx = p.x as f64 - mx;
        let dy = p.y as f64 - my;
        cov.xx += dx * dx;
        cov.xy += dx * dy;
        cov.yy += dy * dy;
    }
    let mut dir = cov.eigen().vectors.1;
    let chord = ((tip.x - inner.x) as f64, (tip.y - inner.y) as f64);
    let dot = dir.0 * chord.0 + dir.1 * chord.1;
    if dot < 0.0 {
        dir = (-dir.0, -dir.1);
    } else if dot == 0.0 {
        let n = crate::math::hypot(chord.0, chord.1);
        if n == 0.0 {
            return None;
        }
        dir = (chord.0 / n, chord.1 / n);
    }
    Some(dir)
}

fn prolongation(tip: Pixel, dir: (f64, f64), len: usize, width: usize, height: usize) -> Vec<Pixel> {
    let mut out: Vec<Pixel> = Vec::with_capacity(len);
    for s in 1..=len {
        let p = Pixel::new(
            libm::round(tip.x as f64 + s as f64 * dir.0) as i32,
            libm::round(tip.y as f64 + s as f64 * dir.1) as i32,
        );
        if p.x < 0 || p.y < 0 || p.x as usize >= width || p.y as usize >= height {
            break;
        }
        if out.last() != Some(&p) && p != tip {
            out.push(p);
        }
    }
    out
}

/// Builds the prolonged trajectory and its tubular neighbourhood
/// `M = {x : min_y |x - y| < tau}` on a `width x height` grid.
pub fn build_neighborhood(
    traj: &Trajectory,
    prolong_len: usize,
    tau: f64,
    width: usize,
    height: usize,
) -> NeighborhoodMask {
    let pts = &traj.points;
    let mut prolonged = Vec::with_capacity(pts.len() + 2 * prolong_len);
    if prolong_len > 0 {
        if let Some(dir) = endpoint_tangent(pts, false) {
            let mut head = prolongation(pts[0], dir, prolong_len, width, height);
            head.reverse();
            prolonged.extend(head);
        }
    }
    prolonged.extend_from_slice(pts);
    if prolong_len > 0 {
        if let Some(dir) = endpoint_tangent(pts, true) {
            prolonged.extend(prolongation(*pts.last().unwrap(), dir, prolong_len, width, height));
        }
    }

    let reach = libm::ceil(tau) as i32;
    let (mut lo, mut hi) = (prolonged[0], prolonged[0]);
    for p in &prolonged {
        lo = Pixel::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Pixel::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let origin = Pixel::new((lo.x - reach).max(0), (lo.y - reach).max(0));
    let end = Pixel::new(
        (hi.x + reach).min(width as i32 - 1),
        (hi.y + reach).min(height as i32 - 1),
    );
    let mw = (end.x - origin.x + 1) as usize;
    let mh = (end.y - origin.y + 1) as usize;
    let mut bits = vec![false; mw * mh];
    let tau2 = tau * tau;
    for p in &prolonged {
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if ((dx * dx + dy * dy) as f64) >= tau2 {
                    continue;
                }
                let x = p.x + dx - origin.x;
                let y = p.y + dy - origin.y;
                if x >= 0 && y >= 0 && (x as usize) < mw && (y as usize) < mh {
                    bits[y as usize * mw + x as usize] = true;
                }
            }
        }
    }
    NeighborhoodMask {
        id: traj.id,
        prolonged,
        tau,
        origin,
        width: mw,
        height: mh,
        bits,
    }
}

/// `M_i ∩ T_j ≠ ∅`.
pub fn adjacent(mask_i: &NeighborhoodMask, prolonged_j: &[Pixel]) -> bool {
    prolonged_j.iter().any(|&p| mask_i.contains(p))
}
