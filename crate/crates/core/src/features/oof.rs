use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::conv::{convolve_separable_valid, gaussian_derivative_kernels, pad_reflect, Plane};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::math::SymMat2;

/// `Ψ(x, r)` for every pixel and every sampled radius.
#[derive(Debug, Clone, PartialEq)]
pub struct OofResponse {
    width: usize,
    height: usize,
    radii: Vec<u32>,
    /// Radius-major: `tensors[r * width * height + y * width + x]`.
    tensors: Vec<SymMat2>,
}

impl OofResponse {
    /// Assembles a response from precomputed tensors (radius-major layout).
    pub fn from_parts(
        width: usize,
        height: usize,
        radii: Vec<u32>,
        tensors: Vec<SymMat2>,
    ) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::config("at least one radius is required"));
        }
        if tensors.len() != radii.len() * width * height {
            return Err(Error::input(format!(
                "expected {} tensors, got {}",
                radii.len() * width * height,
                tensors.len()
            )));
        }
        Ok(OofResponse {
            width,
            height,
            radii,
            tensors,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn radii(&self) -> &[u32] {
        &self.radii
    }

    pub fn at(&self, x: usize, y: usize, radius_index: usize) -> SymMat2 {
        self.tensors[radius_index * self.width * self.height + y * self.width + x]
    }

    pub(crate) fn plane(&self, radius_index: usize) -> &[SymMat2] {
        let n = self.width * self.height;
        &self.tensors[radius_index * n..(radius_index + 1) * n]
    }

    /// Unit vector along the tube axis: the `λ2` eigenvector of `-Ψ`.
    pub fn tube_direction(&self, x: usize, y: usize, radius_index: usize) -> (f64, f64) {
        self.at(x, y, radius_index).scaled(-1.0).eigen().vectors.1
    }
}

/// Pixel offsets of the discrete disk indicator: centers with
/// `dx² + dy² <= r²`.
pub fn disk_offsets(r: u32) -> Vec<(i32, i32)> {
    let r = r as i32;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

fn disk_half_widths(r: u32) -> Vec<usize> {
    let r = r as i64;
    (-r..=r)
        .map(|dy| {
            let mut hw = 0i64;
            while (hw + 1) * (hw + 1) + dy * dy <= r * r {
                hw += 1;
            }
            hw as usize
        })
        .collect()
}

/// Oriented flux response `Ψ(x, r) = (I * ∇²G_σ * χ_r)(x)` with symmetric
/// reflection at the image border.
pub fn compute_oof(image: &GrayImage, sigma: f64, radii: &[u32]) -> Result<OofResponse> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::config(format!("sigma must be positive, got {sigma}")));
    }
    if radii.is_empty() {
        return Err(Error::config("at least one radius is required"));
    }
    if radii.iter().any(|&r| r < 1) {
        return Err(Error::config("radii must be at least one pixel"));
    }
    let kernels = gaussian_derivative_kernels(sigma);
    let r_max = *radii.iter().max().unwrap() as usize;
    let support = kernels.radius + r_max + 1;
    let min = support.max(GrayImage::MIN_SIDE);
    let (w, h) = (image.width(), image.height());
    if w < min || h < min {
        return Err(Error::Dimension {
            width: w,
            height: h,
            min,
        });
    }

    let padded = pad_reflect(image.data(), w, h, kernels.radius + r_max);
    let hxx = convolve_separable_valid(&padded, &kernels.g2, &kernels.g0);
    let hxy = convolve_separable_valid(&padded, &kernels.g1, &kernels.g1);
    let hyy = convolve_separable_valid(&padded, &kernels.g0, &kernels.g2);
    let prefix = [row_prefix(&hxx), row_prefix(&hxy), row_prefix(&hyy)];
    let pw = hxx.width + 1;

    let n = w * h;
    let mut tensors = vec![SymMat2::ZERO; radii.len() * n];
    for (ri, &r) in radii.iter().enumerate() {
        let half_widths = disk_half_widths(r);
        let r = r as usize;
        let out = &mut tensors[ri * n..(ri + 1) * n];
        for y in 0..h {
            for x in 0..w {
                // Center in the Hessian planes is (x + r_max, y + r_max).
                let cx = x + r_max;
                let cy = y + r_max;
                let mut acc = [0.0f64; 3];
                for (row, &hw) in half_widths.iter().enumerate() {
                    let py = cy + row - r;
                    let lo = py * pw + cx - hw;
                    let hi = py * pw + cx + hw + 1;
                    for (a, p) in acc.iter_mut().zip(&prefix) {
                        *a += p[hi] - p[lo];
                    }
                }
                out[y * w + x] = SymMat2::new(acc[0], acc[1], acc[2]);
            }
        }
    }
    Ok(OofResponse {
        width: w,
        height: h,
        radii: radii.to_vec(),
        tensors,
    })
}

/// Per-row inclusive prefix sums with a leading zero column.
fn row_prefix(p: &Plane) -> Vec<f64> {
    let pw = p.width + 1;
    let mut out = vec![0.0; pw * p.height];
    for y in 0..p.height {
        let mut acc = 0.0;
        for x in 0..p.width {
            acc += p.at(x, y);
            out[y * pw + x + 1] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_counts() {
        assert_eq!(disk_offsets(1).len(), 5);
        assert_eq!(disk_offsets(2).len(), 13);
        let hw = disk_half_widths(3);
        assert_eq!(hw, [0, 2, 2, 3, 2, 2, 0]);
        let total: usize = hw.iter().map(|h| 2 * h + 1).sum();
        assert_eq!(total, disk_offsets(3).len());
    }

    #[test]
    fn constant_image_has_zero_response() {
        let img = GrayImage::from_fn(32, 32, |_, _| 0.37).unwrap();
        let oof = compute_oof(&img, 1.5, &[1, 2, 3, 4]).unwrap();
        for ri in 0..4 {
            for m in oof.plane(ri) {
                assert!(m.xx.abs() < 1e-12 && m.xy.abs() < 1e-12 && m.yy.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let img = GrayImage::from_fn(32, 32, |_, _| 0.5).unwrap();
        assert!(matches!(compute_oof(&img, 0.0, &[1]), Err(Error::Config(_))));
        assert!(matches!(compute_oof(&img, 1.0, &[]), Err(Error::Config(_))));
        assert!(matches!(compute_oof(&img, 1.0, &[0]), Err(Error::Config(_))));
        let small = GrayImage::from_fn(16, 16, |_, _| 0.5).unwrap();
        assert!(compute_oof(&small, 1.5, &[1, 8]).is_ok());
        assert!(matches!(
            compute_oof(&small, 1.5, &[1, 12]),
            Err(Error::Dimension { min: 19, .. })
        ));
    }

    #[test]
    fn dark_disk_center_is_isotropic_positive() {
        let img = GrayImage::from_fn(48, 48, |x, y| {
            let dx = x as f64 - 24.0;
            let dy = y as f64 - 24.0;
            if dx * dx + dy * dy <= 16.0 {
                0.1
            } else {
                0.9
            }
        })
        .unwrap();
        let oof = compute_oof(&img, 1.5, &[4]).unwrap();
        let e = oof.at(24, 24, 0).eigen();
        assert!(e.values.0 > 0.0);
        assert!((e.values.0 - e.values.1).abs() < 1e-9 * e.values.1.abs());
    }
}
