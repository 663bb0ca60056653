use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::oof::{compute_oof, OofResponse};
use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Filter parameters for [`TubularFeatures::compute`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureParams {
    pub sigma: f64,
    pub r_min: u32,
    pub r_max: u32,
    pub n_theta: usize,
    pub alpha: f64,
    /// Treat bright structures on a dark background.
    pub invert: bool,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            sigma: 1.5,
            r_min: 1,
            r_max: 8,
            n_theta: 60,
            alpha: 5.0,
            invert: false,
        }
    }
}

impl FeatureParams {
    pub fn radii(&self) -> Vec<u32> {
        (self.r_min..=self.r_max).collect()
    }
}

/// Per-pixel vessel score `ζ` and scale `ρ`, plus per-(pixel, orientation)
/// scores `ψ_os` and cost `𝔈`. Planes are stored as `f32`, the precision
/// of the on-disk container, so cached and fresh sessions agree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TubularFeatures {
    width: usize,
    height: usize,
    n_theta: usize,
    zeta: Vec<f32>,
    rho: Vec<f32>,
    psi: Vec<f32>,
    cost: Vec<f32>,
}

impl TubularFeatures {
    pub fn compute(image: &GrayImage, params: &FeatureParams) -> Result<Self> {
        check_n_theta(params.n_theta)?;
        if !(params.alpha > 0.0) {
            return Err(Error::config("alpha must be positive"));
        }
        if params.r_min < 1 || params.r_max < params.r_min {
            return Err(Error::config("radius range must satisfy 1 <= r_min <= r_max"));
        }
        let inverted;
        let source = if params.invert {
            inverted = image.inverted();
            &inverted
        } else {
            image
        };
        let oof = compute_oof(source, params.sigma, &params.radii())?;
        let (mut zeta, rho) = vesselness_and_scale(&oof);
        // FFT round-off on flat regions is not signal
        let scale = source.data().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        for z in zeta.iter_mut().filter(|z| **z <= ROUNDOFF * scale) {
            *z = 0.0;
        }
        let psi = orientation_scores(&oof, &rho, params.n_theta)?;
        let psi: Vec<f32> = psi.into_iter().map(|v| v as f32).collect();
        let cost = psi
            .iter()
            .map(|&p| cost_value(p as f64, params.alpha) as f32)
            .collect();
        Ok(TubularFeatures {
            width: image.width(),
            height: image.height(),
            n_theta: params.n_theta,
            zeta: zeta.into_iter().map(|v| v as f32).collect(),
            rho: rho.into_iter().map(|v| v as f32).collect(),
            psi,
            cost,
        })
    }

    /// Reassembles features from stored planes.
    pub fn from_parts(
        width: usize,
        height: usize,
        n_theta: usize,
        zeta: Vec<f32>,
        rho: Vec<f32>,
        psi: Vec<f32>,
        cost: Vec<f32>,
    ) -> Result<Self> {
        check_n_theta(n_theta)?;
        let n = width * height;
        if zeta.len() != n || rho.len() != n || psi.len() != n * n_theta || cost.len() != n * n_theta
        {
            return Err(Error::input("feature plane sizes do not match the grid"));
        }
        if cost.iter().any(|&c| !(c > 0.0 && c <= 1.0)) {
            return Err(Error::input("cost values must lie in (0, 1]"));
        }
        Ok(TubularFeatures {
            width,
            height,
            n_theta,
            zeta,
            rho,
            psi,
            cost,
        })
    }

    /// Features of a structureless image with a uniform unit cost.
    pub fn uniform(width: usize, height: usize, n_theta: usize) -> Self {
        let n = width * height;
        TubularFeatures {
            width,
            height,
            n_theta,
            zeta: vec![0.0; n],
            rho: vec![1.0; n],
            psi: vec![0.0; n * n_theta],
            cost: vec![1.0; n * n_theta],
        }
    }

    /// Features with a given orientation-score field; `𝔈 = exp(-α ψ)`.
    pub fn from_scores(
        width: usize,
        height: usize,
        n_theta: usize,
        psi: Vec<f32>,
        alpha: f64,
    ) -> Result<Self> {
        let cost = cost_function(&psi, alpha)?;
        let mut zeta = vec![0.0f32; width * height];
        for (i, z) in zeta.iter_mut().enumerate() {
            *z = psi[i * n_theta..(i + 1) * n_theta]
                .iter()
                .copied()
                .fold(0.0, f32::max);
        }
        TubularFeatures::from_parts(
            width,
            height,
            n_theta,
            zeta,
            vec![1.0; width * height],
            psi,
            cost,
        )
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

    pub fn zeta(&self) -> &[f32] {
        &self.zeta
    }

    pub fn rho(&self) -> &[f32] {
        &self.rho
    }

    /// Layout `psi[(y * width + x) * n_theta + k]`.
    pub fn psi(&self) -> &[f32] {
        &self.psi
    }

    /// Same layout as [`psi`](Self::psi).
    pub fn cost(&self) -> &[f32] {
        &self.cost
    }

    pub fn psi_at(&self, x: usize, y: usize) -> &[f32] {
        let i = (y * self.width + x) * self.n_theta;
        &self.psi[i..i + self.n_theta]
    }
}

/// Scores at or below this fraction of the largest intensity are zeroed.
const ROUNDOFF: f64 = 1e-9;

fn check_n_theta(n_theta: usize) -> Result<()> {
    if n_theta < 8 || n_theta % 2 != 0 {
        return Err(Error::config(format!(
            "n_theta must be even and at least 8, got {n_theta}"
        )));
    }
    Ok(())
}

/// `ζ(x) = max(max_r -λ1(x, r) / r, 0)` and `ρ(x) = argmax_r -λ1(x, r) / r`,
/// with `λ1 <= λ2` the eigenvalues of the tubularity tensor `-Ψ`. Ties keep
/// the smallest radius.
pub fn vesselness_and_scale(oof: &OofResponse) -> (Vec<f64>, Vec<f64>) {
    let n = oof.width() * oof.height();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut rho = vec![oof.radii()[0] as f64; n];
    for (ri, &r) in oof.radii().iter().enumerate() {
        let rf = r as f64;
        for (i, m) in oof.plane(ri).iter().enumerate() {
            let lambda1 = m.scaled(-1.0).eigen().values.0;
            let score = -lambda1 / rf;
            if score > best[i] {
                best[i] = score;
                rho[i] = rf;
            }
        }
    }
    let zeta = best.into_iter().map(|s| s.max(0.0)).collect();
    (zeta, rho)
}

/// `ψ_os(x, θ_k) = max(<n⊥, Ψ(x, ρ(x)) n⊥>, 0)` on `θ_k = 2πk / n_theta`,
/// normalized by its global maximum. The second half of the bins copies the
/// first, so the field is exactly π-periodic.
pub fn orientation_scores(oof: &OofResponse, rho: &[f64], n_theta: usize) -> Result<Vec<f64>> {
    check_n_theta(n_theta)?;
    let n = oof.width() * oof.height();
    if rho.len() != n {
        return Err(Error::input("scale map does not match the response grid"));
    }
    let half = n_theta / 2;
    let normals: Vec<(f64, f64)> = (0..half)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_theta as f64;
            (-libm::sin(theta), libm::cos(theta))
        })
        .collect();
    let radius_index = |r: f64| oof.radii().iter().position(|&q| q as f64 == r);
    let mut psi = vec![0.0; n * n_theta];
    let mut peak = 0.0f64;
    for i in 0..n {
        let ri = radius_index(rho[i])
            .ok_or_else(|| Error::input(format!("scale {} is not a sampled radius", rho[i])))?;
        let m = oof.plane(ri)[i];
        let row = &mut psi[i * n_theta..(i + 1) * n_theta];
        for (k, nv) in normals.iter().enumerate() {
            let v = m.quadratic(*nv).max(0.0);
            row[k] = v;
            row[k + half] = v;
            peak = peak.max(v);
        }
    }
    if peak > 0.0 {
        psi.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(psi)
}

/// `𝔈 = exp(-α ψ)`.
pub fn cost_value(psi: f64, alpha: f64) -> f64 {
    libm::exp(-alpha * psi)
}

pub fn cost_function(psi: &[f32], alpha: f64) -> Result<Vec<f32>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::config(format!("alpha must be positive, got {alpha}")));
    }
    Ok(psi.iter().map(|&p| cost_value(p as f64, alpha) as f32).collect())
}
