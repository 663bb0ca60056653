use alloc::vec::Vec;

use super::grid::{LiftedGrid, LiftedPoint};
use super::stencil::STENCIL;
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Curvature model of the lifted metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MetricKind {
    /// Euler elastica.
    Fe,
    /// Forward-only sub-Riemannian (Reeds-Shepp forward car).
    #[default]
    Fsr,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Fe => "fe",
            MetricKind::Fsr => "fsr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            _ if s.eq_ignore_ascii_case("fe") => Some(MetricKind::Fe),
            _ if s.eq_ignore_ascii_case("fsr") => Some(MetricKind::Fsr),
            _ => None,
        }
    }
}

/// Parameters of the data-free part of the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricParams {
    pub kind: MetricKind,
    pub epsilon: f64,
    pub beta: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            kind: MetricKind::Fsr,
            epsilon: 0.1,
            beta: 20.0,
        }
    }
}

impl MetricParams {
    pub fn new(kind: MetricKind, epsilon: f64, beta: f64) -> Result<Self> {
        let p = MetricParams {
            kind,
            epsilon,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::config("epsilon must lie in (0, 1]"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config("beta must be positive"));
        }
        Ok(())
    }
}

/// Data-free Finsler length of the lifted vector `(u, nu)` at orientation
/// `theta`.
///
/// The elastica variant subtracts the alignment term, so that a unit step
/// along `n_theta` costs exactly 1 for every `epsilon`.
pub fn finsler(params: &MetricParams, theta: f64, u: (f64, f64), nu: f64) -> Result<f64> {
    if u.0 == 0.0 && u.1 == 0.0 && nu == 0.0 {
        return Err(Error::ZeroVector);
    }
    let inv = 1.0 / params.epsilon;
    let a = u.0 * libm::cos(theta) + u.1 * libm::sin(theta);
    let uu = u.0 * u.0 + u.1 * u.1;
    let bn = params.beta * nu;
    Ok(match params.kind {
        MetricKind::Fsr => {
            let back = a.min(0.0);
            let sq = a * a + bn * bn + inv * inv * (uu - a * a) + (inv * inv - 1.0) * back * back;
            sqrt(sq.max(0.0))
        }
        MetricKind::Fe => sqrt(inv * inv * uu + 2.0 * inv * bn * bn) - (inv - 1.0) * a,
    })
}

/// Full lifted metric `cost * finsler`.
pub fn metric_eval(
    params: &MetricParams,
    cost: f64,
    theta: f64,
    u: (f64, f64),
    nu: f64,
) -> Result<f64> {
    Ok(cost * finsler(params, theta, u, nu)?)
}

/// Metric bound to a grid and a cost field, with the data-free lengths of
/// every stencil move tabulated per orientation bin.
#[derive(Debug, Clone)]
pub struct LiftedMetric<'a> {
    grid: LiftedGrid,
    params: MetricParams,
    cost: &'a [f32],
    table: Vec<f64>,
}

impl<'a> LiftedMetric<'a> {
    pub fn new(grid: LiftedGrid, params: MetricParams, cost: &'a [f32]) -> Result<Self> {
        params.validate()?;
        if cost.len() != grid.len() {
            return Err(Error::input("cost field does not match the lifted grid"));
        }
        let h2 = grid.h2();
        let mut table = Vec::with_capacity(grid.n_theta() * STENCIL.len());
        for k in 0..grid.n_theta() {
            for off in STENCIL.iter() {
                table.push(finsler(
                    &params,
                    grid.theta(k),
                    (off.dx as f64, off.dy as f64),
                    off.dk as f64 * h2,
                )?);
            }
        }
        Ok(LiftedMetric {
            grid,
            params,
            cost,
            table,
        })
    }

    pub fn grid(&self) -> &LiftedGrid {
        &self.grid
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    pub fn cost_at(&self, index: usize) -> f64 {
        self.cost[index] as f64
    }

    /// Data-free length of stencil move `o` taken at bin `k`.
    pub fn move_length(&self, k: usize, o: usize) -> f64 {
        self.table[k * STENCIL.len() + o]
    }

    /// Destination of stencil move `o` from `p`, if it stays on the grid.
    pub fn step(&self, p: LiftedPoint, o: usize) -> Option<LiftedPoint> {
        let off = STENCIL[o];
        let q = LiftedPoint::new(
            p.x + off.dx,
            p.y + off.dy,
            self.grid.wrap_bin(p.bin, off.dk),
        );
        self.grid.contains(q).then_some(q)
    }

    /// Price of move `o` from `p` to `q`: trapezoidal average of the metric
    /// evaluated at both endpoints.
    pub fn edge_cost(&self, p: LiftedPoint, q: LiftedPoint, o: usize) -> f64 {
        let cp = self.cost_at(self.grid.index(p));
        let cq = self.cost_at(self.grid.index(q));
        0.5 * (cp * self.move_length(p.bin, o) + cq * self.move_length(q.bin, o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn params(kind: MetricKind) -> MetricParams {
        MetricParams::new(kind, 0.1, 20.0).unwrap()
    }

    #[test]
    fn fsr_limits() {
        let p = params(MetricKind::Fsr);
        let t = 0.7;
        let n = (libm::cos(t), libm::sin(t));
        assert!((finsler(&p, t, n, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((finsler(&p, t, (-n.0, -n.1), 0.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((finsler(&p, t, (-n.1, n.0), 0.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((finsler(&p, t, (0.0, 0.0), 0.5).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn fe_sign_convention() {
        let p = params(MetricKind::Fe);
        assert!((finsler(&p, 0.0, (1.0, 0.0), 0.0).unwrap() - 1.0).abs() < 1e-12);
        // With the printed "+" the aligned unit step would cost 10 + 9.
        assert!((finsler(&p, 0.0, (-1.0, 0.0), 0.0).unwrap() - 19.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_and_positivity() {
        for kind in [MetricKind::Fe, MetricKind::Fsr] {
            let p = params(kind);
            for i in 0..40 {
                let th = i as f64 * PI / 20.0;
                let u = (libm::cos(i as f64), libm::sin(2.0 * i as f64));
                let nu = 0.01 * (i as f64 - 20.0);
                let a = finsler(&p, th, u, nu).unwrap();
                let b = finsler(&p, th, (3.5 * u.0, 3.5 * u.1), 3.5 * nu).unwrap();
                assert!(a > 0.0);
                assert!((b - 3.5 * a).abs() < 1e-12 * b.max(1.0));
            }
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let p = params(MetricKind::Fsr);
        assert_eq!(finsler(&p, 0.0, (0.0, 0.0), 0.0), Err(Error::ZeroVector));
    }

    #[test]
    fn bad_params() {
        assert!(MetricParams::new(MetricKind::Fsr, 0.0, 1.0).is_err());
        assert!(MetricParams::new(MetricKind::Fsr, 1.5, 1.0).is_err());
        assert!(MetricParams::new(MetricKind::Fsr, 0.5, 0.0).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!(MetricKind::parse("FSR"), Some(MetricKind::Fsr));
        assert_eq!(MetricKind::parse("fe"), Some(MetricKind::Fe));
        assert_eq!(MetricKind::parse("x"), None);
    }
}
