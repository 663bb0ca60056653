use crate::error::{Error, Result};
use crate::features::FeatureParams;
use crate::geodesic::{MarchOptions, MetricKind, MetricParams};

/// How graph edges are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Weighting {
    /// Curvature length of lifted geodesic bridges.
    Geodesic(MetricKind),
    /// Straight segments priced by length and endpoint angles.
    GroupAngle,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Geodesic(MetricKind::Fsr) => "group-fsr",
            Weighting::Geodesic(MetricKind::Fe) => "group-fe",
            Weighting::GroupAngle => "group-angle",
        }
    }
}

/// Every tunable of the pipeline. Defaults for the filter and metric are
/// the published settings; the extraction knobs are engineering choices.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PipelineConfig {
    pub sigma: f64,
    pub r_min: u32,
    pub r_max: u32,
    pub n_theta: usize,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Curvature weight of the data-free bridge length.
    pub beta_e: f64,
    pub metric: MetricKind,
    pub threshold_quantile: f64,
    pub tau: f64,
    pub prolong_len: usize,
    pub min_len: usize,
    pub invert: bool,
    /// Angle weight of the straight-segment baseline.
    pub angle_weight: f64,
    /// Extra pixels around the two neighbourhoods a bridge front may visit.
    pub bridge_margin: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sigma: 1.5,
            r_min: 1,
            r_max: 8,
            n_theta: 60,
            alpha: 5.0,
            beta: 20.0,
            epsilon: 0.1,
            beta_e: 20.0,
            metric: MetricKind::Fsr,
            threshold_quantile: 0.6,
            tau: 5.0,
            prolong_len: 10,
            min_len: 5,
            invert: false,
            angle_weight: 1.0,
            bridge_margin: 10,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(alloc::format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.sigma, "sigma")?;
        positive(self.alpha, "alpha")?;
        positive(self.tau, "tau")?;
        if self.r_min < 1 || self.r_max < self.r_min {
            return Err(Error::config("radii must satisfy 1 <= r_min <= r_max"));
        }
        if self.n_theta < 8 || self.n_theta % 2 != 0 {
            return Err(Error::config("n_theta must be even and at least 8"));
        }
        self.metric_params().validate()?;
        if !(self.beta_e >= 0.0 && self.beta_e.is_finite()) {
            return Err(Error::config("beta_e must be non-negative"));
        }
        if !(self.threshold_quantile > 0.0 && self.threshold_quantile < 1.0) {
            return Err(Error::config("threshold_quantile must lie in (0, 1)"));
        }
        if self.min_len < 1 {
            return Err(Error::config("min_len must be at least 1"));
        }
        if !(self.angle_weight >= 0.0 && self.angle_weight.is_finite()) {
            return Err(Error::config("angle_weight must be non-negative"));
        }
        Ok(())
    }

    pub fn feature_params(&self) -> FeatureParams {
        FeatureParams {
            sigma: self.sigma,
            r_min: self.r_min,
            r_max: self.r_max,
            n_theta: self.n_theta,
            alpha: self.alpha,
            invert: self.invert,
        }
    }

    pub fn metric_params(&self) -> MetricParams {
        self.metric_params_for(self.metric)
    }

    pub fn metric_params_for(&self, kind: MetricKind) -> MetricParams {
        MetricParams {
            kind,
            epsilon: self.epsilon,
            beta: self.beta,
        }
    }

    pub fn march_options(&self) -> MarchOptions {
        MarchOptions {
            beta_e: self.beta_e,
            region: None,
        }
    }

    pub fn weighting(&self) -> Weighting {
        Weighting::Geodesic(self.metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!((c.sigma, c.n_theta, c.alpha, c.beta, c.epsilon), (1.5, 60, 5.0, 20.0, 0.1));
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            PipelineConfig { n_theta: 61, ..Default::default() },
            PipelineConfig { epsilon: 0.0, ..Default::default() },
            PipelineConfig { r_min: 3, r_max: 2, ..Default::default() },
            PipelineConfig { threshold_quantile: 1.0, ..Default::default() },
            PipelineConfig { alpha: -1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }
}
