//! TOML configuration and content-derived cache keys.

use std::path::Path;

use sha2::{Digest, Sha256};
use tubetrack_core::{GrayImage, PipelineConfig, Weighting};

use crate::error::{Error, Result};

/// Parses a TOML document; missing keys keep their defaults, unknown keys
/// are rejected.
pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

pub fn config_to_toml(cfg: &PipelineConfig) -> String {
    toml::to_string_pretty(cfg).expect("config is always representable as TOML")
}

/// Applies a JSON object of per-key overrides.
pub fn apply_overrides(base: &PipelineConfig, overrides: &serde_json::Value) -> Result<PipelineConfig> {
    let serde_json::Value::Object(over) = overrides else {
        return Err(Error::Config("overrides must be a JSON object".into()));
    };
    let mut v = serde_json::to_value(base).expect("config serializes");
    let obj = v.as_object_mut().unwrap();
    for (k, val) in over {
        obj.insert(k.clone(), val.clone());
    }
    let cfg: PipelineConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_weighting(s: &str) -> Result<Weighting> {
    match s.to_ascii_lowercase().as_str() {
        "fsr" | "group-fsr" => Ok(Weighting::Geodesic(tubetrack_core::MetricKind::Fsr)),
        "fe" | "group-fe" => Ok(Weighting::Geodesic(tubetrack_core::MetricKind::Fe)),
        "angle" | "group-angle" => Ok(Weighting::GroupAngle),
        other => Err(Error::Request(format!(
            "unknown metric {other:?}; expected fsr, fe or angle"
        ))),
    }
}

/// SHA-256 of the image dimensions and pixel values.
pub fn image_hash(img: &GrayImage) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((img.width() as u64).to_le_bytes());
    h.update((img.height() as u64).to_le_bytes());
    for v in img.data() {
        h.update(v.to_le_bytes());
    }
    h.finalize().into()
}

const KEY_VERSION: &[u8] = b"tubetrack-cache-1";

/// Key of the feature field: image plus the filter parameters.
pub fn feature_key(image: &[u8; 32], cfg: &PipelineConfig) -> [u8; 32] {
    let p = cfg.feature_params();
    let mut h = Sha256::new();
    h.update(KEY_VERSION);
    h.update(b"features");
    h.update(image);
    h.update(p.sigma.to_le_bytes());
    h.update(p.r_min.to_le_bytes());
    h.update(p.r_max.to_le_bytes());
    h.update((p.n_theta as u64).to_le_bytes());
    h.update(p.alpha.to_le_bytes());
    h.update([p.invert as u8]);
    h.finalize().into()
}

/// Key of a priced graph: image, every configuration value and the
/// weighting.
pub fn graph_key(image: &[u8; 32], cfg: &PipelineConfig, weighting: Weighting) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(KEY_VERSION);
    h.update(b"graph");
    h.update(image);
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    h.update(weighting.name().as_bytes());
    h.finalize().into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults_and_overrides() {
        let cfg = parse_config("beta = 40.0\nmetric = \"fe\"\n").unwrap();
        assert_eq!(cfg.beta, 40.0);
        assert_eq!(cfg.metric, tubetrack_core::MetricKind::Fe);
        assert_eq!(cfg.sigma, 1.5);
        let back = parse_config(&config_to_toml(&cfg)).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(parse_config("betta = 1.0"), Err(Error::Config(_))));
        assert!(parse_config("n_theta = 7").is_err());
        let cfg = PipelineConfig::default();
        assert!(apply_overrides(&cfg, &serde_json::json!({"epsilon": 0.0})).is_err());
        let o = apply_overrides(&cfg, &serde_json::json!({"threshold_quantile": 0.9})).unwrap();
        assert_eq!(o.threshold_quantile, 0.9);
    }

    #[test]
    fn keys_track_their_inputs() {
        let img = GrayImage::from_fn(16, 16, |x, _| x as f64 / 15.0).unwrap();
        let h = image_hash(&img);
        let a = PipelineConfig::default();
        let b = PipelineConfig { beta: 40.0, ..a.clone() };
        let w = a.weighting();
        assert_eq!(graph_key(&h, &a, w), graph_key(&h, &a.clone(), w));
        assert_ne!(graph_key(&h, &a, w), graph_key(&h, &b, w));
        assert_ne!(graph_key(&h, &a, w), graph_key(&h, &a, Weighting::GroupAngle));
        // The filter does not depend on beta.
        assert_eq!(feature_key(&h, &a), feature_key(&h, &b));
        let other = GrayImage::from_fn(16, 16, |x, _| x as f64 / 16.0).unwrap();
        assert_ne!(image_hash(&other), h);
    }
}
