use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::extract::BinaryMask;
use crate::image::{GrayImage, Pixel};
use crate::math::hypot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SceneKind {
    /// Archimedean spiral, seeds at its two ends.
    Spiral,
    /// A nearly closed ring with occlusions, seeds at its two close ends,
    /// crossed twice by an arc.
    CrossingPair,
    /// The same layout with a strongly lobed ring.
    TortuousPair,
    /// One gently curved structure.
    Line,
}

impl SceneKind {
    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Spiral => "spiral",
            SceneKind::CrossingPair => "crossing-pair",
            SceneKind::TortuousPair => "tortuous-pair",
            SceneKind::Line => "line",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [SceneKind::Spiral, SceneKind::CrossingPair, SceneKind::TortuousPair, SceneKind::Line]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub width: usize,
    pub height: usize,
    /// Tube width per structure, in pixels; the last value repeats.
    pub widths: Vec<f64>,
    /// Standard deviation of the additive Gaussian noise.
    pub noise: f64,
    /// Arc length of each occlusion along a target, in pixels.
    pub occlusion: f64,
    pub seed: u64,
}

impl SceneSpec {
    /// A 474x321 scene with 5 px tubes and noise 0.15.
    pub fn new(kind: SceneKind, seed: u64) -> Self {
        SceneSpec {
            kind,
            width: 474,
            height: 321,
            widths: vec![5.0],
            noise: 0.15,
            occlusion: 14.0,
            seed,
        }
    }

    fn width_of(&self, i: usize) -> f64 {
        self.widths
            .get(i)
            .or(self.widths.last())
            .copied()
            .unwrap_or(5.0)
    }
}

/// Ground truth of one rendered structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    /// Centerline resampled every quarter pixel, including occluded parts.
    pub centerline: Vec<(f64, f64)>,
    pub width: f64,
    /// Pixels whose centre lies within half a width (plus half a pixel) of
    /// the centerline.
    pub mask: BinaryMask,
    pub seeds: (Pixel, Pixel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub spec: SceneSpec,
    /// Rendering before noise.
    pub clean: GrayImage,
    pub image: GrayImage,
    pub structures: Vec<Structure>,
}

pub const BACKGROUND: f64 = 1.0;
pub const FOREGROUND: f64 = 0.0;
const SAMPLE_STEP: f64 = 0.25;
const SEED_INSET: f64 = 8.0;

/// Curve sampled at arc-length spacing [`SAMPLE_STEP`], with occluded
/// arc-length intervals.
struct Curve {
    points: Vec<(f64, f64)>,
    /// Curve parameter of each sample.
    params: Vec<f64>,
    gaps: Vec<(f64, f64)>,
}

impl Curve {
    fn from_fn(f: impl Fn(f64) -> (f64, f64)) -> Self {
        let n = 20_000;
        let dense: Vec<(f64, f64)> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        let mut points = vec![dense[0]];
        let mut params = vec![0.0];
        let mut carry = 0.0;
        for (i, w) in dense.windows(2).enumerate() {
            let seg = hypot(w[1].0 - w[0].0, w[1].1 - w[0].1);
            let mut t = SAMPLE_STEP - carry;
            while t <= seg {
                let a = t / seg;
                points.push((w[0].0 + a * (w[1].0 - w[0].0), w[0].1 + a * (w[1].1 - w[0].1)));
                params.push((i as f64 + a) / n as f64);
                t += SAMPLE_STEP;
            }
            carry = seg - (t - SAMPLE_STEP);
        }
        Curve {
            points,
            params,
            gaps: Vec::new(),
        }
    }

    fn length(&self) -> f64 {
        (self.points.len() - 1) as f64 * SAMPLE_STEP
    }

    /// Occludes `len` pixels of arc centred where the parameter reaches `s`.
    fn with_gap(mut self, s: f64, len: f64) -> Self {
        let i = self.params.partition_point(|&p| p < s);
        let c = i as f64 * SAMPLE_STEP;
        self.gaps.push((c - 0.5 * len, c + 0.5 * len));
        self
    }

    fn occluded(&self, i: usize) -> bool {
        let s = i as f64 * SAMPLE_STEP;
        self.gaps.iter().any(|&(a, b)| s >= a && s <= b)
    }

    fn point_at(&self, arc: f64) -> (f64, f64) {
        let i = libm::round(arc / SAMPLE_STEP) as usize;
        self.points[i.min(self.points.len() - 1)]
    }
}

fn curves(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Vec<Curve> {
    let (w, h) = (spec.width as f64, spec.height as f64);
    let mut jitter = |lo: f64, hi: f64| Uniform::new_inclusive(lo, hi).unwrap().sample(rng);
    match spec.kind {
        SceneKind::Spiral => {
            // Occluded spiral plus short strokes joining neighbouring arms.
            let (cx, cy) = (0.5 * w, 0.5 * h);
            let turns = 3.0;
            let r0 = 0.05 * h.min(w);
            let pitch = (0.45 * h.min(w) - r0) / turns;
            let phase = jitter(0.0, 2.0 * PI);
            let at = move |t: f64| {
                let r = r0 + pitch * t / (2.0 * PI);
                (cx + r * libm::cos(t + phase), cy + r * libm::sin(t + phase))
            };
            let total = turns * 2.0 * PI;
            let mut spiral = Curve::from_fn(|s| at(s * total));
            let per_turn = 1;
            let first = jitter(0.0, 2.0 * PI / per_turn as f64);
            let mut t = 2.0 * PI + first;
            while t < total - 0.5 * PI {
                spiral = spiral.with_gap(t / total, spec.occlusion);
                t += 2.0 * PI / per_turn as f64;
            }
            let mut out = vec![spiral];
            // Staggered by half a turn so each stroke skips a single turn.
            let stroke_angle = first + PI / per_turn as f64;
            for k in 1..turns as usize {
                let t = stroke_angle + k as f64 * 2.5 * PI;
                // Overhang both arms so each junction is a full crossing.
                let (a, b) = (at(t), at(t - 2.0 * PI));
                let len = hypot(b.0 - a.0, b.1 - a.1);
                let (ux, uy) = ((b.0 - a.0) / len, (b.1 - a.1) / len);
                let over = 12.0;
                out.push(Curve::from_fn(move |s| {
                    let d = -over + s * (len + 2.0 * over);
                    (a.0 + d * ux, a.1 + d * uy)
                }));
            }
            out
        }
        SceneKind::CrossingPair => {
            let cx = 0.5 * w + jitter(-8.0, 0.0);
            let cy = 0.5 * h + jitter(-4.0, 4.0);
            let radius = h * jitter(0.37, 0.4);
            let open = jitter(0.24, 0.3);
            let cut = jitter(0.74, 0.8);
            ring_and_arc(spec, (cx, cy), radius, open, cut, (0, 0.0))
        }
        SceneKind::TortuousPair => {
            let cx = 0.5 * w + jitter(-8.0, 0.0);
            let cy = 0.5 * h + jitter(-4.0, 4.0);
            let radius = h * jitter(0.35, 0.37);
            let open = jitter(0.24, 0.3);
            let amp = jitter(11.0, 13.0);
            ring_and_arc(spec, (cx, cy), radius, open, 0.25 * PI, (8, amp))
        }
        SceneKind::Line => {
            let bend = jitter(0.05, 0.1);
            vec![Curve::from_fn(|s| {
                (w * (0.1 + 0.8 * s), h * (0.5 + bend * libm::sin(PI * s)))
            })]
        }
    }
}

/// A nearly closed ring, optionally lobed, whose two close ends carry the
/// seeds, and an arc of a circle meeting it at right angles at polar
/// angles `+-cut`. Leaving the ring for the arc takes two right-angle turns;
/// staying on it means bridging the two occlusions on the far side.
///
/// With `lobes = (m, a)` the radius is `radius + a sin(m t + pi/2 - m cut)`,
/// so both crossings sit on lobe crests where the ring runs tangentially;
/// `m cut` must then be a multiple of `2 pi`.
fn ring_and_arc(
    spec: &SceneSpec,
    (cx, cy): (f64, f64),
    radius: f64,
    open: f64,
    cut: f64,
    (lobes, amp): (u32, f64),
) -> Vec<Curve> {
    let m = lobes as f64;
    let phase = 0.5 * PI - m * cut;
    let r = move |t: f64| radius + amp * libm::sin(m * t + phase);
    let sweep = 2.0 * PI - 2.0 * open;
    let mut ring = Curve::from_fn(|s| {
        let t = open + s * sweep;
        (cx + r(t) * libm::cos(t), cy + r(t) * libm::sin(t))
    });
    for k in 1..=2 {
        let mut t = cut + k as f64 * (2.0 * PI - 2.0 * cut) / 3.0;
        if lobes > 0 {
            // Move to the nearest flank, where the lobed ring is straightest.
            let u = libm::round((m * t + phase) / PI) * PI;
            t = (u - phase) / m;
        }
        ring = ring.with_gap((t - open) / sweep, spec.occlusion);
    }
    // Circle orthogonal to the one of radius r(cut) through both crossings;
    // on it the ring is met at pi +- (pi/2 - cut).
    let rc = r(cut);
    let (ox, oy) = (cx + rc / libm::cos(cut), cy);
    let rho = rc * libm::tan(cut);
    let half = 0.5 * PI - cut + 0.5;
    let arc = Curve::from_fn(move |s| {
        let t = PI - half + s * 2.0 * half;
        (ox + rho * libm::cos(t), oy + rho * libm::sin(t))
    });
    vec![ring, arc]
}

fn round_px(p: (f64, f64)) -> Pixel {
    Pixel::new(libm::round(p.0) as i32, libm::round(p.1) as i32)
}

/// Renders the scene for `spec`; deterministic in every field of `spec`.
pub fn generate_scene(spec: &SceneSpec) -> Result<SyntheticScene> {
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::config("noise level must be non-negative"));
    }
    if spec.width < GrayImage::MIN_SIDE || spec.height < GrayImage::MIN_SIDE {
        return Err(Error::Dimension {
            width: spec.width,
            height: spec.height,
            min: GrayImage::MIN_SIDE,
        });
    }
    if !(spec.occlusion >= 0.0 && spec.occlusion.is_finite()) {
        return Err(Error::config("occlusion length must be non-negative"));
    }
    if spec.widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::config("tube widths must be positive"));
    }
    let mut geometry_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let curves = curves(spec, &mut geometry_rng);

    let (w, h) = (spec.width, spec.height);
    let mut clean = vec![BACKGROUND; w * h];
    let mut structures = Vec::with_capacity(curves.len());
    for (ci, curve) in curves.iter().enumerate() {
        let width = spec.width_of(ci);
        let reach = 0.5 * width + 1.5;
        for &(x, y) in &curve.points {
            if x < reach || y < reach || x > w as f64 - 1.0 - reach || y > h as f64 - 1.0 - reach {
                return Err(Error::Generation(format!(
                    "{} structure {ci} leaves the {w}x{h} canvas near ({x:.1}, {y:.1})",
                    spec.kind.name()
                )));
            }
        }
        let mut all = vec![f64::INFINITY; w * h];
        let mut drawn = vec![f64::INFINITY; w * h];
        let r = libm::ceil(reach) as i32;
        for (i, &(x, y)) in curve.points.iter().enumerate() {
            let occluded = curve.occluded(i);
            let c = round_px((x, y));
            for py in c.y - r..=c.y + r {
                for px in c.x - r..=c.x + r {
                    let k = py as usize * w + px as usize;
                    let d = hypot(px as f64 - x, py as f64 - y);
                    if d < all[k] {
                        all[k] = d;
                    }
                    if !occluded && d < drawn[k] {
                        drawn[k] = d;
                    }
                }
            }
        }
        let half = 0.5 * width + 0.5;
        let mut mask = BinaryMask::new(w, h);
        for k in 0..w * h {
            let cover = (half - drawn[k]).clamp(0.0, 1.0);
            let v = BACKGROUND - (BACKGROUND - FOREGROUND) * cover;
            if v < clean[k] {
                clean[k] = v;
            }
            if all[k] < half {
                mask.set(Pixel::new((k % w) as i32, (k / w) as i32), true);
            }
        }
        let len = curve.length();
        structures.push(Structure {
            centerline: curve.points.clone(),
            width,
            mask,
            seeds: (
                round_px(curve.point_at(SEED_INSET)),
                round_px(curve.point_at(len - SEED_INSET)),
            ),
        });
    }

    let mut noisy = clean.clone();
    if spec.noise > 0.0 {
        let normal = Normal::new(0.0, spec.noise).map_err(|e| Error::config(format!("{e}")))?;
        for v in noisy.iter_mut() {
            *v = (*v + normal.sample(&mut noise_rng)).clamp(0.0, 1.0);
        }
    }
    Ok(SyntheticScene {
        spec: spec.clone(),
        clean: GrayImage::new(w, h, clean)?,
        image: GrayImage::new(w, h, noisy)?,
        structures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    #[test]
    fn noiseless_profile_is_two_level() {
        for kind in [SceneKind::Spiral, SceneKind::CrossingPair, SceneKind::TortuousPair, SceneKind::Line] {
            let mut spec = SceneSpec::new(kind, 3);
            spec.noise = 0.0;
            let s = generate_scene(&spec).unwrap();
            assert_eq!(s.image, s.clean);
            let data = s.image.data();
            assert!(data.iter().all(|&v| (FOREGROUND..=BACKGROUND).contains(&v)));
            let core = data.iter().filter(|&&v| v == FOREGROUND).count();
            let bg = data.iter().filter(|&&v| v == BACKGROUND).count();
            let band = data.len() - core - bg;
            assert!(core > 0 && band < core + bg, "{kind:?}");
            assert!(!s.structures.is_empty());
        }
    }

    #[test]
    fn noise_level_is_respected() {
        let s = generate_scene(&SceneSpec::new(SceneKind::Spiral, 11)).unwrap();
        let bg: Vec<f64> = s
            .clean
            .data()
            .iter()
            .zip(s.image.data())
            .filter(|(c, _)| **c == BACKGROUND)
            .map(|(_, n)| *n)
            .collect();
        // Background sits at the clamp, so only the lower half survives:
        // E[max(0, -n)] = sigma / sqrt(2 pi).
        let shortfall = bg.iter().map(|v| BACKGROUND - v).sum::<f64>() / bg.len() as f64;
        let sigma = shortfall * sqrt(2.0 * PI);
        assert!((0.14..=0.16).contains(&sigma), "{sigma}");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_scene(&SceneSpec::new(SceneKind::CrossingPair, 5)).unwrap();
        let b = generate_scene(&SceneSpec::new(SceneKind::CrossingPair, 5)).unwrap();
        let c = generate_scene(&SceneSpec::new(SceneKind::CrossingPair, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.image, c.image);
    }

    #[test]
    fn ground_truth_is_darker_than_background() {
        let s = generate_scene(&SceneSpec::new(SceneKind::TortuousPair, 2)).unwrap();
        for st in &s.structures {
            assert!(st.mask.get(st.seeds.0) && st.mask.get(st.seeds.1));
            let visible: Vec<f64> = st
                .mask
                .pixels()
                .map(|p| s.clean.get(p.x as usize, p.y as usize))
                .filter(|&v| v < BACKGROUND)
                .collect();
            assert!(visible.len() * 10 > st.mask.count() * 8);
        }
    }

    #[test]
    fn off_canvas_is_an_error() {
        let mut spec = SceneSpec::new(SceneKind::Line, 1);
        spec.widths = vec![400.0];
        assert!(matches!(generate_scene(&spec), Err(Error::Generation(_))));
    }
}
