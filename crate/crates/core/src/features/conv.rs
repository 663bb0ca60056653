use alloc::vec;
use alloc::vec::Vec;

/// Maps a possibly out-of-range index into `0..n` by symmetric reflection
/// (`... c b a | a b c ... x y z | z y x ...`).
pub fn reflect_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

/// Sampled 1D Gaussian and its first two derivatives, all of radius
/// `ceil(4 sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeKernels {
    pub radius: usize,
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

/// The kernels are moment-corrected so that on polynomial data of degree
/// two they are exact: `g0` sums to one, `g1` reproduces the slope of a
/// linear ramp, `g2` has zero sum and reproduces the curvature of a parabola.
pub fn gaussian_derivative_kernels(sigma: f64) -> DerivativeKernels {
    let radius = libm::ceil(4.0 * sigma) as usize;
    let s2 = sigma * sigma;
    let taps: Vec<f64> = (0..=2 * radius).map(|i| i as f64 - radius as f64).collect();
    let mut g0: Vec<f64> = taps.iter().map(|t| libm::exp(-t * t / (2.0 * s2))).collect();
    let total: f64 = g0.iter().sum();
    g0.iter_mut().for_each(|v| *v /= total);

    let mut g1: Vec<f64> = taps.iter().zip(&g0).map(|(t, g)| -t / s2 * g).collect();
    // (f * g1)(x) = sum_t f(x - t) g1(t); for f(x) = x this is -sum t g1(t).
    let m1: f64 = taps.iter().zip(&g1).map(|(t, g)| t * g).sum();
    g1.iter_mut().for_each(|v| *v /= -m1);

    let mut g2: Vec<f64> = taps
        .iter()
        .zip(&g0)
        .map(|(t, g)| (t * t / (s2 * s2) - 1.0 / s2) * g)
        .collect();
    let mean = g2.iter().sum::<f64>() / g2.len() as f64;
    g2.iter_mut().for_each(|v| *v -= mean);
    let m2: f64 = taps.iter().zip(&g2).map(|(t, g)| t * t * g).sum();
    g2.iter_mut().for_each(|v| *v *= 2.0 / m2);

    DerivativeKernels { radius, g0, g1, g2 }
}

/// Row-major plane.
#[derive(Debug, Clone)]
pub(crate) struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Pads `src` by `pad` on every side with symmetric reflection.
pub(crate) fn pad_reflect(src: &[f64], width: usize, height: usize, pad: usize) -> Plane {
    let pw = width + 2 * pad;
    let ph = height + 2 * pad;
    let mut data = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        let sy = reflect_index(y as isize - pad as isize, height);
        for x in 0..pw {
            let sx = reflect_index(x as isize - pad as isize, width);
            data.push(src[sy * width + sx]);
        }
    }
    Plane {
        width: pw,
        height: ph,
        data,
    }
}

/// Valid-mode separable convolution: the output shrinks by the kernel radius
/// on every side. Both kernels share the same (odd) length.
pub(crate) fn convolve_separable_valid(src: &Plane, kx: &[f64], ky: &[f64]) -> Plane {
    debug_assert_eq!(kx.len(), ky.len());
    let r = kx.len() / 2;
    let ow = src.width - 2 * r;
    let oh = src.height - 2 * r;
    // Horizontal pass keeps full height.
    let mut tmp = vec![0.0; ow * src.height];
    for y in 0..src.height {
        let row = &src.data[y * src.width..(y + 1) * src.width];
        for x in 0..ow {
            // Output at padded column x + r; sum_t f(c - t) k(t), t = i - r.
            let c = x + r;
            let mut acc = 0.0;
            for (i, k) in kx.iter().enumerate() {
                acc += row[c + r - i] * k;
            }
            tmp[y * ow + x] = acc;
        }
    }
    let mut data = vec![0.0; ow * oh];
    for y in 0..oh {
        let c = y + r;
        for (i, k) in ky.iter().enumerate() {
            let sy = c + r - i;
            let src_row = &tmp[sy * ow..(sy + 1) * ow];
            let dst = &mut data[y * ow..(y + 1) * ow];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += s * k;
            }
        }
    }
    Plane {
        width: ow,
        height: oh,
        data,
    }
}
