use core::f64::consts::PI;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut w = libm::fmod(a, 2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Wraps an angle into `[0, 2pi)`.
pub(crate) fn wrap_turn(a: f64) -> f64 {
    let w = libm::fmod(a, 2.0 * PI);
    if w < 0.0 {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

/// Eigen-decomposition with `values.0 <= values.1`; `vectors.k` is the unit
/// eigenvector of `values.k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: (f64, f64),
    pub vectors: ((f64, f64), (f64, f64)),
}

const OFF_DIAGONAL_TOL: f64 = 1e-12;

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    /// `<v, M v>`.
    #[inline]
    pub fn quadratic(&self, v: (f64, f64)) -> f64 {
        self.xx * v.0 * v.0 + 2.0 * self.xy * v.0 * v.1 + self.yy * v.1 * v.1
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymMat2::new(self.xx * s, self.xy * s, self.yy * s)
    }

    pub fn eigen(&self) -> Eigen2 {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let radius = hypot(half_diff, self.xy);
        let (lo, hi) = (mean - radius, mean + radius);
        let v_hi = if self.xy.abs() > OFF_DIAGONAL_TOL {
            // Either row of (M - hi I) gives the eigenvector; use the better
            // conditioned one.
            let a = (self.xy, hi - self.xx);
            let b = (hi - self.yy, self.xy);
            let pick = if a.0 * a.0 + a.1 * a.1 >= b.0 * b.0 + b.1 * b.1 {
                a
            } else {
                b
            };
            let n = hypot(pick.0, pick.1);
            (pick.0 / n, pick.1 / n)
        } else if self.xx >= self.yy {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let v_lo = (-v_hi.1, v_hi.0);
        Eigen2 {
            values: (lo, hi),
            vectors: (v_lo, v_hi),
        }
    }
}
