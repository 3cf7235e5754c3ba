//! Test signals used by the verification suites and the CLI.

use serde::{Deserialize, Serialize};

use crate::model::{Grid3D, SampledField, C64};

/// Gaussian wave packet
/// `exp(-|alpha - alpha0|^2 / (2 sa^2) - (x - x0)^2 / (2 sx^2)) exp(alpha* beta0 - alpha beta0* - i p0 x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub alpha0: C64,
    pub x0: f64,
    pub beta0: C64,
    pub p0: f64,
    pub sigma_alpha: f64,
    pub sigma_x: f64,
}

impl Default for GaussianPacket {
    fn default() -> Self {
        GaussianPacket {
            alpha0: C64::new(0.0, 0.0),
            x0: 0.0,
            beta0: C64::new(1.0, 0.0),
            p0: 1.0,
            sigma_alpha: 1.5,
            sigma_x: 1.5,
        }
    }
}

impl GaussianPacket {
    pub fn eval(&self, alpha: C64, x: f64) -> C64 {
        let d = alpha - self.alpha0;
        let env =
            -d.norm_sqr() / (2.0 * self.sigma_alpha.powi(2)) - (x - self.x0).powi(2) / (2.0 * self.sigma_x.powi(2));
        plane_wave(alpha, x, self.beta0, self.p0) * env.exp()
    }

    pub fn sample(&self, grid: Grid3D) -> SampledField {
        SampledField::from_fn(grid, |a, x| self.eval(a, x))
    }
}

/// `exp(alpha* beta - alpha beta* - i p x)`.
#[inline]
pub fn plane_wave(alpha: C64, x: f64, beta: C64, p: f64) -> C64 {
    (alpha.conj() * beta - alpha * beta.conj() - C64::new(0.0, p * x)).exp()
}

/// Plane wave sampled on `grid` (the grid itself is the window).
pub fn windowed_plane_wave(grid: Grid3D, beta: C64, p: f64) -> SampledField {
    SampledField::from_fn(grid, |a, x| plane_wave(a, x, beta, p))
}

/// Low-order polynomial in `(alpha, alpha*, x)` times a Gaussian envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolynomial {
    pub center: C64,
    pub x0: f64,
    pub width_alpha: f64,
    pub width_x: f64,
    /// Coefficients of `1, alpha, alpha*, x, alpha x`.
    pub coeffs: [C64; 5],
}

impl GaussianPolynomial {
    pub fn random(rng: &mut impl rand::Rng) -> Self {
        let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let coeffs = [c(), c(), c(), c(), c()];
        GaussianPolynomial {
            center: C64::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)),
            x0: rng.random_range(-0.8..0.8),
            width_alpha: rng.random_range(0.8..1.3),
            width_x: rng.random_range(0.8..1.3),
            coeffs,
        }
    }

    pub fn eval(&self, alpha: C64, x: f64) -> C64 {
        let d = alpha - self.center;
        let t = x - self.x0;
        let c = &self.coeffs;
        let poly = c[0] + c[1] * d + c[2] * d.conj() + c[3] * t + c[4] * d * t;
        poly * (-d.norm_sqr() / (2.0 * self.width_alpha.powi(2)) - t * t / (2.0 * self.width_x.powi(2))).exp()
    }

    pub fn sample(&self, grid: Grid3D) -> SampledField {
        SampledField::from_fn(grid, |a, x| self.eval(a, x))
    }
}
