//! Mother wavelets on C x R, the transformed family, the spectrum and the
//! generalized admissibility integral.
//!
//! The spectrum convention is
//! `Phi(xi, q) = int dx'/sqrt(pi) int d^2w/(2 pi) psi(w, x') exp(w xi - w* xi* + i q x')`,
//! read at `xi = s* beta* - r* beta` and `q = a p`. With this convention the
//! transform of `exp(alpha* beta - alpha beta* - i p x)` is
//! `sqrt(s|a|) conj(Phi(xi, a p)) exp(kappa* beta - kappa beta* - i p b)`.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::model::{symplectic_from_hyperbolic, TransformPoint, C64};
use crate::quadrature::{gauss_legendre, pairwise_sum, Rule};

/// Analyzing function `psi(w, x')`.
pub trait MotherWavelet: Debug + Send + Sync {
    fn eval(&self, w: C64, xp: f64) -> C64;

    /// Closed-form spectrum, when one is known.
    fn spectrum_closed(&self, _xi: C64, _q: f64) -> Option<C64> {
        None
    }

    /// `|Phi(xi, q)|^2` split as `u(xi) v(q)`, for wavelets that are a
    /// product of a plane factor and a line factor.
    fn spectrum_power_factors(&self, _xi: C64, _q: f64) -> Option<(f64, f64)> {
        None
    }

    /// Radius beyond which `|psi| < 1e-12` in both arguments.
    fn decay_radius(&self) -> f64 {
        6.0
    }

    fn name(&self) -> String;
}

/// `psi(w, x') = w e^{-|w|^2/2} x' e^{-x'^2/2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DefaultWavelet;

impl MotherWavelet for DefaultWavelet {
    #[inline]
    fn eval(&self, w: C64, xp: f64) -> C64 {
        w * ((-0.5 * w.norm_sqr()).exp() * xp * (-0.5 * xp * xp).exp())
    }

    fn spectrum_closed(&self, xi: C64, q: f64) -> Option<C64> {
        let amp = -2.0 * std::f64::consts::SQRT_2 * q * (-2.0 * xi.norm_sqr() - 0.5 * q * q).exp();
        Some(C64::new(0.0, amp) * xi.conj())
    }

    fn spectrum_power_factors(&self, xi: C64, q: f64) -> Option<(f64, f64)> {
        let x2 = xi.norm_sqr();
        Some((8.0 * x2 * (-4.0 * x2).exp(), q * q * (-q * q).exp()))
    }

    fn name(&self) -> String {
        DEFAULT_WAVELET_NAME.to_string()
    }
}

pub const DEFAULT_WAVELET_NAME: &str = "gauss-hermite-default";

/// A wavelet multiplied by a real constant.
#[derive(Clone, Debug)]
pub struct Scaled {
    pub inner: Arc<dyn MotherWavelet>,
    pub scale: f64,
}

impl Scaled {
    pub fn new(inner: Arc<dyn MotherWavelet>, scale: f64) -> Self {
        Scaled { inner, scale }
    }
}

impl MotherWavelet for Scaled {
    #[inline]
    fn eval(&self, w: C64, xp: f64) -> C64 {
        self.inner.eval(w, xp) * self.scale
    }

    fn spectrum_closed(&self, xi: C64, q: f64) -> Option<C64> {
        self.inner.spectrum_closed(xi, q).map(|v| v * self.scale)
    }

    fn spectrum_power_factors(&self, xi: C64, q: f64) -> Option<(f64, f64)> {
        self.inner
            .spectrum_power_factors(xi, q)
            .map(|(u, v)| (u * self.scale * self.scale, v))
    }

    fn decay_radius(&self) -> f64 {
        self.inner.decay_radius()
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// Wavelet selection as it appears in run configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub wavelet: String,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for WaveletSpec {
    fn default() -> Self {
        WaveletSpec {
            wavelet: DEFAULT_WAVELET_NAME.to_string(),
            scale: 1.0,
        }
    }
}

impl WaveletSpec {
    pub fn build(&self) -> Result<Arc<dyn MotherWavelet>> {
        if !(self.scale.is_finite() && self.scale != 0.0) {
            return Err(SdwtError::Parse(format!("wavelet scale {}", self.scale)));
        }
        match self.wavelet.as_str() {
            DEFAULT_WAVELET_NAME => Ok(if self.scale == 1.0 {
                Arc::new(DefaultWavelet)
            } else {
                Arc::new(Scaled::new(Arc::new(DefaultWavelet), self.scale))
            }),
            other => Err(SdwtError::Parse(format!("unknown wavelet {other:?}"))),
        }
    }
}

/// Principal square root of `s*` times `1/sqrt|a|`: the family prefactor.
#[inline]
pub fn family_prefactor(tp: &TransformPoint) -> C64 {
    tp.sym.s().conj().sqrt() / tp.dil.a().abs().sqrt()
}

/// `sqrt(s*/|a|) psi(s(alpha - kappa) - r(alpha* - kappa*), (x - b)/a)`.
#[inline]
pub fn eval_family(w: &dyn MotherWavelet, tp: &TransformPoint, alpha: C64, x: f64) -> C64 {
    let z = tp.sym.apply(alpha - tp.tr.kappa);
    family_prefactor(tp) * w.eval(z, (x - tp.dil.b()) / tp.dil.a())
}

/// Tolerance on the doubling estimate of a quadrature spectrum.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// Spectrum `Phi(xi, q)`; closed form when available, quadrature otherwise.
pub fn spectrum(w: &dyn MotherWavelet, xi: C64, q: f64) -> Result<C64> {
    match w.spectrum_closed(xi, q) {
        Some(v) => Ok(v),
        None => spectrum_quadrature(w, xi, q, 48).map(|(v, _)| v),
    }
}

/// Spectrum at the transform point's `(xi, q)` for a Fourier point `(beta, p)`.
#[inline]
pub fn spectrum_at(w: &dyn MotherWavelet, tp: &TransformPoint, beta: C64, p: f64) -> Result<C64> {
    spectrum(w, tp.sym.spectral_arg(beta), tp.dil.a() * p)
}

/// Gauss–Legendre evaluation of the spectrum on the box of half-width
/// `decay_radius`, with `n` nodes per axis; the error estimate is the gap to
/// a `3n/2`-node evaluation.
pub fn spectrum_quadrature(w: &dyn MotherWavelet, xi: C64, q: f64, n: usize) -> Result<(C64, f64)> {
    let coarse = spectrum_rule(w, xi, q, n);
    let fine = spectrum_rule(w, xi, q, n + n / 2);
    let est = (fine - coarse).norm();
    if est > SPECTRUM_TOL {
        return Err(SdwtError::QuadratureDivergence {
            estimate: est,
            tolerance: SPECTRUM_TOL,
        });
    }
    Ok((fine, est))
}

fn spectrum_rule(w: &dyn MotherWavelet, xi: C64, q: f64, n: usize) -> C64 {
    let rad = w.decay_radius();
    let rule = gauss_legendre(n).mapped(-rad, rad);
    let mut terms = Vec::with_capacity(n * n * n);
    for (w1, c1) in rule.nodes.iter().zip(&rule.weights) {
        for (w2, c2) in rule.nodes.iter().zip(&rule.weights) {
            let wz = C64::new(*w1, *w2);
            // w xi - w* xi* = 2i Im(w xi)
            let phase_w = 2.0 * (wz * xi).im;
            for (x, c3) in rule.nodes.iter().zip(&rule.weights) {
                let ph = C64::from_polar(1.0, phase_w + q * x);
                terms.push(w.eval(wz, *x) * ph * (c1 * c2 * c3));
            }
        }
    }
    crate::quadrature::pairwise_sum_c(&terms) / (2.0 * PI * PI.sqrt())
}

/// Truncation of the admissibility integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityCutoffs {
    pub mu_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Gauss–Legendre nodes in mu and in ln|a|; uniform nodes in phi.
    pub n_mu: usize,
    pub n_phi: usize,
    pub n_a: usize,
}

impl Default for AdmissibilityCutoffs {
    fn default() -> Self {
        AdmissibilityCutoffs {
            mu_max: 1.5,
            a_min: 0.05,
            a_max: 16.0,
            n_mu: 32,
            n_phi: 64,
            n_a: 48,
        }
    }
}

impl AdmissibilityCutoffs {
    fn doubled(&self) -> Self {
        AdmissibilityCutoffs {
            n_mu: 2 * self.n_mu,
            n_phi: 2 * self.n_phi,
            n_a: 2 * self.n_a,
            ..*self
        }
    }
}

/// Limit on the a-boundary integrand relative to the accumulated value.
pub const CUTOFF_RATIO_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub value: f64,
    /// Gap to the evaluation with doubled node counts.
    pub error_estimate: f64,
    /// Integrand at `|a| = a_max` (per unit `ln|a|`) over the total.
    pub a_boundary_ratio: f64,
    /// Integrand at `mu = mu_max` (per unit mu) over the total. This does not
    /// decay for any wavelet, so it is reported rather than enforced.
    pub mu_boundary_ratio: f64,
}

/// `int da/|a| int sinh(mu) dmu dphi |Phi(s* beta* - r* beta, a p)|^2` over
/// `mu in [0, mu_max]`, `phi in [0, 2 pi)`, `a_min <= |a| <= a_max` (both
/// signs), with `r` carrying the fixed phase `theta`.
pub fn admissibility_integral(
    w: &dyn MotherWavelet,
    beta: C64,
    p: f64,
    theta: f64,
    cut: &AdmissibilityCutoffs,
) -> Result<Admissibility> {
    if !(cut.mu_max > 0.0 && cut.a_min > 0.0 && cut.a_max > cut.a_min) {
        return Err(SdwtError::InvalidGrid(format!("admissibility cutoffs {cut:?}")));
    }
    let (value, a_edge, mu_edge) = admissibility_sum(w, beta, p, theta, cut)?;
    let (fine, _, _) = admissibility_sum(w, beta, p, theta, &cut.doubled())?;
    let (a_ratio, mu_ratio) = if fine > 0.0 {
        (a_edge / fine, mu_edge / fine)
    } else {
        (0.0, 0.0)
    };
    if a_ratio > CUTOFF_RATIO_LIMIT {
        return Err(SdwtError::CutoffTooSmall {
            ratio: a_ratio,
            limit: CUTOFF_RATIO_LIMIT,
        });
    }
    Ok(Admissibility {
        value: fine,
        error_estimate: (fine - value).abs(),
        a_boundary_ratio: a_ratio,
        mu_boundary_ratio: mu_ratio,
    })
}

/// Returns (integral, a-boundary integrand, mu-boundary integrand).
fn admissibility_sum(
    w: &dyn MotherWavelet,
    beta: C64,
    p: f64,
    theta: f64,
    cut: &AdmissibilityCutoffs,
) -> Result<(f64, f64, f64)> {
    let mu_rule = gauss_legendre(cut.n_mu).mapped(0.0, cut.mu_max);
    let la_rule = gauss_legendre(cut.n_a).mapped(cut.a_min.ln(), cut.a_max.ln());
    let dphi = 2.0 * PI / cut.n_phi as f64;

    // Surface integral of |Phi|^2 at a fixed q, with weights sinh(mu) dmu dphi.
    let surface = |q: f64, mu_rule: &Rule| -> Result<f64> {
        let mut terms = Vec::with_capacity(mu_rule.len() * cut.n_phi);
        for (mu, wm) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
            for k in 0..cut.n_phi {
                let sym = symplectic_from_hyperbolic(*mu, k as f64 * dphi, theta)?;
                let phi = spectrum(w, sym.spectral_arg(beta), q)?;
                terms.push(phi.norm_sqr() * mu.sinh() * wm * dphi);
            }
        }
        Ok(pairwise_sum(&terms))
    };
    // Both signs of a contribute; q -> -q.
    let by_q = |q: f64, mu_rule: &Rule| -> Result<f64> { Ok(surface(q, mu_rule)? + surface(-q, mu_rule)?) };

    let mut terms = Vec::with_capacity(la_rule.len());
    for (la, wa) in la_rule.nodes.iter().zip(&la_rule.weights) {
        terms.push(by_q(la.exp() * p, &mu_rule)? * wa);
    }
    let total = pairwise_sum(&terms);
    let a_edge = by_q(cut.a_max * p, &mu_rule)?;

    // Integrand at mu = mu_max, integrated over phi and ln|a|.
    let edge_rule = Rule {
        nodes: vec![cut.mu_max],
        weights: vec![1.0],
    };
    let mut edge_terms = Vec::with_capacity(la_rule.len());
    for (la, wa) in la_rule.nodes.iter().zip(&la_rule.weights) {
        edge_terms.push(by_q(la.exp() * p, &edge_rule)? * wa);
    }
    Ok((total, a_edge, pairwise_sum(&edge_terms)))
}

/// Rescales `w` so its admissibility integral at `(beta, p)` is one.
pub fn normalize_admissible(
    w: Arc<dyn MotherWavelet>,
    beta: C64,
    p: f64,
    theta: f64,
    cut: &AdmissibilityCutoffs,
) -> Result<Scaled> {
    let c = admissibility_integral(w.as_ref(), beta, p, theta, cut)?.value;
    if !(c > 0.0 && c.is_finite()) {
        return Err(SdwtError::ZeroAdmissibility);
    }
    Ok(Scaled::new(w, 1.0 / c.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{symplectic_from_hyperbolic, validate_symplectic};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn mother_examples() {
        let w = DefaultWavelet;
        assert_eq!(w.eval(C64::new(0.0, 0.0), 3.7), C64::new(0.0, 0.0));
        assert_eq!(w.eval(C64::new(1.0, 0.0), 0.0), C64::new(0.0, 0.0));
        assert!(close(
            w.eval(C64::new(1.0, 0.0), 1.0),
            C64::new((-1f64).exp(), 0.0),
            1e-15
        ));
    }

    #[test]
    fn family_examples() {
        let w = DefaultWavelet;
        let id = TransformPoint::identity();
        let alpha = C64::new(0.3, -0.8);
        assert!(close(eval_family(&w, &id, alpha, 0.4), w.eval(alpha, 0.4), 1e-15));

        let dil = TransformPoint::new(
            validate_symplectic(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap(),
            2.0,
            0.0,
            C64::new(0.0, 0.0),
        )
        .unwrap();
        let got = eval_family(&w, &dil, C64::new(1.0, 0.0), 2.0);
        assert!(close(got, w.eval(C64::new(1.0, 0.0), 1.0) / 2f64.sqrt(), 1e-15));

        let sym = validate_symplectic(C64::new(1.25, 0.0), C64::new(0.75, 0.0)).unwrap();
        let tp = TransformPoint::new(sym, 1.0, 0.0, C64::new(0.0, 0.0)).unwrap();
        let got = eval_family(&w, &tp, C64::new(1.0, 0.0), 1.0);
        assert!(close(got, 1.25f64.sqrt() * w.eval(C64::new(0.5, 0.0), 1.0), 1e-15));
    }

    #[test]
    fn translation_covariance() {
        let w = DefaultWavelet;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mu = rng.random_range(0.0..1.5);
            let tp = TransformPoint::from_hyperbolic(
                mu,
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                rng.random_range(0.3..3.0),
                rng.random_range(-1.0..1.0),
            )
            .unwrap();
            let delta = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let shifted = TransformPoint::new(tp.sym, tp.dil.a(), tp.dil.b(), tp.tr.kappa + delta).unwrap();
            let alpha = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let x = rng.random_range(-2.0..2.0);
            assert!(close(
                eval_family(&w, &shifted, alpha + delta, x),
                eval_family(&w, &tp, alpha, x),
                1e-12
            ));
        }
    }

    #[test]
    fn family_norm_is_modulus_of_s_times_mother_norm() {
        // int |psi|^2 = (int |w|^2 e^{-|w|^2} d^2w)(int x^2 e^{-x^2} dx) = pi * sqrt(pi)/2
        let mother = PI * PI.sqrt() / 2.0;
        let w = DefaultWavelet;
        let tp = TransformPoint::from_hyperbolic(0.6, 0.4, -0.9, C64::new(0.2, -0.1), 1.7, 0.3).unwrap();
        let ra = gauss_legendre(96).mapped(-8.0, 8.0);
        let rx = gauss_legendre(96).mapped(-14.0, 14.0);
        let mut sum = 0.0;
        for (a1, w1) in ra.nodes.iter().zip(&ra.weights) {
            for (a2, w2) in ra.nodes.iter().zip(&ra.weights) {
                for (x, w3) in rx.nodes.iter().zip(&rx.weights) {
                    sum += eval_family(&w, &tp, C64::new(*a1, *a2), *x).norm_sqr() * w1 * w2 * w3;
                }
            }
        }
        let want = tp.sym.s().norm() * mother;
        assert!((sum - want).abs() / want < 1e-4, "{sum} vs {want}");
    }

    #[test]
    fn spectrum_zero_slices() {
        let w = DefaultWavelet;
        assert_eq!(spectrum(&w, C64::new(0.0, 0.0), 1.0).unwrap().norm(), 0.0);
        assert_eq!(spectrum(&w, C64::new(1.0, 0.0), 0.0).unwrap().norm(), 0.0);
    }

    /// Plain Riemann sum over a fine uniform grid; independent of the
    /// Gauss–Legendre path.
    fn spectrum_riemann(xi: C64, q: f64, n: usize) -> C64 {
        let w = DefaultWavelet;
        let r = 7.0;
        let h = 2.0 * r / n as f64;
        let mut sum = C64::new(0.0, 0.0);
        for i in 0..n {
            let w1 = -r + (i as f64 + 0.5) * h;
            for j in 0..n {
                let w2 = -r + (j as f64 + 0.5) * h;
                let wz = C64::new(w1, w2);
                let e = wz * xi - wz.conj() * xi.conj();
                for k in 0..n {
                    let x = -r + (k as f64 + 0.5) * h;
                    sum += w.eval(wz, x) * (e + C64::new(0.0, q * x)).exp();
                }
            }
        }
        sum * h * h * h / (2.0 * PI * PI.sqrt())
    }

    #[test]
    fn spectrum_matches_riemann_oracle() {
        let w = DefaultWavelet;
        let want = spectrum(&w, C64::new(1.0, 0.0), 1.0).unwrap();
        let got = spectrum_riemann(C64::new(1.0, 0.0), 1.0, 140);
        assert!(close(got, want, 1e-6), "{got} vs {want}");
        let xi = C64::new(0.3, -0.4);
        assert!(close(
            spectrum_riemann(xi, -0.7, 140),
            spectrum(&w, xi, -0.7).unwrap(),
            1e-6
        ));
    }

    #[test]
    fn closed_form_matches_quadrature_on_random_points() {
        // Hide the closed form to force the quadrature path.
        #[derive(Debug)]
        struct Opaque;
        impl MotherWavelet for Opaque {
            fn eval(&self, w: C64, xp: f64) -> C64 {
                DefaultWavelet.eval(w, xp)
            }
            fn name(&self) -> String {
                "opaque".into()
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let xi = C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let q = rng.random_range(-3.0..3.0);
            let (v, est) = spectrum_quadrature(&Opaque, xi, q, 40).unwrap();
            let c = DefaultWavelet.spectrum_closed(xi, q).unwrap();
            assert!(close(v, c, 1e-6), "xi={xi} q={q}: {v} vs {c}, est {est}");
        }
    }

    /// Closed form of the admissibility integral of the default wavelet with
    /// the phi-integral done by brute force.
    fn admissibility_reference(beta: C64, p: f64, theta: f64, cut: &AdmissibilityCutoffs) -> f64 {
        // int_{a_min}^{a_max} da/a (ap)^2 e^{-(ap)^2} = (e^{-a_min^2 p^2} - e^{-a_max^2 p^2}) / 2, doubled for both signs.
        let a_part = (-(cut.a_min * p).powi(2)).exp() - (-(cut.a_max * p).powi(2)).exp();
        let n = 4000;
        let h_mu = cut.mu_max / n as f64;
        let n_phi = 256;
        let mut s = 0.0;
        for i in 0..n {
            let mu = (i as f64 + 0.5) * h_mu;
            for k in 0..n_phi {
                let phi = 2.0 * PI * k as f64 / n_phi as f64;
                let sym = symplectic_from_hyperbolic(mu, phi, theta).unwrap();
                let xi = sym.spectral_arg(beta);
                s += 8.0 * xi.norm_sqr() * (-4.0 * xi.norm_sqr()).exp() * mu.sinh();
            }
        }
        s * h_mu * (2.0 * PI / n_phi as f64) * a_part
    }

    #[test]
    fn admissibility_examples() {
        let w = DefaultWavelet;
        let cut = AdmissibilityCutoffs::default();
        let zero = admissibility_integral(&w, C64::new(0.0, 0.0), 0.0, 0.0, &cut).unwrap();
        assert_eq!(zero.value, 0.0);

        let c = admissibility_integral(&w, C64::new(1.0, 0.0), 1.0, 0.0, &cut).unwrap();
        assert!(c.value > 0.0 && c.value.is_finite());
        let reference = admissibility_reference(C64::new(1.0, 0.0), 1.0, 0.0, &cut);
        assert!(
            (c.value - reference).abs() / reference < 1e-5,
            "{} vs {reference}",
            c.value
        );
        assert!(c.error_estimate < 1e-6 * c.value);
    }

    #[test]
    fn admissibility_rejects_short_a_range() {
        let w = DefaultWavelet;
        let cut = AdmissibilityCutoffs {
            a_max: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            admissibility_integral(&w, C64::new(1.0, 0.0), 1.0, 0.0, &cut),
            Err(SdwtError::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn normalization_examples() {
        let cut = AdmissibilityCutoffs::default();
        let beta = C64::new(1.0, 0.0);
        let base: Arc<dyn MotherWavelet> = Arc::new(DefaultWavelet);
        let c0 = admissibility_integral(base.as_ref(), beta, 1.0, 0.0, &cut)
            .unwrap()
            .value;

        // A wavelet whose integral is 4 is scaled by 1/2.
        let four: Arc<dyn MotherWavelet> = Arc::new(Scaled::new(base.clone(), 2.0 / c0.sqrt()));
        let c4 = admissibility_integral(four.as_ref(), beta, 1.0, 0.0, &cut)
            .unwrap()
            .value;
        assert!((c4 - 4.0).abs() < 1e-12);
        let n4 = normalize_admissible(four, beta, 1.0, 0.0, &cut).unwrap();
        assert!((n4.scale - 0.5).abs() < 1e-12);

        let normed: Arc<dyn MotherWavelet> = Arc::new(normalize_admissible(base, beta, 1.0, 0.0, &cut).unwrap());
        let c1 = admissibility_integral(normed.as_ref(), beta, 1.0, 0.0, &cut)
            .unwrap()
            .value;
        assert!((c1 - 1.0).abs() < 1e-3);
        let again = normalize_admissible(normed, beta, 1.0, 0.0, &cut).unwrap();
        assert!((again.scale - 1.0).abs() < 1e-12);

        assert!(matches!(
            normalize_admissible(Arc::new(DefaultWavelet), C64::new(0.0, 0.0), 0.0, 0.0, &cut),
            Err(SdwtError::ZeroAdmissibility)
        ));
    }

    proptest! {
        #[test]
        fn power_factors_match_spectrum(re in -2.0f64..2.0, im in -2.0f64..2.0, q in -3.0f64..3.0) {
            let w = Scaled::new(Arc::new(DefaultWavelet), 0.7);
            let xi = C64::new(re, im);
            let (u, v) = w.spectrum_power_factors(xi, q).unwrap();
            let p = spectrum(&w, xi, q).unwrap().norm_sqr();
            prop_assert!((u * v - p).abs() <= 1e-14 * (1.0 + p));
        }

        #[test]
        fn spectrum_is_odd_in_each_argument(re in -2.0f64..2.0, im in -2.0f64..2.0, q in -3.0f64..3.0) {
            let w = DefaultWavelet;
            let xi = C64::new(re, im);
            let v = spectrum(&w, xi, q).unwrap();
            prop_assert!(close(spectrum(&w, -xi, q).unwrap(), -v, 1e-15));
            prop_assert!(close(spectrum(&w, xi, -q).unwrap(), -v, 1e-15));
        }
    }
}
