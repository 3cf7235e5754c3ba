//! Adjoint, reproducing process, Parseval identity and inversion.
//!
//! Measures: `d^2s/|s|^2` is realised as `tanh(mu) dmu dphi` on the
//! hyperbolic parametrisation, and `da/a^2` on the sampled dilations.
//! For a fixed `(s, r, a)` slab the `(kappa, b)` integrals of products of
//! coefficients reduce, by Plancherel, to `|s||a| |Phi|^2` weights on the
//! Fourier image of the signal. The spectral routines use that to integrate
//! over translations exactly; the coefficient routines sum over a sampled
//! translation lattice.

use std::f64::consts::PI;

use ndarray::Array3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{forward::signal_spectrum, ParameterSampling, QuadratureSpec, Slab};
use crate::error::{Result, SdwtError};
use crate::fourier::{crop, inverse_ft, FourierField};
use crate::model::{CoefficientField, Grid3D, SampledField, TransformPoint, C64};
use crate::quadrature::{pairwise_sum, pairwise_sum_c};
use crate::wavelet::{eval_family, spectrum, MotherWavelet};

/// `dmu dphi da * tanh(mu) / a^2`.
#[inline]
pub fn slab_measure(slab: &Slab) -> f64 {
    slab.weight * slab.mu.tanh() / (slab.a * slab.a)
}

/// Lattice spacing may not exceed this multiple of the narrowest wavelet width.
const DENSITY_FACTOR: f64 = 1.5;

fn max_gap(nodes: &[f64]) -> Option<f64> {
    if nodes.len() < 2 {
        return None;
    }
    let mut v = nodes.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).reduce(f64::max)
}

/// `SamplingTooSparse` when the translation lattice cannot resolve the
/// narrowest family member: width `e^{-mu}` across the plane and `|a|` along x.
pub fn check_lattice_density(s: &ParameterSampling) -> Result<()> {
    let mu_max = s.mu.nodes.iter().cloned().fold(0.0, f64::max);
    let a_min = s.a.nodes.iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
    let width_alpha = (-mu_max).exp();
    for (name, nodes, width) in [
        ("kappa1", &s.kappa1.nodes, width_alpha),
        ("kappa2", &s.kappa2.nodes, width_alpha),
        ("b", &s.b.nodes, a_min),
    ] {
        if let Some(gap) = max_gap(nodes) {
            if gap > DENSITY_FACTOR * width {
                return Err(SdwtError::SamplingTooSparse(format!(
                    "{name} spacing {gap:.4} exceeds {DENSITY_FACTOR} x wavelet width {width:.4}"
                )));
            }
        }
    }
    Ok(())
}

fn sampling_of(w: &CoefficientField) -> Result<&ParameterSampling> {
    let s = w
        .meta
        .sampling
        .as_ref()
        .ok_or_else(|| SdwtError::SamplingTooSparse("coefficient field carries no sampling layout".into()))?;
    if s.len() != w.len() {
        return Err(SdwtError::ShapeMismatch {
            expected: s.len(),
            found: w.len(),
        });
    }
    Ok(s)
}

/// `int db/sqrt(pi) int d^2kappa/(2 pi) W psi_family(alpha, x)` summed over
/// the translation lattice. For a field over one `(s, r, a)` slab this is the
/// adjoint transform; over several slabs it is the sum of their adjoints.
pub fn adjoint_transform(w_field: &CoefficientField, w: &dyn MotherWavelet, alpha: C64, x: f64) -> Result<C64> {
    let s = sampling_of(w_field)?;
    check_lattice_density(s)?;
    let per = s.lattice_count();
    let points = w_field.points()?;
    let terms: Vec<C64> = points
        .iter()
        .enumerate()
        .map(|(i, tp)| w_field.values[i] * eval_family(w, tp, alpha, x) * s.lattice_weight(i % per))
        .collect();
    Ok(pairwise_sum_c(&terms) / (PI.sqrt() * 2.0 * PI))
}

/// `C(beta, p) = sum over slabs of measure * |s||a| |Phi(s* beta* - r* beta, a p)|^2`
/// on the grid of `f`: the discrete admissibility integral at every Fourier point.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMultiplier {
    pub values: Array3<f64>,
}

pub fn frame_multiplier(w: &dyn MotherWavelet, s: &ParameterSampling, f: &FourierField) -> Result<FrameMultiplier> {
    s.validate()?;
    let (n1, n2, np) = f.values.dim();
    let zero = C64::new(0.0, 0.0);
    if w.spectrum_power_factors(zero, 0.0).is_some() {
        // Product wavelet: the sum over (mu, phi) and the sum over a separate.
        let mut sym_terms = Vec::with_capacity(s.mu.len() * s.phi.len());
        for (mu, wm) in s.mu.nodes.iter().zip(&s.mu.weights) {
            for (phi, wp) in s.phi.nodes.iter().zip(&s.phi.weights) {
                let sym = crate::model::symplectic_from_hyperbolic(*mu, *phi, s.theta)?;
                sym_terms.push((sym, wm * wp * mu.tanh() * sym.s().norm()));
            }
        }
        let plane: Vec<f64> = (0..n1 * n2)
            .into_par_iter()
            .map(|idx| {
                let beta = f.beta(idx / n2, idx % n2);
                let terms: Vec<f64> = sym_terms
                    .iter()
                    .map(|(sym, m)| {
                        m * w
                            .spectrum_power_factors(sym.spectral_arg(beta), 0.0)
                            .map_or(0.0, |t| t.0)
                    })
                    .collect();
                pairwise_sum(&terms)
            })
            .collect();
        let line: Vec<f64> = (0..np)
            .map(|k| {
                let p = f.p.node(k);
                let terms: Vec<f64> =
                    s.a.nodes
                        .iter()
                        .zip(&s.a.weights)
                        .map(|(a, wa)| wa / a.abs() * w.spectrum_power_factors(zero, a * p).map_or(0.0, |t| t.1))
                        .collect();
                pairwise_sum(&terms)
            })
            .collect();
        let values = Array3::from_shape_fn((n1, n2, np), |(i, j, k)| plane[i * n2 + j] * line[k]);
        return Ok(FrameMultiplier { values });
    }
    let slabs = s.slabs()?;
    let flat: Vec<Result<f64>> = (0..n1 * n2 * np)
        .into_par_iter()
        .map(|idx| {
            let k = idx % np;
            let j = (idx / np) % n2;
            let i = idx / (n2 * np);
            let beta = f.beta(i, j);
            let p = f.p.node(k);
            let mut terms = Vec::with_capacity(slabs.len());
            for sl in &slabs {
                let phi = spectrum(w, sl.sym.spectral_arg(beta), sl.a * p)?;
                terms.push(slab_measure(sl) * sl.sym.s().norm() * sl.a.abs() * phi.norm_sqr());
            }
            Ok(pairwise_sum(&terms))
        })
        .collect();
    let mut values = Vec::with_capacity(flat.len());
    for v in flat {
        values.push(v?);
    }
    Ok(FrameMultiplier {
        values: Array3::from_shape_vec((n1, n2, np), values).expect("shape"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub lhs: C64,
    pub rhs: C64,
    /// `|lhs - rhs| / (||g|| ||g'||)`; zero when either signal vanishes.
    pub rel_gap: f64,
}

fn report(lhs: C64, rhs: C64, n1: f64, n2: f64) -> ParsevalReport {
    let scale = (n1 * n2).sqrt();
    ParsevalReport {
        lhs,
        rhs,
        rel_gap: if scale > 0.0 { (lhs - rhs).norm() / scale } else { 0.0 },
    }
}

/// Both sides of the Parseval identity. The left side integrates over
/// translations exactly (Plancherel) and over `(s, a)` with the sampling.
pub fn parseval_check(
    g: &SampledField,
    g2: &SampledField,
    w: &dyn MotherWavelet,
    s: &ParameterSampling,
    q: &QuadratureSpec,
) -> Result<ParsevalReport> {
    if g.grid != g2.grid {
        return Err(SdwtError::ShapeMismatch {
            expected: g.grid.len(),
            found: g2.grid.len(),
        });
    }
    q.validate(&g.grid)?;
    let f1 = signal_spectrum(g, q);
    let f2 = signal_spectrum(g2, q);
    let c = frame_multiplier(w, s, &f1)?;
    let terms: Vec<C64> = c
        .values
        .iter()
        .zip(f1.values.iter().zip(f2.values.iter()))
        .map(|(m, (a, b))| a * b.conj() * *m)
        .collect();
    let lhs = pairwise_sum_c(&terms) * f1.cell_volume();
    let rhs = g.inner(g2);
    Ok(report(lhs, rhs, g.norm_sqr(), g2.norm_sqr()))
}

/// Left side of the Parseval identity summed over two materialised
/// coefficient fields on the same sampling.
pub fn parseval_from_coefficients(w1: &CoefficientField, w2: &CoefficientField) -> Result<C64> {
    let s = sampling_of(w1)?;
    if w1.coords != w2.coords {
        return Err(SdwtError::ShapeMismatch {
            expected: w1.len(),
            found: w2.len(),
        });
    }
    let per = s.lattice_count();
    let slabs = s.slabs()?;
    let terms: Vec<C64> = (0..w1.len())
        .map(|i| w1.values[i] * w2.values[i].conj() * slab_measure(&slabs[i / per]) * s.lattice_weight(i % per))
        .collect();
    Ok(pairwise_sum_c(&terms))
}

/// `int da/a^2 int d^2s/|s|^2` of the adjoint of the transform of `g`,
/// with translations integrated exactly.
pub fn reproduce(
    g: &SampledField,
    w: &dyn MotherWavelet,
    s: &ParameterSampling,
    q: &QuadratureSpec,
) -> Result<SampledField> {
    q.validate(&g.grid)?;
    let f = signal_spectrum(g, q);
    let c = frame_multiplier(w, s, &f)?;
    let weighted = FourierField {
        values: &f.values * &c.values.mapv(|v| C64::new(v, 0.0)),
        ..f
    };
    crop(&inverse_ft(&weighted), g.grid)
}

/// Inversion from a materialised coefficient field:
/// `g = int da db/(sqrt(pi) a^2) int d^2kappa d^2s/(2 pi |s|^2) W psi_family`.
pub fn invert(w_field: &CoefficientField, w: &dyn MotherWavelet, target: Grid3D) -> Result<SampledField> {
    let s = sampling_of(w_field)?;
    check_lattice_density(s)?;
    let per = s.lattice_count();
    let slabs = s.slabs()?;
    let points: Vec<TransformPoint> = w_field.points()?;
    let weights: Vec<C64> = (0..w_field.len())
        .map(|i| w_field.values[i] * (slab_measure(&slabs[i / per]) * s.lattice_weight(i % per)))
        .collect();
    let norm = 1.0 / (PI.sqrt() * 2.0 * PI);
    let (n1, n2, n3) = target.shape();
    let flat: Vec<C64> = (0..n1 * n2 * n3)
        .into_par_iter()
        .map(|idx| {
            let k = idx % n3;
            let j = (idx / n3) % n2;
            let i = idx / (n2 * n3);
            let alpha = target.alpha(i, j);
            let x = target.x.node(k);
            let terms: Vec<C64> = points
                .iter()
                .zip(&weights)
                .map(|(tp, wt)| wt * eval_family(w, tp, alpha, x))
                .collect();
            pairwise_sum_c(&terms) * norm
        })
        .collect();
    SampledField::new(target, Array3::from_shape_vec((n1, n2, n3), flat).expect("shape"))
}
