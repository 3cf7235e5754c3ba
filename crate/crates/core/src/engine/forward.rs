use std::f64::consts::PI;

use ndarray::Array3;
use rayon::prelude::*;

use super::{ErrorMode, Estimate, Method, ParameterSampling, QuadratureSpec};
use crate::error::{Result, SdwtError};
use crate::fourier::{forward_ft, zero_pad, FourierField};
use crate::model::{
    Axis, CoefficientField, QuadratureMeta, SampledField, SymplecticParams, TransformPoint, C64, PRINCIPAL_BRANCH,
};
use crate::quadrature::par_sum_c;
use crate::wavelet::{eval_family, family_prefactor, spectrum, MotherWavelet};

/// `int dx/sqrt(pi) int d^2alpha/(2 pi) g conj(psi_family)` by the rectangle
/// rule on the signal grid. In doubling mode the estimate is the gap to the
/// same rule on every other node.
pub fn sdwt_forward(
    g: &SampledField,
    w: &dyn MotherWavelet,
    tp: &TransformPoint,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let grid = g.grid;
    let (n1, n2, n3) = grid.shape();
    let norm = 1.0 / (2.0 * PI * PI.sqrt());
    let term = |i: usize, j: usize, k: usize| {
        let v = g.values[[i, j, k]];
        if v == C64::new(0.0, 0.0) {
            v
        } else {
            v * eval_family(w, tp, grid.alpha(i, j), grid.x.node(k)).conj()
        }
    };
    let fine = par_sum_c(n1 * n2 * n3, |idx| {
        let k = idx % n3;
        let j = (idx / n3) % n2;
        let i = idx / (n2 * n3);
        term(i, j, k)
    }) * (grid.cell_volume() * norm);
    if q.error_mode == ErrorMode::None {
        return Ok(Estimate { value: fine, err: 0.0 });
    }
    let (m1, m2, m3) = (n1.div_ceil(2), n2.div_ceil(2), n3.div_ceil(2));
    let coarse = par_sum_c(m1 * m2 * m3, |idx| {
        let k = idx % m3;
        let j = (idx / m3) % m2;
        let i = idx / (m2 * m3);
        term(2 * i, 2 * j, 2 * k)
    }) * (8.0 * grid.cell_volume() * norm);
    let err = (fine - coarse).norm();
    q.check(fine, err)?;
    Ok(Estimate { value: fine, err })
}

/// Fourier image of the signal after the padding requested by `q`.
pub fn signal_spectrum(g: &SampledField, q: &QuadratureSpec) -> FourierField {
    forward_ft(&zero_pad(g, q.pad))
}

/// `conj(sqrt(s*)) sqrt|a|`; equals `sqrt(s |a|)` off the branch cut.
#[inline]
pub(crate) fn forward_prefactor(sym: &SymplecticParams, a: f64) -> C64 {
    let tp = TransformPoint {
        sym: *sym,
        dil: crate::model::DilationParams::new(a, 0.0).expect("non-zero dilation"),
        tr: crate::model::TranslationParams {
            kappa: C64::new(0.0, 0.0),
        },
    };
    family_prefactor(&tp).conj() * a.abs()
}

/// `sqrt(s|a|) int dp/sqrt(2 pi) int d^2beta/pi F conj(Phi(s* beta* - r* beta, a p)) exp(kappa* beta - kappa beta* - i p b)`
/// at a single point.
pub fn sdwt_forward_fourier(f: &FourierField, w: &dyn MotherWavelet, tp: &TransformPoint) -> Result<C64> {
    let out = fourier_slab(
        f,
        w,
        &tp.sym,
        tp.dil.a(),
        &[tp.tr.kappa.re],
        &[tp.tr.kappa.im],
        &[tp.dil.b()],
    )?;
    Ok(out[[0, 0, 0]])
}

/// Fourier-path coefficients of one `(s, r, a)` slab on the lattice
/// `kappa1 x kappa2 x b`, as an array indexed `[kappa1, kappa2, b]`.
pub fn fourier_slab(
    f: &FourierField,
    w: &dyn MotherWavelet,
    sym: &SymplecticParams,
    a: f64,
    kappa1: &[f64],
    kappa2: &[f64],
    b: &[f64],
) -> Result<Array3<C64>> {
    if a == 0.0 {
        return Err(SdwtError::ZeroDilation);
    }
    let (n1, n2, np) = f.values.dim();
    let nb = b.len();
    let ps: Vec<f64> = (0..np).map(|k| f.p.node(k)).collect();
    let pb: Vec<C64> = ps
        .iter()
        .flat_map(|p| b.iter().map(move |bb| C64::from_polar(1.0, -p * bb)))
        .collect();

    // p -> b, row by row in beta1.
    let rows: Vec<Result<Vec<C64>>> = (0..n1)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![C64::new(0.0, 0.0); n2 * nb];
            let mut gk = vec![C64::new(0.0, 0.0); np];
            for j in 0..n2 {
                let xi = sym.spectral_arg(f.beta(i, j));
                for (k, slot) in gk.iter_mut().enumerate() {
                    let fv = f.values[[i, j, k]];
                    *slot = if fv == C64::new(0.0, 0.0) {
                        fv
                    } else {
                        fv * spectrum(w, xi, a * ps[k])?.conj()
                    };
                }
                for m in 0..nb {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..np {
                        acc += gk[k] * pb[k * nb + m];
                    }
                    out[j * nb + m] = acc;
                }
            }
            Ok(out)
        })
        .collect();
    let mut h1 = Vec::with_capacity(n1);
    for r in rows {
        h1.push(r?);
    }

    // beta1 -> kappa2 with exp(-2i kappa2 beta1).
    let n_k2 = kappa2.len();
    let n_k1 = kappa1.len();
    let mut h2 = vec![C64::new(0.0, 0.0); n_k2 * n2 * nb];
    for (l, k2) in kappa2.iter().enumerate() {
        for (i, row) in h1.iter().enumerate() {
            let ph = C64::from_polar(1.0, -2.0 * k2 * f.beta1.node(i));
            let dst = &mut h2[l * n2 * nb..(l + 1) * n2 * nb];
            for (d, v) in dst.iter_mut().zip(row) {
                *d += v * ph;
            }
        }
    }

    // beta2 -> kappa1 with exp(2i kappa1 beta2).
    let scale = forward_prefactor(sym, a) * (f.cell_volume() / (PI * (2.0 * PI).sqrt()));
    let mut out = Array3::zeros((n_k1, n_k2, nb));
    for (q1, k1) in kappa1.iter().enumerate() {
        for j in 0..n2 {
            let ph = C64::from_polar(1.0, 2.0 * k1 * f.beta2.node(j));
            for l in 0..n_k2 {
                for m in 0..nb {
                    out[[q1, l, m]] += h2[(l * n2 + j) * nb + m] * ph;
                }
            }
        }
    }
    out.mapv_inplace(|v| v * scale);
    Ok(out)
}

/// Every other node of an axis, as an axis with twice the step.
fn subsample(axis: &Axis) -> Axis {
    let count = axis.count.div_ceil(2);
    let first = axis.node(0);
    Axis {
        center: first + (count as f64 - 1.0) * axis.step,
        step: 2.0 * axis.step,
        count,
    }
}

fn subsample_spectrum(f: &FourierField) -> FourierField {
    let values = f.values.slice(ndarray::s![..;2, ..;2, ..;2]).to_owned();
    FourierField {
        beta1: subsample(&f.beta1),
        beta2: subsample(&f.beta2),
        p: subsample(&f.p),
        values,
        spatial: f.spatial,
    }
}

/// One coefficient per sampling point, in the sampling's canonical order.
pub fn sdwt_batch(
    g: &SampledField,
    w: &dyn MotherWavelet,
    sampling: &ParameterSampling,
    q: &QuadratureSpec,
) -> Result<CoefficientField> {
    sampling.validate()?;
    q.validate(&g.grid)?;
    let coords = sampling.coords();
    let (values, err_est) = match q.method {
        Method::Direct => {
            let results: Vec<Result<Estimate>> = coords
                .par_iter()
                .map(|c| {
                    let tp = c.to_point()?;
                    sdwt_forward(g, w, &tp, q)
                })
                .collect();
            let mut values = Vec::with_capacity(coords.len());
            let mut errs = Vec::with_capacity(coords.len());
            for (index, r) in results.into_iter().enumerate() {
                let e = r.map_err(|e| SdwtError::AtPoint {
                    index,
                    source: Box::new(e),
                })?;
                values.push(e.value);
                errs.push(e.err);
            }
            (values, errs)
        }
        Method::Fourier => {
            let f = signal_spectrum(g, q);
            let coarse = (q.error_mode == ErrorMode::Doubling).then(|| subsample_spectrum(&f));
            let slabs = sampling.slabs()?;
            let per_slab = sampling.lattice_count();
            let mut values = Vec::with_capacity(coords.len());
            let mut errs = Vec::with_capacity(coords.len());
            for (si, slab) in slabs.iter().enumerate() {
                let at = |e: SdwtError| SdwtError::AtPoint {
                    index: si * per_slab,
                    source: Box::new(e),
                };
                let fine = fourier_slab(
                    &f,
                    w,
                    &slab.sym,
                    slab.a,
                    &sampling.kappa1.nodes,
                    &sampling.kappa2.nodes,
                    &sampling.b.nodes,
                )
                .map_err(at)?;
                match &coarse {
                    Some(fc) => {
                        let c = fourier_slab(
                            fc,
                            w,
                            &slab.sym,
                            slab.a,
                            &sampling.kappa1.nodes,
                            &sampling.kappa2.nodes,
                            &sampling.b.nodes,
                        )
                        .map_err(at)?;
                        for (l, (v, cv)) in fine.iter().zip(c.iter()).enumerate() {
                            let err = (v - cv).norm();
                            q.check(*v, err).map_err(|e| SdwtError::AtPoint {
                                index: si * per_slab + l,
                                source: Box::new(e),
                            })?;
                            values.push(*v);
                            errs.push(err);
                        }
                    }
                    None => {
                        values.extend(fine.iter().copied());
                        errs.extend(std::iter::repeat_n(0.0, fine.len()));
                    }
                }
            }
            (values, errs)
        }
    };
    let meta = QuadratureMeta {
        grid: g.grid,
        tolerance: q.rel_tol,
        method: match q.method {
            Method::Direct => "direct".into(),
            Method::Fourier => "fourier".into(),
        },
        sqrt_branch: PRINCIPAL_BRANCH.into(),
        sampling: Some(sampling.clone()),
    };
    CoefficientField::new(coords, values, err_est, meta)
}
