//! ABCD form of the symplectic parameters and the mixed lens–Fresnel kernel
//! `<eta| U(s, r, 0; a, 0) |eta'>`.
//!
//! The kernel factorises into a Fresnel chirp in `eta1` and a delta function
//! `delta(eta2' - eta2/a)`. Only the `eta1` factor is a function; the delta is
//! carried structurally as the lens scale `a` and applied by resampling.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::fock::{smeared_eta_state, u_matrix_element, FockQuadrature, FockSpace};
use crate::model::{validate_symplectic, Axis, SymplecticParams, TransformPoint, C64};
use crate::quadrature::pairwise_sum_c;

pub const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ABCDMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ABCDMatrix {
    pub const IDENTITY: ABCDMatrix = ABCDMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = ABCDMatrix { a, b, c, d };
        let gap = m.det() - 1.0;
        if !(gap.abs() <= UNIMODULAR_TOL) {
            return Err(SdwtError::NotUnimodular(gap));
        }
        Ok(m)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `self * other`.
    pub fn mul(&self, o: &ABCDMatrix) -> ABCDMatrix {
        ABCDMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// `s + r = D - iB`, `s - r = A + iC`. Every constraint-satisfying pair gives
/// real entries with `AD - BC = |s|^2 - |r|^2 = 1`.
pub fn abcd_from_sr(s: C64, r: C64) -> Result<ABCDMatrix> {
    validate_symplectic(s, r)?;
    let sm = s - r;
    let sp = s + r;
    Ok(ABCDMatrix {
        a: sm.re,
        b: -sp.im,
        c: sm.im,
        d: sp.re,
    })
}

/// `s = ((A + D) - i(B - C))/2`, `r = -((A - D) + i(B + C))/2`.
pub fn sr_from_abcd(m: &ABCDMatrix) -> Result<SymplecticParams> {
    let gap = m.det() - 1.0;
    if !(gap.abs() <= UNIMODULAR_TOL) {
        return Err(SdwtError::NotUnimodular(gap));
    }
    let s = C64::new(m.a + m.d, -(m.b - m.c)) / 2.0;
    let r = -C64::new(m.a - m.d, m.b + m.c) / 2.0;
    validate_symplectic(s, r)
}

pub const KERNEL_BRANCH: &str = "principal sqrt(iB)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensFresnelKernel {
    pub abcd: ABCDMatrix,
    /// Lens scale of `eta2`.
    pub a: f64,
    pub branch: String,
}

impl LensFresnelKernel {
    pub fn new(abcd: ABCDMatrix, a: f64) -> Result<Self> {
        let abcd = ABCDMatrix::new(abcd.a, abcd.b, abcd.c, abcd.d)?;
        if !(a > 0.0) {
            return Err(SdwtError::NonPositiveDilation(a));
        }
        Ok(LensFresnelKernel {
            abcd,
            a,
            branch: KERNEL_BRANCH.into(),
        })
    }

    pub fn from_sr(s: C64, r: C64, a: f64) -> Result<Self> {
        Self::new(abcd_from_sr(s, r)?, a)
    }

    /// Weight `pi / sqrt(a)` of the delta factor.
    pub fn delta_weight(&self) -> f64 {
        PI / self.a.sqrt()
    }
}

/// `(pi/sqrt a) (2 i pi B)^{-1/2} exp[(i/2B)(A eta1'^2 - 2 eta1 eta1' + D eta1^2)]`.
pub fn kernel_eval(k: &LensFresnelKernel, eta1: f64, eta1p: f64) -> Result<C64> {
    let m = &k.abcd;
    if m.b == 0.0 {
        return Err(SdwtError::ZeroB);
    }
    let pre = k.delta_weight() / ((2.0 * PI).sqrt() * C64::new(0.0, m.b).sqrt());
    let phase = (m.a * eta1p * eta1p - 2.0 * eta1 * eta1p + m.d * eta1 * eta1) / (2.0 * m.b);
    Ok(pre * C64::from_polar(1.0, phase))
}

/// The `eta1` factor of the matrix element written in `(s, r)`:
/// `sqrt(pi/a) (s* + r* - s - r)^{-1/2} exp[-(eta1^2 + eta1'^2)/2 + ((r* - s) eta1'^2 - (s + r) eta1^2 + 2 eta1 eta1')/(s* + r* - s - r)]`.
pub fn sr_matrix_element(s: C64, r: C64, a: f64, eta1: f64, eta1p: f64) -> Result<C64> {
    if !(a > 0.0) {
        return Err(SdwtError::NonPositiveDilation(a));
    }
    let den = s.conj() + r.conj() - s - r;
    if den.norm() == 0.0 {
        return Err(SdwtError::DegenerateDenominator);
    }
    let expo = -(eta1 * eta1 + eta1p * eta1p) / 2.0
        + ((r.conj() - s) * eta1p * eta1p - (s + r) * eta1 * eta1 + 2.0 * eta1 * eta1p) / den;
    Ok((PI / a).sqrt() / den.sqrt() * expo.exp())
}

/// Kernel of the composed system: matrix product and product of lens scales.
pub fn kernel_compose(k1: &LensFresnelKernel, k2: &LensFresnelKernel) -> LensFresnelKernel {
    let m = k1.abcd.mul(&k2.abcd);
    assert!(
        (m.det() - 1.0).abs() < 1e-9,
        "product of unimodular matrices drifted: det = {}",
        m.det()
    );
    LensFresnelKernel {
        abcd: m,
        a: k1.a * k2.a,
        branch: KERNEL_BRANCH.into(),
    }
}

/// Samples `kernel_eval` on `axis x axis`, as `[eta1, eta1']`.
pub fn sample_kernel(k: &LensFresnelKernel, axis: &Axis) -> Result<Array2<C64>> {
    let n = axis.count;
    let flat: Vec<Result<C64>> = (0..n * n)
        .into_par_iter()
        .map(|i| kernel_eval(k, axis.node(i / n), axis.node(i % n)))
        .collect();
    let mut out = Vec::with_capacity(flat.len());
    for v in flat {
        out.push(v?);
    }
    Ok(Array2::from_shape_vec((n, n), out).expect("shape"))
}

/// A sampled function of `(eta1, eta2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneField {
    pub eta1: Axis,
    pub eta2: Axis,
    pub values: Array2<C64>,
}

impl PlaneField {
    pub fn from_fn(eta1: Axis, eta2: Axis, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = Array2::from_shape_fn((eta1.count, eta2.count), |(i, j)| f(eta1.node(i), eta2.node(j)));
        PlaneField { eta1, eta2, values }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.eta1.step * self.eta2.step
    }

    /// Linear interpolation in `eta2` on column `i`; zero outside the axis.
    fn interp_eta2(&self, i: usize, y: f64) -> C64 {
        let p = self.eta2.position(y);
        if p < 0.0 || p > (self.eta2.count - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let j = (p.floor() as usize).min(self.eta2.count.saturating_sub(2));
        let t = p - j as f64;
        if self.eta2.count == 1 {
            return self.values[[i, 0]];
        }
        self.values[[i, j]] * (1.0 - t) + self.values[[i, j + 1]] * t
    }
}

/// `(K f)(eta) = int d^2eta'/pi <eta|U|eta'> f(eta')`: the Fresnel integral
/// in `eta1` by the rectangle rule, and `eta2' = eta2/a` by linear
/// interpolation. The `1/pi` of the `|eta>` completeness relation leaves a
/// net weight `1/sqrt(a)`.
pub fn apply_kernel(k: &LensFresnelKernel, f: &PlaneField) -> Result<PlaneField> {
    let n1 = f.eta1.count;
    let n2 = f.eta2.count;
    let kern = sample_kernel(k, &f.eta1)?;
    let h = f.eta1.step;
    let rows: Vec<Vec<C64>> = (0..n1)
        .into_par_iter()
        .map(|i| {
            (0..n2)
                .map(|j| {
                    let y = f.eta2.node(j) / k.a;
                    let terms: Vec<C64> = (0..n1).map(|l| kern[[i, l]] * f.interp_eta2(l, y)).collect();
                    pairwise_sum_c(&terms) * h / PI
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((n1, n2), |(i, j)| rows[i][j]);
    Ok(PlaneField {
        eta1: f.eta1,
        eta2: f.eta2,
        values,
    })
}

/// Gaussian smearing `exp(-|eta - center|^2 / (2 sigma^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smearing {
    pub center: C64,
    pub sigma: f64,
}

impl Smearing {
    pub fn eval(&self, eta: C64) -> f64 {
        (-(eta - self.center).norm_sqr() / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// `int d^2eta d^2eta' f(eta) g(eta') <eta|U|eta'>` from the closed form: the
/// delta removes `eta2'`, leaving a rectangle rule over `(eta1, eta1', eta2)`.
pub fn smeared_element_closed(
    s: C64,
    r: C64,
    a: f64,
    f: &Smearing,
    g: &Smearing,
    n: usize,
    half_width: f64,
) -> Result<C64> {
    sr_matrix_element(s, r, a, 0.0, 0.0)?;
    let ax = Axis::symmetric(0.0, half_width, n)?;
    let h = ax.step;
    let nodes = ax.nodes();
    let rows: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let e1 = nodes[i];
            let mut terms = Vec::with_capacity(n * n);
            for &e1p in &nodes {
                let k = sr_matrix_element(s, r, a, e1, e1p).expect("validated");
                for &e2 in &nodes {
                    terms.push(k * f.eval(C64::new(e1, e2)) * g.eval(C64::new(e1p, e2 / a)));
                }
            }
            pairwise_sum_c(&terms)
        })
        .collect();
    Ok(pairwise_sum_c(&rows) * h * h * h)
}

/// The same element from truncated Fock states: both smeared `|eta>` states
/// are built by quadrature and contracted with `U` node by node.
pub fn smeared_element_fock(
    s: C64,
    r: C64,
    a: f64,
    f: &Smearing,
    g: &Smearing,
    space: FockSpace,
    quad: &FockQuadrature,
) -> Result<C64> {
    let sym = validate_symplectic(s, r)?;
    let bra = smeared_eta_state(f.center, f.sigma, space, 40)?;
    let ket = smeared_eta_state(g.center, g.sigma, space, 40)?;
    let tp = TransformPoint::new(sym, a, 0.0, C64::new(0.0, 0.0))?;
    u_matrix_element(&bra, &ket, &tp, quad)
}
