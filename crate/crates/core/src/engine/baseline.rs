//! The two one-sided transforms the full transform combines: the classic
//! continuous wavelet transform on the line and the symplectic wavelet
//! transform on the plane.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Result, SdwtError};
use crate::model::{validate_symplectic, Axis, C64};
use crate::quadrature::pairwise_sum_c;

#[derive(Clone, Debug, PartialEq)]
pub struct Signal1D {
    pub axis: Axis,
    pub values: Vec<C64>,
}

impl Signal1D {
    pub fn from_fn(axis: Axis, f: impl Fn(f64) -> C64) -> Self {
        let values = axis.nodes().into_iter().map(f).collect();
        Signal1D { axis, values }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal2D {
    pub re: Axis,
    pub im: Axis,
    pub values: Array2<C64>,
}

impl Signal2D {
    pub fn from_fn(re: Axis, im: Axis, f: impl Fn(C64) -> C64) -> Self {
        let values = Array2::from_shape_fn((re.count, im.count), |(i, j)| f(C64::new(re.node(i), im.node(j))));
        Signal2D { re, im, values }
    }
}

/// Second derivative of a Gaussian, sign chosen so the centre is positive.
pub fn mexican_hat(x: f64) -> C64 {
    C64::new((1.0 - x * x) * (-x * x / 2.0).exp(), 0.0)
}

/// `(1/sqrt|a|) int f(x) conj(phi((x - b)/a)) dx`.
pub fn classic_wt_1d(f: &Signal1D, phi: impl Fn(f64) -> C64, a: f64, b: f64) -> Result<C64> {
    if a == 0.0 {
        return Err(SdwtError::ZeroDilation);
    }
    if f.values.len() != f.axis.count {
        return Err(SdwtError::ShapeMismatch {
            expected: f.axis.count,
            found: f.values.len(),
        });
    }
    let terms: Vec<C64> = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * phi((f.axis.node(k) - b) / a).conj())
        .collect();
    Ok(pairwise_sum_c(&terms) * f.axis.step / a.abs().sqrt())
}

/// `int d^2z/pi f(z) conj(sqrt(s*) phi(s(z - kappa) - r(z - kappa)*))`.
pub fn swt_complex(f: &Signal2D, phi: impl Fn(C64) -> C64, s: C64, r: C64, kappa: C64) -> Result<C64> {
    let sym = validate_symplectic(s, r)?;
    if f.values.dim() != (f.re.count, f.im.count) {
        return Err(SdwtError::ShapeMismatch {
            expected: f.re.count * f.im.count,
            found: f.values.len(),
        });
    }
    let pre = s.conj().sqrt();
    let terms: Vec<C64> = f
        .values
        .indexed_iter()
        .map(|((i, j), v)| {
            let z = C64::new(f.re.node(i), f.im.node(j));
            v * (pre * phi(sym.apply(z - kappa))).conj()
        })
        .collect();
    Ok(pairwise_sum_c(&terms) * f.re.step * f.im.step / PI)
}
