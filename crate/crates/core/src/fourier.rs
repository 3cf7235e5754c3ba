//! Fourier pair on C x R:
//!
//! `F(beta, p) = int dx/sqrt(2 pi) int d^2alpha/pi g(alpha, x) exp(alpha beta* - alpha* beta + i p x)`
//!
//! and its inverse with the conjugate kernel. Since
//! `alpha beta* - alpha* beta = 2i (alpha2 beta1 - alpha1 beta2)`, the plane
//! part is two 1D transforms in which `alpha1` pairs with `beta2` and `alpha2`
//! with `beta1`. Each 1D transform is an FFT on centered uniform grids.

use std::f64::consts::PI;

use ndarray::{Array1, Array3, Axis as NdAxis, Zip};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Result, SdwtError};
use crate::model::{Axis, Grid3D, SampledField, C64};

/// Complex values over a `(beta1, beta2, p)` grid, together with the spatial
/// grid it is conjugate to.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    pub beta1: Axis,
    pub beta2: Axis,
    pub p: Axis,
    pub values: Array3<C64>,
    pub spatial: Grid3D,
}

impl FourierField {
    #[inline]
    pub fn beta(&self, i: usize, j: usize) -> C64 {
        C64::new(self.beta1.node(i), self.beta2.node(j))
    }

    /// `d beta1 d beta2 dp` of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.beta1.step * self.beta2.step * self.p.step
    }

    pub fn norm_sqr(&self) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        crate::quadrature::pairwise_sum(&terms) * self.cell_volume()
    }

    /// Same grid, values from a function of `(beta, p)`.
    pub fn from_fn(template: &FourierField, f: impl Fn(C64, f64) -> C64) -> FourierField {
        let values = Array3::from_shape_fn(template.values.dim(), |(i, j, k)| {
            f(template.beta(i, j), template.p.node(k))
        });
        FourierField {
            values,
            ..template.clone()
        }
    }
}

/// Step of the conjugate axis: `gamma * dy * h = 2 pi / n`.
fn conjugate_axis(t: &Axis, gamma: f64, center: f64) -> Axis {
    Axis {
        center,
        step: 2.0 * PI / (gamma * t.count as f64 * t.step),
        count: t.count,
    }
}

/// Largest |beta| and |p| resolved by a spatial grid.
pub fn nyquist(grid: &Grid3D) -> (f64, f64) {
    let b = PI / (2.0 * grid.alpha1.step.max(grid.alpha2.step));
    let p = PI / grid.x.step;
    (b, p)
}

/// `GridTooCoarse` unless the grid resolves `|beta| <= beta_max` and `|p| <= p_max`.
pub fn check_extent(grid: &Grid3D, beta_max: f64, p_max: f64) -> Result<()> {
    let (nb, np) = nyquist(grid);
    if beta_max > nb {
        return Err(SdwtError::GridTooCoarse {
            requested: beta_max,
            nyquist: nb,
        });
    }
    if p_max > np {
        return Err(SdwtError::GridTooCoarse {
            requested: p_max,
            nyquist: np,
        });
    }
    Ok(())
}

/// `sum_j f_j exp(i sigma gamma y_l t_j)` along one axis of `data`, from
/// nodes `t` to nodes `y` (which must be conjugate to `t`).
fn dft_axis(data: &mut Array3<C64>, axis: usize, sigma: f64, gamma: f64, t: &Axis, y: &Axis) {
    let n = t.count;
    let fft: Arc<dyn Fft<f64>> = {
        let mut planner = FftPlanner::new();
        if sigma > 0.0 {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };
    let c = t.mid();
    let tau = 2.0 * PI / n as f64;
    let pre: Array1<C64> = (0..n)
        .map(|j| {
            let jc = j as f64 - c;
            C64::from_polar(1.0, sigma * (gamma * y.center * jc * t.step - tau * c * j as f64))
        })
        .collect();
    let post: Array1<C64> = (0..n)
        .map(|l| {
            let lc = l as f64 - c;
            let lf = l as f64;
            C64::from_polar(
                1.0,
                sigma * (gamma * y.center * t.center + gamma * lc * y.step * t.center + tau * (c * c - lf * c)),
            )
        })
        .collect();
    Zip::from(data.lanes_mut(NdAxis(axis))).par_for_each(|mut lane| {
        let mut buf: Vec<C64> = lane.iter().zip(pre.iter()).map(|(v, p)| v * p).collect();
        fft.process(&mut buf);
        for ((dst, v), p) in lane.iter_mut().zip(buf).zip(post.iter()) {
            *dst = v * p;
        }
    });
}

/// Embeds `g` in a grid `factor` times wider per axis (rounded so the
/// original nodes stay nodes), filling with zeros.
pub fn zero_pad(g: &SampledField, factor: usize) -> SampledField {
    if factor <= 1 {
        return g.clone();
    }
    let grow = |a: &Axis| {
        let extra = (factor - 1) * a.count / 2;
        (
            Axis {
                count: a.count + 2 * extra,
                ..*a
            },
            extra,
        )
    };
    let (a1, o1) = grow(&g.grid.alpha1);
    let (a2, o2) = grow(&g.grid.alpha2);
    let (x, o3) = grow(&g.grid.x);
    let grid = Grid3D::new(a1, a2, x);
    let mut values = Array3::zeros(grid.shape());
    let (n1, n2, n3) = g.grid.shape();
    values
        .slice_mut(ndarray::s![o1..o1 + n1, o2..o2 + n2, o3..o3 + n3])
        .assign(&g.values);
    SampledField { grid, values }
}

/// Inverse of [`zero_pad`]: the sub-block of `padded` lying on `grid`.
pub fn crop(padded: &SampledField, grid: Grid3D) -> Result<SampledField> {
    let off = |big: &Axis, small: &Axis| -> Result<usize> {
        let extra = big.count.checked_sub(small.count).filter(|e| e % 2 == 0);
        match extra {
            Some(e)
                if (big.step - small.step).abs() <= 1e-12 * small.step
                    && (big.center - small.center).abs() <= 1e-12 * small.step.max(1.0) =>
            {
                Ok(e / 2)
            }
            _ => Err(SdwtError::InvalidGrid("grid is not a centered sub-grid".into())),
        }
    };
    let o1 = off(&padded.grid.alpha1, &grid.alpha1)?;
    let o2 = off(&padded.grid.alpha2, &grid.alpha2)?;
    let o3 = off(&padded.grid.x, &grid.x)?;
    let (n1, n2, n3) = grid.shape();
    let values = padded
        .values
        .slice(ndarray::s![o1..o1 + n1, o2..o2 + n2, o3..o3 + n3])
        .to_owned();
    Ok(SampledField { grid, values })
}

/// Forward transform onto the conjugate grid centered at zero.
pub fn forward_ft(g: &SampledField) -> FourierField {
    forward_ft_centered(g, C64::new(0.0, 0.0), 0.0)
}

/// Forward transform onto the conjugate grid centered at `(beta_c, p_c)`.
pub fn forward_ft_centered(g: &SampledField, beta_c: C64, p_c: f64) -> FourierField {
    let grid = g.grid;
    // alpha1 -> beta2 (sigma -1), alpha2 -> beta1 (sigma +1), x -> p (sigma +1).
    let beta2 = conjugate_axis(&grid.alpha1, 2.0, beta_c.im);
    let beta1 = conjugate_axis(&grid.alpha2, 2.0, beta_c.re);
    let p = conjugate_axis(&grid.x, 1.0, p_c);
    let mut data = g.values.clone();
    dft_axis(&mut data, 0, -1.0, 2.0, &grid.alpha1, &beta2);
    dft_axis(&mut data, 1, 1.0, 2.0, &grid.alpha2, &beta1);
    dft_axis(&mut data, 2, 1.0, 1.0, &grid.x, &p);
    // Axis 0 now indexes beta2 and axis 1 beta1.
    data.swap_axes(0, 1);
    let scale = grid.cell_volume() / (PI * (2.0 * PI).sqrt());
    let values = data.mapv(|v| v * scale).as_standard_layout().into_owned();
    FourierField {
        beta1,
        beta2,
        p,
        values,
        spatial: grid,
    }
}

/// Inverse transform back onto the spatial grid recorded in `f`.
pub fn inverse_ft(f: &FourierField) -> SampledField {
    let grid = f.spatial;
    let mut data = f.values.clone();
    data.swap_axes(0, 1);
    let mut data = data.as_standard_layout().into_owned();
    // Axis 0 indexes beta2 -> alpha1 (sigma +1), axis 1 beta1 -> alpha2 (sigma -1), p -> x (sigma -1).
    dft_axis(&mut data, 0, 1.0, 2.0, &f.beta2, &grid.alpha1);
    dft_axis(&mut data, 1, -1.0, 2.0, &f.beta1, &grid.alpha2);
    dft_axis(&mut data, 2, -1.0, 1.0, &f.p, &grid.x);
    let scale = f.cell_volume() / (PI * (2.0 * PI).sqrt());
    SampledField {
        grid,
        values: data.mapv(|v| v * scale),
    }
}

/// Plane part alone, `int d^2alpha/pi g exp(alpha beta* - alpha* beta)`, at
/// every `x`; the result is laid out on a spatial-looking grid whose plane
/// axes are `(beta1, beta2)`. The kernel is symmetric under exchanging
/// `alpha` and `beta`, so applying it twice returns the input.
pub fn plane_ft(g: &SampledField) -> SampledField {
    let grid = g.grid;
    let beta2 = conjugate_axis(&grid.alpha1, 2.0, 0.0);
    let beta1 = conjugate_axis(&grid.alpha2, 2.0, 0.0);
    let mut data = g.values.clone();
    dft_axis(&mut data, 0, -1.0, 2.0, &grid.alpha1, &beta2);
    dft_axis(&mut data, 1, 1.0, 2.0, &grid.alpha2, &beta1);
    data.swap_axes(0, 1);
    let scale = grid.alpha1.step * grid.alpha2.step / PI;
    SampledField {
        grid: Grid3D::new(beta1, beta2, grid.x),
        values: data.mapv(|v| v * scale).as_standard_layout().into_owned(),
    }
}
