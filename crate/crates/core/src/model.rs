//! Parameter types, grids and sampled fields shared by every other module.
//!
//! All types are immutable once built and are `Send + Sync`.

use ndarray::Array3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};

pub type C64 = Complex64;

/// Tolerance on `|s|^2 - |r|^2 = 1` accepted by [`validate_symplectic`].
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Complex pair `(s, r)` on the surface `|s|^2 - |r|^2 = 1`, acting on the
/// plane as `z -> s z - r z*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticParams {
    s: C64,
    r: C64,
}

pub fn validate_symplectic(s: C64, r: C64) -> Result<SymplecticParams> {
    if !(s.re.is_finite() && s.im.is_finite() && r.re.is_finite() && r.im.is_finite()) {
        return Err(SdwtError::NonFinite("symplectic parameters".into()));
    }
    let gap = s.norm_sqr() - r.norm_sqr() - 1.0;
    if gap.abs() > SYMPLECTIC_TOL {
        return Err(SdwtError::ConstraintViolation(gap));
    }
    Ok(SymplecticParams { s, r })
}

/// `s = e^{i phi} cosh mu`, `r = e^{i theta} sinh mu`.
pub fn symplectic_from_hyperbolic(mu: f64, phi: f64, theta: f64) -> Result<SymplecticParams> {
    if mu < 0.0 {
        return Err(SdwtError::NegativeModulus(mu));
    }
    if !(mu.is_finite() && phi.is_finite() && theta.is_finite()) {
        return Err(SdwtError::NonFinite("hyperbolic coordinates".into()));
    }
    Ok(SymplecticParams {
        s: C64::from_polar(mu.cosh(), phi),
        r: C64::from_polar(mu.sinh(), theta),
    })
}

impl SymplecticParams {
    pub const IDENTITY: SymplecticParams = SymplecticParams {
        s: C64::new(1.0, 0.0),
        r: C64::new(0.0, 0.0),
    };

    pub fn s(&self) -> C64 {
        self.s
    }

    pub fn r(&self) -> C64 {
        self.r
    }

    /// `z -> s z - r z*`. Area preserving (real determinant 1).
    #[inline]
    pub fn apply(&self, z: C64) -> C64 {
        self.s * z - self.r * z.conj()
    }

    #[inline]
    pub fn apply_inverse(&self, w: C64) -> C64 {
        self.s.conj() * w + self.r * w.conj()
    }

    /// The spectral argument `s* beta* - r* beta` at which the Fourier image of
    /// a transformed wavelet is read.
    #[inline]
    pub fn spectral_arg(&self, beta: C64) -> C64 {
        self.s.conj() * beta.conj() - self.r.conj() * beta
    }

    /// `(mu, phi, theta)`; theta is reported as 0 when `r = 0`.
    pub fn hyperbolic(&self) -> (f64, f64, f64) {
        let mu = self.s.norm().max(1.0).acosh();
        let theta = if self.r.norm() == 0.0 { 0.0 } else { self.r.arg() };
        (mu, self.s.arg(), theta)
    }
}

/// Real dilation `a != 0` and shift `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationParams {
    a: f64,
    b: f64,
}

impl DilationParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(SdwtError::NonFinite("dilation parameters".into()));
        }
        if a == 0.0 {
            return Err(SdwtError::ZeroDilation);
        }
        Ok(DilationParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `lambda = ln a`; absent for negative dilations.
    pub fn lambda(&self) -> Option<f64> {
        (self.a > 0.0).then(|| self.a.ln())
    }

    /// `sech(ln a) = 2a / (1 + a^2)`.
    pub fn sech_lambda(&self) -> Option<f64> {
        (self.a > 0.0).then(|| 2.0 * self.a / (1.0 + self.a * self.a))
    }

    /// `tanh(ln a) = (a^2 - 1) / (1 + a^2)`.
    pub fn tanh_lambda(&self) -> Option<f64> {
        (self.a > 0.0).then(|| (self.a * self.a - 1.0) / (1.0 + self.a * self.a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationParams {
    pub kappa: C64,
}

/// One point `(s, r, kappa; a, b)` of the five-parameter transform domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformPoint {
    pub sym: SymplecticParams,
    pub dil: DilationParams,
    pub tr: TranslationParams,
}

impl TransformPoint {
    pub fn new(sym: SymplecticParams, a: f64, b: f64, kappa: C64) -> Result<Self> {
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(SdwtError::NonFinite("translation".into()));
        }
        Ok(TransformPoint {
            sym,
            dil: DilationParams::new(a, b)?,
            tr: TranslationParams { kappa },
        })
    }

    pub fn identity() -> Self {
        TransformPoint {
            sym: SymplecticParams::IDENTITY,
            dil: DilationParams { a: 1.0, b: 0.0 },
            tr: TranslationParams {
                kappa: C64::new(0.0, 0.0),
            },
        }
    }

    pub fn from_hyperbolic(mu: f64, phi: f64, theta: f64, kappa: C64, a: f64, b: f64) -> Result<Self> {
        Self::new(symplectic_from_hyperbolic(mu, phi, theta)?, a, b, kappa)
    }
}

/// Uniform axis `center + (j - (count-1)/2) * step`, symmetric about its center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub center: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(center: f64, step: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(SdwtError::InvalidGrid(format!("axis count {count} < 2")));
        }
        if !(step > 0.0 && step.is_finite() && center.is_finite()) {
            return Err(SdwtError::InvalidGrid(format!("axis step {step} / center {center}")));
        }
        Ok(Axis { center, step, count })
    }

    /// Axis spanning `[center - radius, center + radius]` with `count` nodes.
    pub fn symmetric(center: f64, radius: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(SdwtError::InvalidGrid(format!("axis count {count} < 2")));
        }
        Self::new(center, 2.0 * radius / (count as f64 - 1.0), count)
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.center + (j as f64 - self.mid()) * self.step
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        (self.count as f64 - 1.0) / 2.0
    }

    pub fn radius(&self) -> f64 {
        self.mid() * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.node(j)).collect()
    }

    /// Fractional index of `v`; used for interpolation.
    pub fn position(&self, v: f64) -> f64 {
        (v - self.center) / self.step + self.mid()
    }
}

/// Tensor grid over `(alpha1, alpha2, x)`; values are stored row-major in that order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid3D {
    pub alpha1: Axis,
    pub alpha2: Axis,
    pub x: Axis,
}

impl Grid3D {
    pub fn new(alpha1: Axis, alpha2: Axis, x: Axis) -> Self {
        Grid3D { alpha1, alpha2, x }
    }

    /// Square alpha-plane grid of the given radius plus an x axis, all centered at zero.
    pub fn centered(alpha_radius: f64, alpha_count: usize, x_radius: f64, x_count: usize) -> Result<Self> {
        let a = Axis::symmetric(0.0, alpha_radius, alpha_count)?;
        Ok(Grid3D::new(a, a, Axis::symmetric(0.0, x_radius, x_count)?))
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.alpha1.count, self.alpha2.count, self.x.count)
    }

    pub fn len(&self) -> usize {
        self.alpha1.count * self.alpha2.count * self.x.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `d alpha1 d alpha2 dx` of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.alpha1.step * self.alpha2.step * self.x.step
    }

    #[inline]
    pub fn alpha(&self, i: usize, j: usize) -> C64 {
        C64::new(self.alpha1.node(i), self.alpha2.node(j))
    }
}

/// Complex function `g(alpha, x)` tabulated on a [`Grid3D`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Grid3D,
    pub values: Array3<C64>,
}

impl SampledField {
    pub fn new(grid: Grid3D, values: Array3<C64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(SdwtError::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(SdwtError::NonFinite("sampled field".into()));
        }
        Ok(SampledField { grid, values })
    }

    pub fn zeros(grid: Grid3D) -> Self {
        SampledField {
            grid,
            values: Array3::zeros(grid.shape()),
        }
    }

    pub fn from_fn(grid: Grid3D, f: impl Fn(C64, f64) -> C64) -> Self {
        let values = Array3::from_shape_fn(grid.shape(), |(i, j, k)| f(grid.alpha(i, j), grid.x.node(k)));
        SampledField { grid, values }
    }

    /// Unit-mass point source at `(alpha, x)`, spread over the surrounding
    /// cell with trilinear weights. On a node it is `1/cell_volume` at that node.
    pub fn grid_delta(grid: Grid3D, alpha: C64, x: f64) -> Result<Self> {
        let pos = [
            grid.alpha1.position(alpha.re),
            grid.alpha2.position(alpha.im),
            grid.x.position(x),
        ];
        let counts = [grid.alpha1.count, grid.alpha2.count, grid.x.count];
        let mut lo = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..3 {
            if pos[d] < 0.0 || pos[d] > (counts[d] - 1) as f64 {
                return Err(SdwtError::InvalidGrid("delta location outside grid".into()));
            }
            let base = pos[d].floor().min((counts[d] - 2) as f64);
            lo[d] = base as usize;
            frac[d] = pos[d] - base;
        }
        let mut field = Self::zeros(grid);
        let mass = 1.0 / grid.cell_volume();
        for corner in 0..8usize {
            let mut w = mass;
            let mut idx = [0usize; 3];
            for d in 0..3 {
                let up = (corner >> d) & 1 == 1;
                idx[d] = lo[d] + usize::from(up);
                w *= if up { frac[d] } else { 1.0 - frac[d] };
            }
            field.values[idx] += C64::new(w, 0.0);
        }
        Ok(field)
    }

    /// `sum g h* dV` over the grid (rectangle rule).
    pub fn inner(&self, other: &SampledField) -> C64 {
        let sum = crate::quadrature::pairwise_sum_c(
            &self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a * b.conj())
                .collect::<Vec<_>>(),
        );
        sum * self.grid.cell_volume()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        SampledField {
            grid: self.grid,
            values: self.values.mapv(f),
        }
    }

    pub fn add(&self, other: &SampledField) -> Self {
        SampledField {
            grid: self.grid,
            values: &self.values + &other.values,
        }
    }

    pub fn sub(&self, other: &SampledField) -> Self {
        SampledField {
            grid: self.grid,
            values: &self.values - &other.values,
        }
    }

    /// Relative L2 distance to `reference`, restricted to nodes with
    /// `|alpha_i - c_i| <= f * radius_i` and `|x - c_x| <= f * radius_x`.
    pub fn relative_l2_error(&self, reference: &SampledField, fraction: f64) -> f64 {
        let g = &self.grid;
        let mut num = 0.0;
        let mut den = 0.0;
        for ((i, j, k), v) in self.values.indexed_iter() {
            let inside = (g.alpha1.node(i) - g.alpha1.center).abs() <= fraction * g.alpha1.radius() + 1e-12
                && (g.alpha2.node(j) - g.alpha2.center).abs() <= fraction * g.alpha2.radius() + 1e-12
                && (g.x.node(k) - g.x.center).abs() <= fraction * g.x.radius() + 1e-12;
            if inside {
                let r = reference.values[[i, j, k]];
                num += (v - r).norm_sqr();
                den += r.norm_sqr();
            }
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Point `(beta, p)` conjugate to `(alpha, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierPoint {
    pub beta: C64,
    pub p: f64,
}

/// Coordinates of one coefficient, in the hyperbolic parametrisation of the
/// symplectic surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamCoords {
    pub mu: f64,
    pub phi: f64,
    pub theta: f64,
    pub kappa: C64,
    pub a: f64,
    pub b: f64,
}

impl ParamCoords {
    pub fn to_point(&self) -> Result<TransformPoint> {
        TransformPoint::from_hyperbolic(self.mu, self.phi, self.theta, self.kappa, self.a, self.b)
    }
}

/// Provenance attached to a coefficient field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeta {
    pub grid: Grid3D,
    pub tolerance: f64,
    pub method: String,
    /// Branch used for the `sqrt(s*)` prefactor; coefficient phases depend on it.
    pub sqrt_branch: String,
    /// Present when the points form the tensor product of a
    /// [`crate::engine::ParameterSampling`], in its canonical order.
    pub sampling: Option<crate::engine::ParameterSampling>,
}

pub const PRINCIPAL_BRANCH: &str = "principal, cut on the negative real axis";

/// Transform values over a set of parameter points.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    pub coords: Vec<ParamCoords>,
    pub values: Vec<C64>,
    pub err_est: Vec<f64>,
    pub meta: QuadratureMeta,
}

impl CoefficientField {
    pub fn new(coords: Vec<ParamCoords>, values: Vec<C64>, err_est: Vec<f64>, meta: QuadratureMeta) -> Result<Self> {
        if coords.len() != values.len() || coords.len() != err_est.len() {
            return Err(SdwtError::ShapeMismatch {
                expected: coords.len(),
                found: values.len().min(err_est.len()),
            });
        }
        Ok(CoefficientField {
            coords,
            values,
            err_est,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> Result<Vec<TransformPoint>> {
        self.coords.iter().map(ParamCoords::to_point).collect()
    }

    pub fn add(&self, other: &CoefficientField) -> Result<Self> {
        if self.coords != other.coords {
            return Err(SdwtError::ShapeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        let err_est = self.err_est.iter().zip(&other.err_est).map(|(a, b)| a + b).collect();
        Ok(CoefficientField {
            coords: self.coords.clone(),
            values,
            err_est,
            meta: self.meta.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        assert!(validate_symplectic(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).is_ok());
        assert!(validate_symplectic(C64::new(1.25, 0.0), C64::new(0.75, 0.0)).is_ok());
        match validate_symplectic(C64::new(1.0, 0.0), C64::new(1.0, 0.0)) {
            Err(SdwtError::ConstraintViolation(g)) => assert!((g + 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hyperbolic_examples() {
        let id = symplectic_from_hyperbolic(0.0, 0.0, 0.0).unwrap();
        assert_eq!(id.s(), C64::new(1.0, 0.0));
        assert_eq!(id.r(), C64::new(0.0, 0.0));

        let p = symplectic_from_hyperbolic(2f64.ln(), 0.0, 0.0).unwrap();
        assert!((p.s() - C64::new(1.25, 0.0)).norm() < 1e-15);
        assert!((p.r() - C64::new(0.75, 0.0)).norm() < 1e-15);

        let q = symplectic_from_hyperbolic(1.0, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((q.s() - C64::new(0.0, 1f64.cosh())).norm() < 1e-15);
        assert!((q.r() - C64::new(1f64.sinh(), 0.0)).norm() < 1e-15);
        assert!(validate_symplectic(q.s(), q.r()).is_ok());

        assert!(matches!(
            symplectic_from_hyperbolic(-0.1, 0.0, 0.0),
            Err(SdwtError::NegativeModulus(_))
        ));
    }

    #[test]
    fn symplectic_map_inverts() {
        let p = symplectic_from_hyperbolic(0.7, 0.3, -1.1).unwrap();
        let z = C64::new(0.4, -1.3);
        assert!((p.apply_inverse(p.apply(z)) - z).norm() < 1e-14);
    }

    #[test]
    fn dilation_rejects_zero_and_tracks_lambda() {
        assert!(matches!(DilationParams::new(0.0, 1.0), Err(SdwtError::ZeroDilation)));
        let d = DilationParams::new(-2.0, 0.0).unwrap();
        assert!(d.lambda().is_none() && d.sech_lambda().is_none());
        let d = DilationParams::new(2.0, 0.0).unwrap();
        assert!((d.sech_lambda().unwrap() - 0.8).abs() < 1e-15);
        assert!((d.tanh_lambda().unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sech_tanh_identities_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a: f64 = rng.random_range(1e-6..=10.0);
            let d = DilationParams::new(a, 0.0).unwrap();
            let lam = d.lambda().unwrap();
            assert!((1.0 / lam.cosh() - d.sech_lambda().unwrap()).abs() < 1e-12);
            assert!((lam.tanh() - d.tanh_lambda().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_delta_has_unit_mass() {
        let grid = Grid3D::centered(2.0, 9, 2.0, 9).unwrap();
        let on_node = SampledField::grid_delta(grid, C64::new(0.5, -0.5), 1.0).unwrap();
        let nonzero = on_node.values.iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
        let off = SampledField::grid_delta(grid, C64::new(0.3, 0.1), -0.2).unwrap();
        let mass: C64 = off.values.iter().sum::<C64>() * grid.cell_volume();
        assert!((mass - 1.0).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn hyperbolic_points_always_validate(mu in 0.0f64..4.0, phi in -7.0f64..7.0, theta in -7.0f64..7.0) {
            let p = symplectic_from_hyperbolic(mu, phi, theta).unwrap();
            prop_assert!(validate_symplectic(p.s(), p.r()).is_ok());
        }
    }
}
