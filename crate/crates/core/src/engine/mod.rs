//! The transform itself: forward (direct and Fourier paths), batch driver,
//! adjoint, reproducing process, Parseval check and inversion, plus the two
//! one-sided baseline transforms.

mod baseline;
mod forward;
mod frame;
mod sampling;

pub use baseline::{classic_wt_1d, mexican_hat, swt_complex, Signal1D, Signal2D};
pub use forward::{fourier_slab, sdwt_batch, sdwt_forward, sdwt_forward_fourier, signal_spectrum};
pub use frame::{
    adjoint_transform, check_lattice_density, frame_multiplier, invert, parseval_check, parseval_from_coefficients,
    reproduce, slab_measure, FrameMultiplier, ParsevalReport,
};
pub use sampling::{ParameterSampling, SamplingSpec, Slab};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::model::{Grid3D, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Rectangle rule over the signal grid.
    Direct,
    /// Spectrum-weighted sum over the Fourier image of the signal.
    Fourier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    /// Compare against the same rule at twice the step.
    Doubling,
    None,
}

/// How a single coefficient integral is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub method: Method,
    pub error_mode: ErrorMode,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Zero-padding factor applied to the signal before its Fourier image is
    /// taken; wider padding pushes periodic images of broad wavelets further out.
    pub pad: usize,
    /// Declared envelope widths `(alpha, x)` of the signal, if known.
    pub envelope: Option<[f64; 2]>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: Method::Fourier,
            error_mode: ErrorMode::None,
            rel_tol: 1e-4,
            abs_tol: 1e-10,
            pad: 2,
            envelope: None,
        }
    }
}

impl QuadratureSpec {
    pub fn direct() -> Self {
        QuadratureSpec {
            method: Method::Direct,
            error_mode: ErrorMode::Doubling,
            ..Default::default()
        }
    }

    /// Checks the grid radii against four times the declared envelope.
    pub fn validate(&self, grid: &Grid3D) -> Result<()> {
        if self.pad == 0 {
            return Err(SdwtError::InvalidGrid("padding factor must be at least 1".into()));
        }
        if let Some([ea, ex]) = self.envelope {
            let ra = grid.alpha1.radius().min(grid.alpha2.radius());
            if ra < 4.0 * ea || grid.x.radius() < 4.0 * ex {
                return Err(SdwtError::InvalidGrid(format!(
                    "domain radii ({ra}, {}) below four envelope widths ({ea}, {ex})",
                    grid.x.radius()
                )));
            }
        }
        Ok(())
    }

    fn check(&self, value: C64, err: f64) -> Result<()> {
        let tol = self.rel_tol * value.norm() + self.abs_tol;
        if err > tol {
            return Err(SdwtError::QuadratureDivergence {
                estimate: err,
                tolerance: tol,
            });
        }
        Ok(())
    }
}

/// A quadrature value with its error estimate (zero when not estimated).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: C64,
    pub err: f64,
}
