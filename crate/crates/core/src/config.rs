//! Run configuration: one JSON document, with individual keys overridable
//! by dotted paths (`sampling.n_phi=8`).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{ParameterSampling, QuadratureSpec, SamplingSpec};
use crate::error::{Result, SdwtError};
use crate::fock::{FockQuadrature, FockSpace};
use crate::model::{Axis, Grid3D};
use crate::wavelet::{AdmissibilityCutoffs, WaveletSpec};

/// Signal grid: square alpha plane plus an x axis, centered at zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub alpha_radius: f64,
    pub alpha_count: usize,
    pub x_radius: f64,
    pub x_count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alpha_radius: 6.0,
            alpha_count: 32,
            x_radius: 8.0,
            x_count: 64,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid3D> {
        let a = Axis::symmetric(0.0, self.alpha_radius, self.alpha_count)?;
        Ok(Grid3D::new(a, a, Axis::symmetric(0.0, self.x_radius, self.x_count)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FockSpec {
    /// Cutoff for state-level checks.
    pub state_cutoff: usize,
    /// Cutoff for operator assembly.
    pub operator_cutoff: usize,
    pub nodes: usize,
    pub min_radius: f64,
}

impl Default for FockSpec {
    fn default() -> Self {
        let q = FockQuadrature::default();
        FockSpec {
            state_cutoff: 24,
            operator_cutoff: 12,
            nodes: q.nodes,
            min_radius: q.min_radius,
        }
    }
}

impl FockSpec {
    pub fn quadrature(&self) -> FockQuadrature {
        FockQuadrature {
            nodes: self.nodes,
            min_radius: self.min_radius,
        }
    }

    pub fn state_space(&self) -> Result<FockSpace> {
        FockSpace::new(self.state_cutoff)
    }

    pub fn operator_space(&self) -> Result<FockSpace> {
        FockSpace::new(self.operator_cutoff)
    }
}

/// Parameters of the `kernel` verb.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelSpec {
    pub mu: f64,
    pub phi: f64,
    pub theta: f64,
    pub a: f64,
    pub eta_radius: f64,
    pub eta_count: usize,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            mu: 0.4,
            phi: 0.2,
            theta: 0.0,
            a: 1.3,
            eta_radius: 4.0,
            eta_count: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub wavelet: WaveletSpec,
    pub grid: GridSpec,
    pub sampling: SamplingSpec,
    pub quadrature: QuadratureSpec,
    pub fock: FockSpec,
    pub kernel: KernelSpec,
    /// Signal file read by the `transform` verb.
    pub input: Option<String>,
    pub out_dir: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            wavelet: WaveletSpec::default(),
            grid: GridSpec::default(),
            sampling: SamplingSpec::default(),
            quadrature: QuadratureSpec::default(),
            fock: FockSpec::default(),
            kernel: KernelSpec::default(),
            input: None,
            out_dir: "out".into(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies `path=value` overrides in order. Values are parsed as JSON and
    /// fall back to plain strings.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut doc = serde_json::to_value(self)?;
        for o in overrides {
            let o = o.as_ref();
            let (path, raw) = o
                .split_once('=')
                .ok_or_else(|| SdwtError::Parse(format!("override {o:?} is not path=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut doc, path, value)?;
        }
        Ok(serde_json::from_value(doc)?)
    }

    /// Builds every referenced spec once, so errors surface before a run.
    pub fn validate(&self) -> Result<()> {
        self.wavelet.build()?;
        let grid = self.grid.build()?;
        self.quadrature.validate(&grid)?;
        self.sampling.resolve(&grid)?;
        self.fock.state_space()?;
        self.fock.operator_space()?;
        if self.fock.nodes == 0 {
            return Err(SdwtError::InvalidGrid("Fock quadrature needs at least one node".into()));
        }
        Ok(())
    }

    pub fn parameter_sampling(&self) -> Result<ParameterSampling> {
        self.sampling.resolve(&self.grid.build()?)
    }

    /// Admissibility cutoffs matching the parameter sampling ranges.
    pub fn admissibility_cutoffs(&self) -> AdmissibilityCutoffs {
        AdmissibilityCutoffs {
            mu_max: self.sampling.mu_max,
            a_min: self.sampling.a_min,
            a_max: self.sampling.a_max,
            ..Default::default()
        }
    }
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| SdwtError::Parse(format!("{path}: {} is not an object", parts[..i].join("."))))?;
        if !obj.contains_key(*key) {
            return Err(SdwtError::Parse(format!("{path}: unknown key {key:?}")));
        }
        if i + 1 == parts.len() {
            obj.insert((*key).to_string(), value);
            return Ok(());
        }
        cur = obj.get_mut(*key).expect("checked");
    }
    Err(SdwtError::Parse("empty override path".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_validate() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        c.validate().unwrap();
        let s = c.parameter_sampling().unwrap();
        assert_eq!((s.kappa1.len(), s.kappa2.len(), s.b.len()), (8, 8, 16));
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn dotted_overrides() {
        let c = RunConfig::default()
            .with_overrides(&[
                "sampling.n_phi=4",
                "seed=7",
                "out_dir=runs/a",
                "quadrature.method=\"direct\"",
            ])
            .unwrap();
        assert_eq!(c.sampling.n_phi, 4);
        assert_eq!(c.seed, 7);
        assert_eq!(c.out_dir, "runs/a");
        assert_eq!(c.quadrature.method, crate::engine::Method::Direct);
        assert!(RunConfig::default().with_overrides(&["sampling.bogus=1"]).is_err());
        assert!(RunConfig::default().with_overrides(&["seed"]).is_err());
        assert!(RunConfig::default().with_overrides(&["seed.x=1"]).is_err());
        assert!(RunConfig::default().with_overrides(&["seed=-1"]).is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let c = RunConfig::default().with_overrides(&["grid.alpha_count=0"]).unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::default()
            .with_overrides(&["wavelet.wavelet=\"morlet\""])
            .unwrap();
        assert!(c.validate().is_err());
        assert!(RunConfig::from_json("{\"unknown\": 1}").is_err());
    }
}
