//! Discretisation of the five-parameter domain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::model::{symplectic_from_hyperbolic, Axis, Grid3D, ParamCoords, SymplecticParams, C64};
use crate::quadrature::{gauss_legendre, midpoint, Rule};

/// Tensor-product sampling of `(mu, phi; a; kappa1, kappa2, b)` with
/// quadrature weights per axis. The mu weights are plain `dmu`, the phi
/// weights `dphi` and the a weights `da`; measure densities are applied by
/// the operations that need them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSampling {
    pub mu: Rule,
    pub phi: Rule,
    pub theta: f64,
    pub a: Rule,
    pub a_min: f64,
    pub kappa1: Rule,
    pub kappa2: Rule,
    pub b: Rule,
}

/// One `(s, r, a)` combination with its share of the measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slab {
    pub mu: f64,
    pub phi: f64,
    pub sym: SymplecticParams,
    pub a: f64,
    /// `dmu dphi da`.
    pub weight: f64,
}

impl ParameterSampling {
    pub fn validate(&self) -> Result<()> {
        let rules = [&self.mu, &self.phi, &self.a, &self.kappa1, &self.kappa2, &self.b];
        if rules.iter().any(|r| r.is_empty()) {
            return Err(SdwtError::InvalidGrid("empty sampling axis".into()));
        }
        let finite = rules
            .iter()
            .all(|r| r.nodes.iter().chain(&r.weights).all(|v| v.is_finite()) && r.nodes.len() == r.weights.len());
        if !finite || !self.theta.is_finite() {
            return Err(SdwtError::NonFinite("parameter sampling".into()));
        }
        if !(self.a_min > 0.0) {
            return Err(SdwtError::InvalidGrid(format!(
                "a_min = {} must be positive",
                self.a_min
            )));
        }
        if self.a.nodes.iter().any(|a| a.abs() < self.a_min) {
            return Err(SdwtError::InvalidGrid("dilation node inside the excluded band".into()));
        }
        if self.mu.nodes.iter().any(|m| *m < 0.0) {
            return Err(SdwtError::NegativeModulus(
                self.mu.nodes.iter().cloned().fold(0.0, f64::min),
            ));
        }
        Ok(())
    }

    pub fn slab_count(&self) -> usize {
        self.mu.len() * self.phi.len() * self.a.len()
    }

    pub fn lattice_count(&self) -> usize {
        self.kappa1.len() * self.kappa2.len() * self.b.len()
    }

    pub fn len(&self) -> usize {
        self.slab_count() * self.lattice_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Slabs in canonical order: mu outermost, then phi, then a.
    pub fn slabs(&self) -> Result<Vec<Slab>> {
        let mut out = Vec::with_capacity(self.slab_count());
        for (mu, wm) in self.mu.nodes.iter().zip(&self.mu.weights) {
            for (phi, wp) in self.phi.nodes.iter().zip(&self.phi.weights) {
                let sym = symplectic_from_hyperbolic(*mu, *phi, self.theta)?;
                for (a, wa) in self.a.nodes.iter().zip(&self.a.weights) {
                    out.push(Slab {
                        mu: *mu,
                        phi: *phi,
                        sym,
                        a: *a,
                        weight: wm * wp * wa,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Every point, in canonical order (slab-major, then kappa1, kappa2, b).
    pub fn coords(&self) -> Vec<ParamCoords> {
        let mut out = Vec::with_capacity(self.len());
        for mu in &self.mu.nodes {
            for phi in &self.phi.nodes {
                for a in &self.a.nodes {
                    for k1 in &self.kappa1.nodes {
                        for k2 in &self.kappa2.nodes {
                            for b in &self.b.nodes {
                                out.push(ParamCoords {
                                    mu: *mu,
                                    phi: *phi,
                                    theta: self.theta,
                                    kappa: C64::new(*k1, *k2),
                                    a: *a,
                                    b: *b,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `d^2kappa db` weight of lattice point `l` within a slab.
    pub fn lattice_weight(&self, l: usize) -> f64 {
        let nb = self.b.len();
        let n2 = self.kappa2.len();
        let ib = l % nb;
        let i2 = (l / nb) % n2;
        let i1 = l / (nb * n2);
        self.kappa1.weights[i1] * self.kappa2.weights[i2] * self.b.weights[ib]
    }

    /// A single point with unit weights.
    pub fn singleton(mu: f64, phi: f64, theta: f64, kappa: C64, a: f64, b: f64) -> Self {
        let one = |v: f64| Rule {
            nodes: vec![v],
            weights: vec![1.0],
        };
        ParameterSampling {
            mu: one(mu),
            phi: one(phi),
            theta,
            a: one(a),
            a_min: a.abs(),
            kappa1: one(kappa.re),
            kappa2: one(kappa.im),
            b: one(b),
        }
    }
}

/// Configuration-level description of a [`ParameterSampling`]; the
/// translation lattice is taken from the signal grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingSpec {
    pub mu_max: f64,
    pub n_mu: usize,
    pub n_phi: usize,
    pub theta: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Nodes per sign of a, midpoint rule in `ln|a|`.
    pub n_a: usize,
    pub negative_a: bool,
    /// Every `kappa_stride`-th node of the signal's alpha axes.
    pub kappa_stride: usize,
    /// Every `b_stride`-th node of the signal's x axis.
    pub b_stride: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            mu_max: 1.5,
            n_mu: 8,
            n_phi: 16,
            theta: 0.0,
            a_min: 0.05,
            a_max: 16.0,
            n_a: 12,
            negative_a: true,
            kappa_stride: 4,
            b_stride: 4,
        }
    }
}

impl SamplingSpec {
    /// Refinement ladder used by the convergence checks; level 0 is the default.
    pub fn refined(&self, level: usize) -> Self {
        let (n_mu, n_phi, n_a) = match level {
            0 => (self.n_mu, self.n_phi, self.n_a),
            1 => (self.n_mu * 3 / 2, self.n_phi * 2, self.n_a * 3 / 2),
            _ => (self.n_mu * 2, self.n_phi * 4, self.n_a * 2),
        };
        SamplingSpec {
            n_mu,
            n_phi,
            n_a,
            ..self.clone()
        }
    }

    pub fn resolve(&self, grid: &Grid3D) -> Result<ParameterSampling> {
        if self.n_mu == 0 || self.n_phi == 0 || self.n_a == 0 || self.kappa_stride == 0 || self.b_stride == 0 {
            return Err(SdwtError::InvalidGrid("sampling counts must be positive".into()));
        }
        if !(self.a_min > 0.0 && self.a_max > self.a_min && self.mu_max >= 0.0) {
            return Err(SdwtError::InvalidGrid(format!(
                "sampling ranges mu_max={} a=[{}, {}]",
                self.mu_max, self.a_min, self.a_max
            )));
        }
        let mu = gauss_legendre(self.n_mu).mapped(0.0, self.mu_max);
        let dphi = 2.0 * PI / self.n_phi as f64;
        let phi = Rule {
            nodes: (0..self.n_phi).map(|k| k as f64 * dphi).collect(),
            weights: vec![dphi; self.n_phi],
        };
        let log_rule = midpoint(self.n_a, self.a_min.ln(), self.a_max.ln());
        let mut a_nodes = Vec::new();
        let mut a_weights = Vec::new();
        if self.negative_a {
            for (t, w) in log_rule.nodes.iter().zip(&log_rule.weights).rev() {
                a_nodes.push(-t.exp());
                a_weights.push(t.exp() * w);
            }
        }
        for (t, w) in log_rule.nodes.iter().zip(&log_rule.weights) {
            a_nodes.push(t.exp());
            a_weights.push(t.exp() * w);
        }
        let s = ParameterSampling {
            mu,
            phi,
            theta: self.theta,
            a: Rule {
                nodes: a_nodes,
                weights: a_weights,
            },
            a_min: self.a_min,
            kappa1: strided(&grid.alpha1, self.kappa_stride),
            kappa2: strided(&grid.alpha2, self.kappa_stride),
            b: strided(&grid.x, self.b_stride),
        };
        s.validate()?;
        Ok(s)
    }
}

/// Every `stride`-th node of `axis`, kept symmetric about the center.
fn strided(axis: &Axis, stride: usize) -> Rule {
    let count = (axis.count - 1) / stride + 1;
    let step = axis.step * stride as f64;
    let sub = Axis {
        center: axis.center,
        step,
        count,
    };
    Rule {
        nodes: sub.nodes(),
        weights: vec![step; count],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_resolution() {
        let grid = Grid3D::centered(6.0, 32, 8.0, 64).unwrap();
        let s = SamplingSpec::default().resolve(&grid).unwrap();
        assert_eq!(s.mu.len(), 8);
        assert_eq!(s.phi.len(), 16);
        assert_eq!(s.a.len(), 24);
        assert_eq!(s.kappa1.len(), 8);
        assert_eq!(s.b.len(), 16);
        assert_eq!(s.len(), 8 * 16 * 24 * 8 * 8 * 16);
        assert!(s.a.nodes.iter().all(|a| a.abs() >= 0.05 && a.abs() <= 16.0));
        // da weights integrate da/|a| over both signs to 2 ln(a_max/a_min).
        let log_len: f64 = s.a.nodes.iter().zip(&s.a.weights).map(|(a, w)| w / a.abs()).sum();
        assert!((log_len - 2.0 * (16.0f64 / 0.05).ln()).abs() < 1e-12);
        let k = &s.kappa1.nodes;
        assert!((k[0] + k[k.len() - 1]).abs() < 1e-12);
    }

    #[test]
    fn coords_follow_canonical_order() {
        let grid = Grid3D::centered(2.0, 4, 2.0, 4).unwrap();
        let spec = SamplingSpec {
            n_mu: 2,
            n_phi: 2,
            n_a: 1,
            negative_a: false,
            kappa_stride: 2,
            b_stride: 2,
            ..Default::default()
        };
        let s = spec.resolve(&grid).unwrap();
        let c = s.coords();
        assert_eq!(c.len(), s.len());
        assert_eq!(c[0].b, s.b.nodes[0]);
        assert_eq!(c[1].b, s.b.nodes[1]);
        assert_eq!(c[s.lattice_count()].phi, s.phi.nodes[1]);
        let w: f64 = (0..s.lattice_count()).map(|l| s.lattice_weight(l)).sum();
        let want: f64 = s.kappa1.weights.iter().sum::<f64>()
            * s.kappa2.weights.iter().sum::<f64>()
            * s.b.weights.iter().sum::<f64>();
        assert!((w - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_ranges() {
        let grid = Grid3D::centered(2.0, 4, 2.0, 4).unwrap();
        let spec = SamplingSpec {
            a_min: 0.0,
            ..Default::default()
        };
        assert!(spec.resolve(&grid).is_err());
    }
}
