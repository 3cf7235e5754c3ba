//! The squeezing-type operator `U(s, r, kappa; a, b)`, by quadrature over the
//! entangled-coherent representation and in normal-ordered closed form.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::states::ecs_amplitudes;
use super::{ladder_ops, FockOperator, FockSpace, FockVector};
use crate::error::{Result, SdwtError};
use crate::model::{validate_symplectic, DilationParams, SymplecticParams, TransformPoint, C64};
use crate::quadrature::{gauss_hermite, hermite_plain, pairwise_sum_c, Rule};
use crate::wavelet::MotherWavelet;

/// Tensor Gauss–Hermite rule over `(alpha1, alpha2, x)`. Each axis is centred
/// and scaled to the Gaussian envelope of the integrand, so the smallest
/// envelope width times the outermost node is the effective radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FockQuadrature {
    pub nodes: usize,
    pub min_radius: f64,
}

impl Default for FockQuadrature {
    fn default() -> Self {
        FockQuadrature {
            nodes: 32,
            min_radius: 5.0,
        }
    }
}

impl FockQuadrature {
    /// Rules for an integrand enveloped by `exp(-c_alpha |alpha - alpha0|^2 - c_x (x - x0)^2)`.
    pub(crate) fn rules(&self, alpha0: C64, c_alpha: f64, x0: f64, c_x: f64) -> Result<(Rule, Rule, Rule)> {
        if self.nodes < 2 {
            return Err(SdwtError::InvalidGrid("Fock quadrature needs at least 2 nodes".into()));
        }
        let t_max = gauss_hermite(self.nodes).nodes.last().copied().unwrap_or(0.0);
        let sa = (0.5 / c_alpha).sqrt();
        let sx = (0.5 / c_x).sqrt();
        let radius = std::f64::consts::SQRT_2 * sa.min(sx) * t_max;
        if radius < self.min_radius {
            return Err(SdwtError::CutoffTooSmall {
                ratio: radius,
                limit: self.min_radius,
            });
        }
        Ok((
            hermite_plain(self.nodes, alpha0.re, sa),
            hermite_plain(self.nodes, alpha0.im, sa),
            hermite_plain(self.nodes, x0, sx),
        ))
    }
}

/// Real 2x2 matrix of `alpha -> s alpha - r alpha*` on `(alpha1, alpha2)`.
fn real_matrix(sym: &SymplecticParams) -> [[f64; 2]; 2] {
    let sm = sym.s() - sym.r();
    let sp = sym.s() + sym.r();
    [[sm.re, -sp.im], [sm.im, sp.re]]
}

/// Envelope of `|<.|S alpha, .>|^2`-weighted products: centre and slowest
/// decay rate of `|alpha + kappa|^2/4 + |S alpha|^2/4`.
fn alpha_envelope(sym: &SymplecticParams, kappa: C64) -> (C64, f64) {
    let t = real_matrix(sym);
    // M = T^T T; minimise |v + k|^2 + v^T M v.
    let m00 = t[0][0] * t[0][0] + t[1][0] * t[1][0];
    let m01 = t[0][0] * t[0][1] + t[1][0] * t[1][1];
    let m11 = t[0][1] * t[0][1] + t[1][1] * t[1][1];
    let (a, b, d) = (1.0 + m00, m01, 1.0 + m11);
    let det = a * d - b * b;
    let v1 = -(d * kappa.re - b * kappa.im) / det;
    let v2 = -(-b * kappa.re + a * kappa.im) / det;
    // Smallest eigenvalue of M is e^{-2 mu}.
    let tr = m00 + m11;
    let lam_min = 0.5 * (tr - ((m00 - m11).powi(2) + 4.0 * m01 * m01).sqrt());
    (C64::new(v1, v2), (1.0 + lam_min.max(0.0)) / 4.0)
}

/// Nodes `(alpha, x, weight)` for the operator integral at `tp`, with the
/// measure `dx/sqrt(pi) d^2alpha/(2 pi)` folded into the weights.
fn u_nodes(tp: &TransformPoint, quad: &FockQuadrature) -> Result<Vec<(C64, f64, f64)>> {
    let a = tp.dil.a();
    let b = tp.dil.b();
    let (alpha0, c_alpha) = alpha_envelope(&tp.sym, tp.tr.kappa);
    let c_x = 0.5 * (1.0 + 1.0 / (a * a));
    let x0 = b / (1.0 + a * a);
    let (r1, r2, rx) = quad.rules(alpha0, c_alpha, x0, c_x)?;
    let norm = 1.0 / (PI.sqrt() * 2.0 * PI);
    let mut out = Vec::with_capacity(r1.len() * r2.len() * rx.len());
    for (a1, w1) in r1.nodes.iter().zip(&r1.weights) {
        for (a2, w2) in r2.nodes.iter().zip(&r2.weights) {
            for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
                out.push((C64::new(*a1, *a2), *x, w1 * w2 * wx * norm));
            }
        }
    }
    Ok(out)
}

fn u_prefactor(tp: &TransformPoint) -> C64 {
    (tp.sym.s() / tp.dil.a().abs()).sqrt()
}

/// `U = sqrt(s/|a|) int dx/sqrt(pi) int d^2alpha/(2 pi) |s alpha - r alpha*, (x - b)/a><alpha + kappa, x|`
/// by tensor Gauss–Hermite quadrature. Amplitudes with `n1 + n2` small are
/// exact whatever the cutoff, since the recursion only looks downwards; the
/// low-excitation block of the result is therefore limited by quadrature only.
pub fn build_u_quadrature(tp: &TransformPoint, space: FockSpace, quad: &FockQuadrature) -> Result<FockOperator> {
    let nodes = u_nodes(tp, quad)?;
    let d = space.dim();
    let a = tp.dil.a();
    let b = tp.dil.b();
    let kappa = tp.tr.kappa;
    let nx = quad.nodes;
    // One chunk per (alpha1, alpha2) node: a rank-nx update as a matrix product.
    let chunks: Vec<Array2<C64>> = nodes
        .par_chunks(nx)
        .map(|chunk| {
            let mut left = Array2::<C64>::zeros((d, chunk.len()));
            let mut right = Array2::<C64>::zeros((chunk.len(), d));
            for (k, (alpha, x, w)) in chunk.iter().enumerate() {
                let out = ecs_amplitudes(tp.sym.apply(*alpha), (x - b) / a, space);
                let inn = ecs_amplitudes(alpha + kappa, *x, space);
                left.column_mut(k).assign(&(&out.amplitudes * C64::new(*w, 0.0)));
                right.row_mut(k).assign(&inn.amplitudes.mapv(|v| v.conj()));
            }
            left.dot(&right)
        })
        .collect();
    let mut total = tree_sum(chunks, d);
    total *= u_prefactor(tp);
    FockOperator::new(space, total)
}

/// Fixed-shape pairwise reduction; the order depends only on the input length.
fn tree_sum(mut parts: Vec<Array2<C64>>, d: usize) -> Array2<C64> {
    if parts.is_empty() {
        return Array2::zeros((d, d));
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().expect("non-empty")
}

/// `<bra| U |ket>` by the same quadrature, contracting the states at every
/// node instead of assembling the matrix.
pub fn u_matrix_element(bra: &FockVector, ket: &FockVector, tp: &TransformPoint, quad: &FockQuadrature) -> Result<C64> {
    let nodes = u_nodes(tp, quad)?;
    let a = tp.dil.a();
    let b = tp.dil.b();
    let space = bra.space;
    let terms: Vec<C64> = nodes
        .par_iter()
        .map(|(alpha, x, w)| {
            let out = ecs_amplitudes(tp.sym.apply(*alpha), (x - b) / a, space);
            let inn = ecs_amplitudes(alpha + tp.tr.kappa, *x, space);
            bra.inner(&out) * inn.inner(ket) * *w
        })
        .collect();
    Ok(pairwise_sum_c(&terms) * u_prefactor(tp))
}

/// The factors of the normal-ordered form
/// `U = sech^{1/2}(lambda)/sqrt(s*) exp[c+ (a1^dagger + a2^dagger)^2 + c- (a1^dagger - a2^dagger)^2] V exp[d+ (a1 + a2)^2 + d- (a1 - a2)^2]`
/// with `V = :exp[a^dagger (Lambda - I) a]:` and `e^lambda = a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalOrderedGaussian {
    pub lambda: f64,
    pub sech_lambda: f64,
    pub tanh_lambda: f64,
    pub big_lambda: [[C64; 2]; 2],
    /// Coefficients of `(a1^dagger + a2^dagger)^2` and `(a1^dagger - a2^dagger)^2`.
    pub creation: [C64; 2],
    /// Coefficients of `(a1 + a2)^2` and `(a1 - a2)^2`.
    pub annihilation: [C64; 2],
    pub prefactor: C64,
}

impl NormalOrderedGaussian {
    pub fn new(s: C64, r: C64, a: f64) -> Result<Self> {
        validate_symplectic(s, r)?;
        if !(a > 0.0) {
            return Err(SdwtError::NonPositiveDilation(a));
        }
        let dil = DilationParams::new(a, 0.0)?;
        let lambda = dil.lambda().expect("a > 0");
        let sech = dil.sech_lambda().expect("a > 0");
        let tanh = dil.tanh_lambda().expect("a > 0");
        let inv = 1.0 / s.conj();
        let p = (sech + inv) / 2.0;
        let m = (sech - inv) / 2.0;
        Ok(NormalOrderedGaussian {
            lambda,
            sech_lambda: sech,
            tanh_lambda: tanh,
            big_lambda: [[p, m], [m, p]],
            creation: [C64::new(-tanh / 4.0, 0.0), -r / (4.0 * s.conj())],
            annihilation: [C64::new(tanh / 4.0, 0.0), r.conj() / (4.0 * s.conj())],
            prefactor: C64::new(sech.sqrt(), 0.0) / s.conj().sqrt(),
        })
    }

    /// Matrix of `:exp[a^dagger (Lambda - I) a]:`. On `|n1, n2>` it acts as
    /// `(L11 a1^dagger + L21 a2^dagger)^n1 (L12 a1^dagger + L22 a2^dagger)^n2 |00> / sqrt(n1! n2!)`,
    /// which conserves the total excitation.
    pub fn v_operator(&self, space: FockSpace) -> FockOperator {
        let n = space.cutoff();
        let l = &self.big_lambda;
        let sqrt_fact: Vec<f64> = {
            let mut v = vec![1.0f64; 2 * n + 2];
            for k in 1..v.len() {
                v[k] = v[k - 1] * (k as f64).sqrt();
            }
            v
        };
        let binom = |n: usize, k: usize| -> f64 { (sqrt_fact[n] / (sqrt_fact[k] * sqrt_fact[n - k])).powi(2) };
        let mut v = FockOperator::zeros(space);
        for n1 in 0..=n {
            for n2 in 0..=n {
                let col = space.index(n1, n2);
                for k in 0..=n1 {
                    let c1 = binom(n1, k) * l[0][0].powi(k as i32) * l[1][0].powi((n1 - k) as i32);
                    for j in 0..=n2 {
                        let m1 = k + j;
                        let m2 = n1 + n2 - m1;
                        if m1 > n || m2 > n {
                            continue;
                        }
                        let c2 = binom(n2, j) * l[0][1].powi(j as i32) * l[1][1].powi((n2 - j) as i32);
                        let norm = sqrt_fact[m1] * sqrt_fact[m2] / (sqrt_fact[n1] * sqrt_fact[n2]);
                        v.matrix[[space.index(m1, m2), col]] += c1 * c2 * norm;
                    }
                }
            }
        }
        v
    }

    /// The operator as a product of three truncated matrices. Creation-only
    /// and annihilation-only exponentials and the number-conserving `V` all
    /// truncate exactly, so the product is the exact truncation of `U`.
    pub fn to_operator(&self, space: FockSpace) -> FockOperator {
        let l = ladder_ops(space);
        let plus_dag = l.a1_dag.add(&l.a2_dag);
        let minus_dag = l.a1_dag.add(&l.a2_dag.scale(C64::new(-1.0, 0.0)));
        let plus = l.a1.add(&l.a2);
        let minus = l.a1.add(&l.a2.scale(C64::new(-1.0, 0.0)));
        let ec = plus_dag
            .compose(&plus_dag)
            .scale(self.creation[0])
            .add(&minus_dag.compose(&minus_dag).scale(self.creation[1]))
            .exp_nilpotent();
        let ea = plus
            .compose(&plus)
            .scale(self.annihilation[0])
            .add(&minus.compose(&minus).scale(self.annihilation[1]))
            .exp_nilpotent();
        ec.compose(&self.v_operator(space)).compose(&ea).scale(self.prefactor)
    }
}

/// Normal-ordered closed form of `U(s, r, 0; a, 0)`.
pub fn build_u_normal_ordered(s: C64, r: C64, a: f64, space: FockSpace) -> Result<FockOperator> {
    Ok(NormalOrderedGaussian::new(s, r, a)?.to_operator(space))
}

/// `<psi| U(s, r, kappa; a, b) |g>` with `U` assembled by quadrature.
pub fn quantum_sdwt(psi: &FockVector, g: &FockVector, tp: &TransformPoint, quad: &FockQuadrature) -> Result<C64> {
    if psi.space != g.space {
        return Err(SdwtError::ShapeMismatch {
            expected: psi.space.dim(),
            found: g.space.dim(),
        });
    }
    let u = build_u_quadrature(tp, g.space, quad)?;
    Ok(psi.inner(&u.apply(g)))
}

/// The wavefunction `<w, x'|psi>` of a Fock state, as a mother wavelet.
/// States supported inside the truncated space have exact wavefunctions.
#[derive(Clone, Debug)]
pub struct FockWavelet {
    pub state: FockVector,
}

impl MotherWavelet for FockWavelet {
    fn eval(&self, w: C64, xp: f64) -> C64 {
        ecs_amplitudes(w, xp, self.state.space).inner(&self.state)
    }

    fn name(&self) -> String {
        "fock-state".into()
    }
}
