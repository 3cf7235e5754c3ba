//! Numerical checks of completeness, orthogonality and the eigen-relations of
//! the truncated states, plus normalizable smeared `|eta>` states.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::states::{ecs_amplitudes, eta_amplitudes};
use super::{ladder_ops, FockOperator, FockQuadrature, FockSpace, FockVector};
use crate::error::{Result, SdwtError};
use crate::model::C64;
use crate::quadrature::hermite_plain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Largest `|M - I|` over the block.
    pub max_deviation: f64,
    pub max_diagonal_deviation: f64,
    /// The `<00|M|10>` entry.
    pub entry_00_10: C64,
    pub block_size: usize,
}

/// Forms `int dx/sqrt(pi) int d^2alpha/(2 pi) |alpha, x><alpha, x|` on the
/// block `n1 + n2 <= max_total`. The integrand is a polynomial times
/// `exp(-x^2 - |alpha|^2/2)`, so the Gauss–Hermite rule is matched to that weight.
pub fn resolution_identity_check(space: FockSpace, quad: &FockQuadrature, max_total: usize) -> Result<IdentityCheck> {
    if max_total > space.cutoff() {
        return Err(SdwtError::InvalidGrid("identity block exceeds the cutoff".into()));
    }
    // c_alpha = 1/2 and c_x = 1 in the envelope of |<n|alpha, x>|^2.
    let (r1, r2, rx) = quad.rules(C64::new(0.0, 0.0), 0.5, 0.0, 1.0)?;
    let block = space.low_block(max_total);
    let nb = block.len();
    let norm = 1.0 / (PI.sqrt() * 2.0 * PI);
    let parts: Vec<Array2<C64>> = (0..r1.len())
        .into_par_iter()
        .map(|i| {
            let mut m = Array2::<C64>::zeros((nb, nb));
            for (a2, w2) in r2.nodes.iter().zip(&r2.weights) {
                for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
                    let v = ecs_amplitudes(C64::new(r1.nodes[i], *a2), *x, space);
                    let w = r1.weights[i] * w2 * wx * norm;
                    let amps: Vec<C64> = block.iter().map(|&k| v.amplitudes[k]).collect();
                    for (p, ap) in amps.iter().enumerate() {
                        for (q, aq) in amps.iter().enumerate() {
                            m[[p, q]] += ap * aq.conj() * w;
                        }
                    }
                }
            }
            m
        })
        .collect();
    let mut total = Array2::<C64>::zeros((nb, nb));
    for p in parts {
        total += &p;
    }
    let mut max_dev = 0.0f64;
    let mut diag = 0.0f64;
    for p in 0..nb {
        for q in 0..nb {
            let want = if p == q { 1.0 } else { 0.0 };
            let d = (total[[p, q]] - want).norm();
            max_dev = max_dev.max(d);
            if p == q {
                diag = diag.max(d);
            }
        }
    }
    let i00 = block
        .iter()
        .position(|&k| k == space.index(0, 0))
        .expect("vacuum in block");
    let i10 = block
        .iter()
        .position(|&k| k == space.index(1, 0))
        .expect("|10> in block");
    Ok(IdentityCheck {
        max_deviation: max_dev,
        max_diagonal_deviation: diag,
        entry_00_10: total[[i00, i10]],
        block_size: nb,
    })
}

/// Rectangle rule over `[-10, 10]` for the `x'` smearing integral.
const SMEAR_NODES: usize = 801;
const SMEAR_HALF_WIDTH: f64 = 10.0;

/// Returns `(int dx' f(x') <alpha', x'|alpha, x>, sqrt(pi) exp[-(|alpha|^2 + |alpha'|^2)/4 + alpha alpha'*/2] f(x))`,
/// the first from truncated vectors. Smearing `<alpha', x'|` with a smooth
/// test function gives a normalizable bra, so the truncated sum converges.
pub fn smeared_orthogonality_check(
    alpha: C64,
    alpha_p: C64,
    x: f64,
    f: impl Fn(f64) -> f64 + Sync,
    space: FockSpace,
) -> Result<(C64, C64)> {
    let ket = super::ecs_vector(alpha, x, space)?;
    let h = 2.0 * SMEAR_HALF_WIDTH / (SMEAR_NODES - 1) as f64;
    let parts: Vec<FockVector> = (0..SMEAR_NODES)
        .into_par_iter()
        .map(|k| {
            let xp = -SMEAR_HALF_WIDTH + k as f64 * h;
            ecs_amplitudes(alpha_p, xp, space).scale(C64::new(f(xp) * h, 0.0))
        })
        .collect();
    let mut bra = FockVector::zeros(space);
    for p in &parts {
        bra = bra.add(p);
    }
    let fock = bra.inner(&ket);
    let closed =
        PI.sqrt() * (-(alpha.norm_sqr() + alpha_p.norm_sqr()) / 4.0 + alpha * alpha_p.conj() / 2.0).exp() * f(x);
    Ok((fock, closed))
}

/// `int d^2eta exp(-|eta - eta0|^2 / (2 sigma^2)) |eta>` by Gauss–Hermite
/// quadrature: a normalizable two-mode Gaussian state.
pub fn smeared_eta_state(eta0: C64, sigma: f64, space: FockSpace, nodes: usize) -> Result<FockVector> {
    if !(sigma > 0.0) {
        return Err(SdwtError::InvalidGrid(format!(
            "smearing width {sigma} must be positive"
        )));
    }
    let r1 = hermite_plain(nodes, eta0.re, sigma);
    let r2 = hermite_plain(nodes, eta0.im, sigma);
    let rows: Vec<FockVector> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            let mut acc = FockVector::zeros(space);
            for (e2, w2) in r2.nodes.iter().zip(&r2.weights) {
                let e = C64::new(r1.nodes[i], *e2);
                let g = (-(e - eta0).norm_sqr() / (2.0 * sigma * sigma)).exp();
                acc = acc.add(&eta_amplitudes(e, space).scale(C64::new(g * r1.weights[i] * w2, 0.0)));
            }
            acc
        })
        .collect();
    let mut out = FockVector::zeros(space);
    for r in &rows {
        out = out.add(r);
    }
    Ok(out)
}

/// Residuals of `(a1 - a2)|alpha, x> = alpha |alpha, x>` and
/// `(X1 + X2)/2 |alpha, x> = x/sqrt(2) |alpha, x>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResiduals {
    /// Largest `|<probe|(A - lambda)|alpha, x>|` over normalized coherent probes.
    pub weak_difference: f64,
    pub weak_coordinate: f64,
    /// Largest residual entry on rows with `n1, n2 < N`.
    pub interior_difference: f64,
    pub interior_coordinate: f64,
}

/// Coherent probe labels used for the weak residuals.
const PROBES: [(f64, f64, f64, f64); 4] = [
    (0.0, 0.0, 0.0, 0.0),
    (0.5, -0.3, 0.2, 0.4),
    (-0.4, 0.6, -0.5, 0.1),
    (0.8, 0.0, 0.0, -0.8),
];

fn coherent(b1: C64, b2: C64, space: FockSpace) -> FockVector {
    let n = space.cutoff();
    let mut v = FockVector::zeros(space);
    let c = (-(b1.norm_sqr() + b2.norm_sqr()) / 2.0).exp();
    let mut f1 = vec![C64::new(c, 0.0); n + 1];
    let mut f2 = vec![C64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        f1[k] = f1[k - 1] * b1 / (k as f64).sqrt();
        f2[k] = f2[k - 1] * b2 / (k as f64).sqrt();
    }
    for (i, x1) in f1.iter().enumerate() {
        for (j, x2) in f2.iter().enumerate() {
            v.amplitudes[space.index(i, j)] = x1 * x2;
        }
    }
    v
}

pub fn eigen_residuals(alpha: C64, x: f64, space: FockSpace) -> Result<EigenResiduals> {
    let v = super::ecs_vector(alpha, x, space)?;
    let l = ladder_ops(space);
    let diff = l.a1.add(&l.a2.scale(C64::new(-1.0, 0.0)));
    let coord = l.x1.add(&l.x2).scale(C64::new(0.5, 0.0));
    let res = |op: &FockOperator, lambda: C64| {
        let w = op.apply(&v);
        FockVector {
            space,
            amplitudes: &w.amplitudes - &(&v.amplitudes * lambda),
        }
    };
    let rd = res(&diff, alpha);
    let rc = res(&coord, C64::new(x * std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let weak = |r: &FockVector| {
        PROBES
            .iter()
            .map(|&(a, b, c, d)| coherent(C64::new(a, b), C64::new(c, d), space).inner(r).norm())
            .fold(0.0, f64::max)
    };
    let n = space.cutoff();
    let interior = |r: &FockVector| {
        (0..space.dim())
            .filter(|&i| {
                let (a, b) = space.pair(i);
                a < n && b < n
            })
            .map(|i| r.amplitudes[i].norm())
            .fold(0.0, f64::max)
    };
    Ok(EigenResiduals {
        weak_difference: weak(&rd),
        weak_coordinate: weak(&rc),
        interior_difference: interior(&rd),
        interior_coordinate: interior(&rc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completeness_on_low_block() {
        let sp = FockSpace::new(16).unwrap();
        let quad = FockQuadrature {
            nodes: 24,
            ..Default::default()
        };
        let c = resolution_identity_check(sp, &quad, 4).unwrap();
        assert_eq!(c.block_size, 15);
        assert!(c.max_deviation < 1e-10, "{c:?}");
        assert!(c.entry_00_10.norm() < 1e-12);
    }

    #[test]
    fn completeness_rejects_small_radius() {
        let sp = FockSpace::new(4).unwrap();
        let quad = FockQuadrature {
            nodes: 4,
            ..Default::default()
        };
        assert!(matches!(
            resolution_identity_check(sp, &quad, 2),
            Err(SdwtError::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn smeared_orthogonality() {
        let sp = FockSpace::new(24).unwrap();
        let gauss = |x: f64| (-(x - 0.2) * (x - 0.2)).exp();
        let (a, b) = smeared_orthogonality_check(C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.3, gauss, sp).unwrap();
        assert!((a / b - 1.0).norm() < 0.02, "{a} vs {b}");
        let (a, b) = smeared_orthogonality_check(C64::new(0.4, 0.2), C64::new(0.1, -0.3), -0.2, gauss, sp).unwrap();
        assert!((a / b - 1.0).norm() < 0.02, "{a} vs {b}");
        let (a, b) = smeared_orthogonality_check(C64::new(0.4, 0.2), C64::new(0.4, 0.2), 0.1, |_| 0.0, sp).unwrap();
        assert_eq!((a, b), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        // At alpha' = alpha the Gaussian prefactor cancels.
        let al = C64::new(0.7, 0.0);
        let (_, b) = smeared_orthogonality_check(al, al, 0.3, gauss, sp).unwrap();
        assert!((b.re - PI.sqrt() * gauss(0.3)).abs() < 1e-14 && b.im.abs() < 1e-14);
    }

    #[test]
    fn eigen_residuals_shrink_with_cutoff() {
        let mut prev = f64::INFINITY;
        for n in [12, 18, 24] {
            let r = eigen_residuals(C64::new(0.6, -0.5), 0.7, FockSpace::new(n).unwrap()).unwrap();
            let worst = r.weak_difference.max(r.weak_coordinate);
            assert!(worst < prev, "N={n}: {worst} !< {prev}");
            assert!(r.interior_difference < 1e-12 && r.interior_coordinate < 1e-12);
            prev = worst;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn unit_width_smeared_eta_is_vacuum() {
        // With sigma = 1 and eta0 = 0 the smeared state is (pi/c) times |00>, c = 1.
        let sp = FockSpace::new(6).unwrap();
        let v = smeared_eta_state(C64::new(0.0, 0.0), 1.0, sp, 40).unwrap();
        assert!((v.get(0, 0) - PI).norm() < 1e-10);
        let rest: f64 = (1..sp.dim()).map(|i| v.amplitudes[i].norm()).fold(0.0, f64::max);
        assert!(rest < 1e-10);
    }
}
