//! The entangled-coherent states `|alpha, x>` and the EPR states `|eta>`.
//!
//! Both are exponentials of creation operators acting on `|00>`, so their
//! amplitudes follow from the generating function by a three-term recursion.
//! Neither state is normalizable: each is infinitely squeezed in one
//! collective mode, and the truncated vector is exact entry by entry but its
//! tail decays only algebraically.

use serde::{Deserialize, Serialize};

use super::{FockSpace, FockVector};
use crate::error::{Result, SdwtError};
use crate::model::C64;
use crate::quadrature::wynn_epsilon;

/// Largest tolerated displacement tail beyond the cutoff.
pub const TAIL_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaLabel {
    pub eta1: f64,
    pub eta2: f64,
}

impl EtaLabel {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        if !(eta1.is_finite() && eta2.is_finite()) {
            return Err(SdwtError::NonFinite("eta label".into()));
        }
        Ok(EtaLabel { eta1, eta2 })
    }

    pub fn value(&self) -> C64 {
        C64::new(self.eta1, self.eta2)
    }
}

/// `P(K > n)` for `K ~ Poisson(lambda)`.
pub fn poisson_tail(lambda: f64, n: usize) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    // Sum the tail directly: the complement 1 - CDF cancels badly.
    let mut term = (-lambda).exp();
    for k in 1..=n + 1 {
        term *= lambda / k as f64;
    }
    let mut tail = 0.0;
    let mut k = n + 1;
    while term > 1e-18 * tail || k < n + 1 + lambda as usize {
        tail += term;
        k += 1;
        term *= lambda / k as f64;
        if k > n + 10_000 {
            break;
        }
    }
    tail
}

fn check_tail(lambda: f64, space: FockSpace) -> Result<()> {
    let tail = poisson_tail(lambda, space.cutoff());
    if tail > TAIL_LIMIT {
        return Err(SdwtError::TruncationOverflow {
            tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(())
}

/// Amplitudes of `exp(c00 + u a1^dagger + v a2^dagger + q (a1^dagger + a2^dagger)^2 + t a1^dagger a2^dagger)|00>`
/// with `q` and `t` real, from the recursions of the generating function.
fn gaussian_creation_state(space: FockSpace, c00: C64, u: C64, v: C64, q: f64, t: f64) -> FockVector {
    let n = space.cutoff();
    let mut amp = FockVector::zeros(space);
    let sq: Vec<f64> = (0..=n + 1).map(|k| (k as f64).sqrt()).collect();
    let at = |a: &FockVector, i: usize, j: usize| a.amplitudes[space.index(i, j)];
    amp.amplitudes[0] = c00;
    // d/dt1 of the generating function: u + 2q(t1 + t2) + t t2.
    // Column n1 = 0 from the t2-derivative: v + 2q(t1 + t2) + t t1.
    for n2 in 0..n {
        let mut c = v * at(&amp, 0, n2);
        if n2 > 0 {
            c += 2.0 * q * sq[n2] * at(&amp, 0, n2 - 1);
        }
        amp.amplitudes[space.index(0, n2 + 1)] = c / sq[n2 + 1];
    }
    for n2 in 0..=n {
        for n1 in 0..n {
            let mut c = u * at(&amp, n1, n2);
            if n1 > 0 {
                c += 2.0 * q * sq[n1] * at(&amp, n1 - 1, n2);
            }
            if n2 > 0 {
                c += (2.0 * q + t) * sq[n2] * at(&amp, n1, n2 - 1);
            }
            amp.amplitudes[space.index(n1 + 1, n2)] = c / sq[n1 + 1];
        }
    }
    amp
}

pub(crate) fn ecs_amplitudes(alpha: C64, x: f64, space: FockSpace) -> FockVector {
    let c00 = C64::new((-0.5 * x * x - 0.25 * alpha.norm_sqr()).exp(), 0.0);
    gaussian_creation_state(space, c00, x + alpha / 2.0, x - alpha / 2.0, -0.25, 0.0)
}

pub(crate) fn eta_amplitudes(eta: C64, space: FockSpace) -> FockVector {
    let c00 = C64::new((-0.5 * eta.norm_sqr()).exp(), 0.0);
    gaussian_creation_state(space, c00, eta, -eta.conj(), 0.0, 1.0)
}

fn ecs_lambda(alpha: C64, x: f64) -> f64 {
    let u = x + alpha / 2.0;
    let v = x - alpha / 2.0;
    u.norm_sqr().max(v.norm_sqr())
}

/// `|alpha, x> = exp[-x^2/2 - |alpha|^2/4 + (x + alpha/2) a1^dagger + (x - alpha/2) a2^dagger - (a1^dagger + a2^dagger)^2/4] |00>`.
pub fn ecs_vector(alpha: C64, x: f64, space: FockSpace) -> Result<FockVector> {
    if !(alpha.is_finite() && x.is_finite()) {
        return Err(SdwtError::NonFinite("state label".into()));
    }
    check_tail(ecs_lambda(alpha, x), space)?;
    Ok(ecs_amplitudes(alpha, x, space))
}

/// `|eta> = exp[-|eta|^2/2 + eta a1^dagger - eta* a2^dagger + a1^dagger a2^dagger] |00>`.
pub fn eta_vector(eta: EtaLabel, space: FockSpace) -> Result<FockVector> {
    let e = EtaLabel::new(eta.eta1, eta.eta2)?.value();
    check_tail(e.norm_sqr(), space)?;
    Ok(eta_amplitudes(e, space))
}

/// `g(alpha, x) = <alpha, x|g>`.
pub fn fock_wavefunction(state: &FockVector, alpha: C64, x: f64) -> Result<C64> {
    Ok(ecs_vector(alpha, x, state.space)?.inner(state))
}

/// `<eta|alpha, x>` from the truncated vectors. The plain sum converges only
/// conditionally, so partial sums over shells of fixed total excitation
/// (complete up to the cutoff) are extrapolated with Wynn's epsilon algorithm.
/// Shells that vanish identically are skipped.
pub fn eta_ecs_overlap(eta: EtaLabel, alpha: C64, x: f64, space: FockSpace) -> Result<C64> {
    let e = eta_vector(eta, space)?;
    let g = ecs_vector(alpha, x, space)?;
    let n = space.cutoff();
    let mut sums = Vec::with_capacity(n + 1);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=n {
        let shell: C64 = (0..=k).map(|n1| e.get(n1, k - n1).conj() * g.get(n1, k - n1)).sum();
        acc += shell;
        if k == 0 || shell.norm() > 1e-13 * acc.norm().max(1.0) {
            sums.push(acc);
        }
    }
    Ok(wynn_epsilon(&sums))
}

/// `(1/sqrt 2) exp[-(alpha^2 + |alpha|^2)/4 - eta1^2/2 + eta1 alpha - i eta2 x]`.
pub fn eta_ecs_overlap_closed(eta: EtaLabel, alpha: C64, x: f64) -> C64 {
    (-(alpha * alpha + alpha.norm_sqr()) / 4.0 - 0.5 * eta.eta1 * eta.eta1 + eta.eta1 * alpha
        - C64::new(0.0, eta.eta2 * x))
    .exp()
        * std::f64::consts::FRAC_1_SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ladder_ops;
    use proptest::prelude::*;

    /// Amplitudes by brute-force expansion of the exponential in powers of
    /// the creation operators, as polynomial coefficients.
    fn brute_ecs(alpha: C64, x: f64, n: usize) -> Vec<Vec<C64>> {
        // exp(u t1 + v t2 - (t1 + t2)^2 / 4) as a bivariate Taylor series.
        let u = x + alpha / 2.0;
        let v = x - alpha / 2.0;
        let m = n + 1;
        let mut exponent = vec![vec![C64::new(0.0, 0.0); m]; m];
        exponent[1][0] = u;
        exponent[0][1] = v;
        exponent[2][0] = C64::new(-0.25, 0.0);
        exponent[1][1] = C64::new(-0.5, 0.0);
        exponent[0][2] = C64::new(-0.25, 0.0);
        let mul = |a: &Vec<Vec<C64>>, b: &Vec<Vec<C64>>| {
            let mut c = vec![vec![C64::new(0.0, 0.0); m]; m];
            for i in 0..m {
                for j in 0..m {
                    for k in 0..=i {
                        for l in 0..=j {
                            c[i][j] += a[k][l] * b[i - k][j - l];
                        }
                    }
                }
            }
            c
        };
        let mut total = vec![vec![C64::new(0.0, 0.0); m]; m];
        total[0][0] = C64::new(1.0, 0.0);
        let mut power = total.clone();
        for k in 1..=2 * n {
            power = mul(&power, &exponent);
            for i in 0..m {
                for j in 0..m {
                    total[i][j] += power[i][j] / (1..=k).map(|v| v as f64).product::<f64>();
                }
            }
        }
        let c00 = (-0.5 * x * x - 0.25 * alpha.norm_sqr()).exp();
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        (0..m)
            .map(|i| (0..m).map(|j| total[i][j] * c00 * (fact(i) * fact(j)).sqrt()).collect())
            .collect()
    }

    #[test]
    fn ecs_recursion_matches_series_expansion() {
        let sp = FockSpace::new(6).unwrap();
        let (alpha, x) = (C64::new(0.4, -0.3), 0.25);
        let v = ecs_vector(alpha, x, sp).unwrap();
        let b = brute_ecs(alpha, x, 6);
        for (n1, row) in b.iter().enumerate() {
            for (n2, want) in row.iter().enumerate() {
                assert!((v.get(n1, n2) - want).norm() < 1e-13, "{n1},{n2}");
            }
        }
    }

    #[test]
    fn eta_zero_is_the_diagonal_sum() {
        let sp = FockSpace::new(8).unwrap();
        let v = eta_vector(EtaLabel::new(0.0, 0.0).unwrap(), sp).unwrap();
        for n1 in 0..=8 {
            for n2 in 0..=8 {
                let want = if n1 == n2 { 1.0 } else { 0.0 };
                assert!((v.get(n1, n2) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn eta_is_an_epr_eigenvector() {
        let sp = FockSpace::new(16).unwrap();
        let l = ladder_ops(sp);
        let eta = EtaLabel::new(0.6, -0.4).unwrap();
        let v = eta_vector(eta, sp).unwrap();
        let op = l.a1.add(&l.a2_dag.scale(C64::new(-1.0, 0.0)));
        let w = op.apply(&v);
        // Rows that involve amplitudes beyond the cutoff are not comparable.
        for n1 in 0..16 {
            for n2 in 1..=16 {
                let i = sp.index(n1, n2);
                assert!((w.amplitudes[i] - eta.value() * v.amplitudes[i]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn tail_check_rejects_large_labels() {
        let sp = FockSpace::new(12).unwrap();
        assert!(ecs_vector(C64::new(0.5, 0.5), 0.5, sp).is_ok());
        assert!(matches!(
            ecs_vector(C64::new(3.0, 0.0), 3.0, sp),
            Err(SdwtError::TruncationOverflow { .. })
        ));
        assert!(matches!(
            eta_vector(EtaLabel::new(3.0, 2.0).unwrap(), sp),
            Err(SdwtError::TruncationOverflow { .. })
        ));
        assert!(poisson_tail(0.0, 3) == 0.0);
        // P(K > 0) = 1 - e^{-lambda}.
        assert!((poisson_tail(0.7, 0) - (1.0 - (-0.7f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn overlap_matches_closed_form() {
        let sp = FockSpace::new(24).unwrap();
        for &(e1, e2, a, x) in &[
            (0.3, 0.2, C64::new(0.5, -0.4), 0.7),
            (0.0, -1.0, C64::new(0.5, 0.3), 0.0),
            (0.0, 0.0, C64::new(-0.7, 0.7), 1.0),
            (-1.0, 1.0, C64::new(1.0, 0.0), -0.5),
        ] {
            let eta = EtaLabel::new(e1, e2).unwrap();
            let got = eta_ecs_overlap(eta, a, x, sp).unwrap();
            let want = eta_ecs_overlap_closed(eta, a, x);
            assert!((got - want).norm() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn wavefunction_definition_and_linearity() {
        let sp = FockSpace::new(10).unwrap();
        let vac = FockVector::basis(sp, 0, 0);
        let e = ecs_vector(C64::new(0.0, 0.0), 0.0, sp).unwrap();
        assert_eq!(
            fock_wavefunction(&vac, C64::new(0.0, 0.0), 0.0).unwrap(),
            e.get(0, 0).conj()
        );
        let g1 = FockVector::basis(sp, 1, 2).scale(C64::new(0.3, 0.1));
        let g2 = FockVector::basis(sp, 0, 1).scale(C64::new(-0.2, 0.5));
        let (al, x) = (C64::new(0.2, -0.6), 0.4);
        let lhs = fock_wavefunction(&g1.add(&g2), al, x).unwrap();
        let rhs = fock_wavefunction(&g1, al, x).unwrap() + fock_wavefunction(&g2, al, x).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn eta_from_recursion_matches_closed_amplitudes(e1 in -1.0f64..1.0, e2 in -1.0f64..1.0) {
            // <n1, n2|eta> = e^{-|eta|^2/2} sum_k eta^{n1-k} (-eta*)^{n2-k} sqrt(n1! n2!) / ((n1-k)! (n2-k)!).
            let sp = FockSpace::new(7).unwrap();
            let eta = C64::new(e1, e2);
            let v = eta_amplitudes(eta, sp);
            let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
            for n1 in 0..=7 {
                for n2 in 0..=7 {
                    let mut want = C64::new(0.0, 0.0);
                    for k in 0..=n1.min(n2) {
                        want += eta.powi((n1 - k) as i32) * (-eta.conj()).powi((n2 - k) as i32)
                            * ((fact(n1) * fact(n2)).sqrt() / (fact(n1 - k) * fact(n2 - k) * fact(k)));
                    }
                    want *= (-0.5 * eta.norm_sqr()).exp();
                    prop_assert!((v.get(n1, n2) - want).norm() < 1e-11 * (1.0 + want.norm()));
                }
            }
        }
    }
}
