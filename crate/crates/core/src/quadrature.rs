//! Gauss rules and deterministic summation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::C64;

/// Nodes and weights of a 1D rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Affine map of a rule on [-1, 1] to [lo, hi].
    pub fn mapped(&self, lo: f64, hi: f64) -> Rule {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Rule {
            nodes: self.nodes.iter().map(|t| mid + half * t).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Gauss–Legendre rule with `n` points on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Hermite rule for weight `e^{-t^2}` on the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence.
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    // The loop fills descending positive nodes first; mirror into ascending order.
    let mut out_n = vec![0.0; n];
    let mut out_w = vec![0.0; n];
    for i in 0..m {
        out_n[n - 1 - i] = nodes[i];
        out_w[n - 1 - i] = weights[i];
        out_n[i] = -nodes[i];
        out_w[i] = weights[i];
    }
    Rule {
        nodes: out_n,
        weights: out_w,
    }
}

/// Gauss–Hermite rule rescaled to integrate `f(x)` against nothing, for
/// integrands enveloped by `exp(-(x - center)^2 / (2 sigma^2))`: the weight
/// function is folded into the returned weights.
pub fn hermite_plain(n: usize, center: f64, sigma: f64) -> Rule {
    let gh = gauss_hermite(n);
    let scale = std::f64::consts::SQRT_2 * sigma;
    Rule {
        nodes: gh.nodes.iter().map(|t| center + scale * t).collect(),
        weights: gh
            .nodes
            .iter()
            .zip(&gh.weights)
            .map(|(t, w)| w * scale * (t * t).exp())
            .collect(),
    }
}

/// Uniform midpoint rule with `n` cells on [lo, hi].
pub fn midpoint(n: usize, lo: f64, hi: f64) -> Rule {
    let h = (hi - lo) / n as f64;
    Rule {
        nodes: (0..n).map(|j| lo + (j as f64 + 0.5) * h).collect(),
        weights: vec![h; n],
    }
}

const PAIRWISE_BLOCK: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

pub fn pairwise_sum_c(xs: &[C64]) -> C64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum_c(l) + pairwise_sum_c(r)
    }
}

/// Chunk size used by [`par_sum_c`]. Fixed so the partition, and therefore
/// the rounding, does not depend on the thread count.
pub const PAR_CHUNK: usize = 256;

/// `sum_{i < n} f(i)` evaluated in parallel with a result that is bit-identical
/// for any number of threads.
pub fn par_sum_c<F>(n: usize, f: F) -> C64
where
    F: Fn(usize) -> C64 + Sync,
{
    let partials: Vec<C64> = (0..n.div_ceil(PAR_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * PAR_CHUNK;
            let hi = (lo + PAR_CHUNK).min(n);
            let terms: Vec<C64> = (lo..hi).map(&f).collect();
            pairwise_sum_c(&terms)
        })
        .collect();
    pairwise_sum_c(&partials)
}

/// Limit of a slowly converging sequence of partial sums by Wynn's epsilon
/// algorithm. Returns the last entry of the highest even column reached.
pub fn wynn_epsilon(partial_sums: &[C64]) -> C64 {
    let n = partial_sums.len();
    if n < 3 {
        return partial_sums.last().copied().unwrap_or_default();
    }
    let mut prev = vec![C64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<C64> = partial_sums.to_vec();
    let mut best = cur[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                // Exact stagnation: the sequence has converged at this column.
                return if col % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + d.inv());
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            best = cur[cur.len() - 1];
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...; twenty plain terms are only good to 2e-2.
        let mut acc = C64::new(0.0, 0.0);
        let sums: Vec<C64> = (1..=20)
            .map(|k| {
                acc += C64::new(if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64, 0.0);
                acc
            })
            .collect();
        assert!((wynn_epsilon(&sums).re - 2f64.ln()).abs() < 1e-12);
        // Geometric series with complex ratio is summed exactly after one step.
        let q = C64::new(0.5, 0.6);
        let mut acc = C64::new(0.0, 0.0);
        let sums: Vec<C64> = (0..6)
            .map(|k| {
                acc += q.powi(k);
                acc
            })
            .collect();
        assert!((wynn_epsilon(&sums) - 1.0 / (1.0 - q)).norm() < 1e-13);
        let flat = vec![C64::new(2.0, 0.0); 5];
        assert_eq!(wynn_epsilon(&flat), C64::new(2.0, 0.0));
    }

    #[test]
    fn legendre_integrates_polynomials() {
        for n in [1, 2, 5, 8, 16, 33] {
            let r = gauss_legendre(n);
            let total: f64 = r.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let got = r.integrate(|x| x.powi(deg as i32));
            assert!((got - exact).abs() < 1e-12, "n={n}");
            let even = 2 * n - 2;
            let got = r.integrate(|x| x.powi(even as i32));
            assert!((got - 2.0 / (even as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn hermite_moments() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for n in [1, 4, 10, 32, 48, 64] {
            let r = gauss_hermite(n);
            assert!((r.weights.iter().sum::<f64>() - sqrt_pi).abs() < 1e-12, "n={n}");
            let m2 = r.integrate(|x| x * x);
            if n >= 2 {
                assert!((m2 - sqrt_pi / 2.0).abs() < 1e-12, "n={n}");
            }
            if n >= 3 {
                assert!((r.integrate(|x| x.powi(4)) - 0.75 * sqrt_pi).abs() < 1e-11, "n={n}");
            }
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn hermite_plain_gaussian() {
        let r = hermite_plain(20, 0.7, 1.3);
        let got = r.integrate(|x| (-(x - 0.7f64).powi(2) / (2.0 * 1.3 * 1.3)).exp() * (1.0 + x));
        let want = (2.0 * std::f64::consts::PI).sqrt() * 1.3 * 1.7;
        assert!((got - want).abs() < 1e-11);
    }

    #[test]
    fn par_sum_is_thread_independent() {
        let f = |i: usize| C64::new((i as f64 * 0.37).sin(), 1.0 / (1.0 + i as f64));
        let run = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| par_sum_c(10_000, f))
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, run(8));
    }
}
