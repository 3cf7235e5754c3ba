//! Truncated two-mode Fock space: number basis with at most `N` photons per
//! mode, dense vectors and operators, and the states and operators of the
//! quantum form of the transform.

mod checks;
mod operator;
mod states;

pub use checks::{
    eigen_residuals, resolution_identity_check, smeared_eta_state, smeared_orthogonality_check, EigenResiduals,
    IdentityCheck,
};
pub use operator::{
    build_u_normal_ordered, build_u_quadrature, quantum_sdwt, u_matrix_element, FockQuadrature, FockWavelet,
    NormalOrderedGaussian,
};
pub(crate) use states::ecs_amplitudes;
pub use states::{
    ecs_vector, eta_ecs_overlap, eta_ecs_overlap_closed, eta_vector, fock_wavefunction, poisson_tail, EtaLabel,
    TAIL_LIMIT,
};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SdwtError};
use crate::model::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(SdwtError::InvalidGrid("Fock cutoff must be at least 1".into()));
        }
        Ok(FockSpace { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    /// Flat index of `|n1, n2>`; `n1` is the slow index.
    #[inline]
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 <= self.cutoff && n2 <= self.cutoff);
        n1 * (self.cutoff + 1) + n2
    }

    #[inline]
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        (idx / (self.cutoff + 1), idx % (self.cutoff + 1))
    }

    /// Flat indices with `n1 + n2 <= max_total`, in index order.
    pub fn low_block(&self, max_total: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (a, b) = self.pair(i);
                a + b <= max_total
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub space: FockSpace,
    pub amplitudes: Array1<C64>,
}

impl FockVector {
    pub fn new(space: FockSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(SdwtError::ShapeMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|v| !v.is_finite()) {
            return Err(SdwtError::NonFinite("Fock amplitudes".into()));
        }
        Ok(FockVector { space, amplitudes })
    }

    pub fn zeros(space: FockSpace) -> Self {
        FockVector {
            space,
            amplitudes: Array1::zeros(space.dim()),
        }
    }

    /// `|n1, n2>`.
    pub fn basis(space: FockSpace, n1: usize, n2: usize) -> Self {
        let mut v = Self::zeros(space);
        v.amplitudes[space.index(n1, n2)] = C64::new(1.0, 0.0);
        v
    }

    pub fn get(&self, n1: usize, n2: usize) -> C64 {
        self.amplitudes[self.space.index(n1, n2)]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        FockVector {
            space: self.space,
            amplitudes: &self.amplitudes * c,
        }
    }

    pub fn add(&self, other: &FockVector) -> Self {
        FockVector {
            space: self.space,
            amplitudes: &self.amplitudes + &other.amplitudes,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub space: FockSpace,
    pub matrix: Array2<C64>,
}

impl FockOperator {
    pub fn new(space: FockSpace, matrix: Array2<C64>) -> Result<Self> {
        if matrix.dim() != (space.dim(), space.dim()) {
            return Err(SdwtError::ShapeMismatch {
                expected: space.dim() * space.dim(),
                found: matrix.len(),
            });
        }
        Ok(FockOperator { space, matrix })
    }

    pub fn identity(space: FockSpace) -> Self {
        FockOperator {
            space,
            matrix: Array2::eye(space.dim()),
        }
    }

    pub fn zeros(space: FockSpace) -> Self {
        FockOperator {
            space,
            matrix: Array2::zeros((space.dim(), space.dim())),
        }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector {
            space: self.space,
            amplitudes: self.matrix.dot(&v.amplitudes),
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &FockOperator) -> Self {
        FockOperator {
            space: self.space,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn adjoint(&self) -> Self {
        FockOperator {
            space: self.space,
            matrix: self.matrix.t().mapv(|v| v.conj()),
        }
    }

    pub fn add(&self, other: &FockOperator) -> Self {
        FockOperator {
            space: self.space,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        FockOperator {
            space: self.space,
            matrix: &self.matrix * c,
        }
    }

    /// `<m1 m2| self |n1 n2>`.
    pub fn element(&self, m: (usize, usize), n: (usize, usize)) -> C64 {
        self.matrix[[self.space.index(m.0, m.1), self.space.index(n.0, n.1)]]
    }

    /// Largest entry of `|self - other|` on the block `n1 + n2 <= max_total`.
    pub fn block_deviation(&self, other: &FockOperator, max_total: usize) -> f64 {
        let block = self.space.low_block(max_total);
        let mut worst = 0.0f64;
        for &i in &block {
            for &j in &block {
                worst = worst.max((self.matrix[[i, j]] - other.matrix[[i, j]]).norm());
            }
        }
        worst
    }

    /// `exp(self)` for a nilpotent operator, summed until the power series
    /// terminates. Products of creation (or of annihilation) operators are
    /// nilpotent on the truncated space, and their truncated exponentials equal
    /// the truncation of the exact ones.
    pub fn exp_nilpotent(&self) -> Self {
        let mut out = Array2::<C64>::eye(self.space.dim());
        let mut term = out.clone();
        for k in 1..=2 * self.space.dim() {
            term = term.dot(&self.matrix) / C64::new(k as f64, 0.0);
            if term.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                break;
            }
            out += &term;
        }
        FockOperator {
            space: self.space,
            matrix: out,
        }
    }
}

/// Truncated ladder and coordinate operators of both modes.
#[derive(Clone, Debug)]
pub struct LadderOps {
    pub a1: FockOperator,
    pub a2: FockOperator,
    pub a1_dag: FockOperator,
    pub a2_dag: FockOperator,
    /// `(a1 + a1^dagger) / sqrt 2`.
    pub x1: FockOperator,
    pub x2: FockOperator,
}

pub fn ladder_ops(space: FockSpace) -> LadderOps {
    let n = space.cutoff();
    let mut a1 = FockOperator::zeros(space);
    let mut a2 = FockOperator::zeros(space);
    for n1 in 0..=n {
        for n2 in 0..=n {
            let col = space.index(n1, n2);
            if n1 > 0 {
                a1.matrix[[space.index(n1 - 1, n2), col]] = C64::new((n1 as f64).sqrt(), 0.0);
            }
            if n2 > 0 {
                a2.matrix[[space.index(n1, n2 - 1), col]] = C64::new((n2 as f64).sqrt(), 0.0);
            }
        }
    }
    let a1_dag = a1.adjoint();
    let a2_dag = a2.adjoint();
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let x1 = a1.add(&a1_dag).scale(r);
    let x2 = a2.add(&a2_dag).scale(r);
    LadderOps {
        a1,
        a2,
        a1_dag,
        a2_dag,
        x1,
        x2,
    }
}
