use super::{von_neumann_entropy, CMatrix, CqChannel, DensityMatrix, Distribution};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Block-diagonal classical-quantum state `Σ P(x)|x⟩⟨x| ⊗ W_x`.
#[derive(Clone, Debug)]
pub struct JointCqState<T: Real> {
    weights: Distribution<T>,
    states: Vec<DensityMatrix<T>>,
}

pub fn joint_state<T: Real>(w: &CqChannel<T>, p: &Distribution<T>) -> Result<JointCqState<T>> {
    Error::check_dim(w.len(), p.len())?;
    Ok(JointCqState {
        weights: p.clone(),
        states: w.states().to_vec(),
    })
}

impl<T: Real> JointCqState<T> {
    pub fn weights(&self) -> &Distribution<T> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Unnormalized block `P(x) W_x`.
    pub fn block(&self, x: usize) -> CMatrix<T> {
        let w = C::new(self.weights.get(x), T::zero());
        self.states[x].matrix().map(|z| z * w)
    }

    /// Dense `(|X|·dim)`-dimensional representation.
    pub fn to_matrix(&self) -> CMatrix<T> {
        let d = self.dim();
        let k = self.len();
        let mut m = CMatrix::zeros(k * d, k * d);
        for x in 0..k {
            m.view_mut((x * d, x * d), (d, d)).copy_from(&self.block(x));
        }
        m
    }

    /// Reduced state on the quantum system.
    pub fn marginal(&self) -> DensityMatrix<T> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for x in 0..self.len() {
            m += self.block(x);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// `H(XY) = H(P) + Σ P(x) S(W_x)`.
    pub fn entropy(&self) -> T {
        let mut h = self.weights.entropy();
        for (s, &p) in self.states.iter().zip(self.weights.probs()) {
            if p > T::zero() {
                h += p * von_neumann_entropy(s);
            }
        }
        h
    }
}
