use std::collections::HashSet;

use super::{CMatrix, DensityMatrix, Distribution};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Classical-quantum channel: one output state per input letter.
#[derive(Clone, Debug, PartialEq)]
pub struct CqChannel<T: Real> {
    labels: Vec<String>,
    states: Vec<DensityMatrix<T>>,
}

impl<T: Real> CqChannel<T> {
    pub fn new(labels: Vec<String>, states: Vec<DensityMatrix<T>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::validation("channel alphabet is empty"));
        }
        Error::check_dim(states.len(), labels.len())?;
        let dim = states[0].dim();
        for s in &states {
            Error::check_dim(dim, s.dim())?;
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::validation(format!("duplicate letter label {l:?}")));
            }
        }
        Ok(CqChannel { labels, states })
    }

    /// Letters labelled `0, 1, ...`.
    pub fn from_states(states: Vec<DensityMatrix<T>>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| i.to_string()).collect();
        Self::new(labels, states)
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

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn state(&self, x: usize) -> &DensityMatrix<T> {
        &self.states[x]
    }

    /// Output state `W_P = Σ P(x) W_x`.
    pub fn average(&self, p: &Distribution<T>) -> Result<DensityMatrix<T>> {
        Error::check_dim(self.len(), p.len())?;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (s, &w) in self.states.iter().zip(p.probs()) {
            if w != T::zero() {
                m += s.matrix().map(|z| z * C::new(w, T::zero()));
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }

    /// True when every output state is diagonal in the computational basis.
    pub fn is_classical(&self) -> bool {
        self.states.iter().all(|s| s.is_diagonal())
    }

    /// Channel restricted to the listed letters, in that order.
    pub fn restrict(&self, letters: &[usize]) -> Result<Self> {
        let mut labels = Vec::with_capacity(letters.len());
        let mut states = Vec::with_capacity(letters.len());
        for &x in letters {
            if x >= self.len() {
                return Err(Error::validation(format!("letter {x} out of range")));
            }
            labels.push(self.labels[x].clone());
            states.push(self.states[x].clone());
        }
        Self::new(labels, states)
    }

    /// Applies `U · U†` to every output.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| s.conjugate_by(u))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.labels.clone(), states)
    }
}
