use crate::error::{Error, Result};
use crate::scalar::{entropy_term, lit, tol, Real};

/// Probability vector on a finite index set.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T: Real> {
    probs: Vec<T>,
}

/// Normalization tolerance.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

impl<T: Real> Distribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::validation("distribution over an empty set"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::validation(format!(
                    "probability {i} is {p}, expected a nonnegative number"
                )));
            }
        }
        let s = probs.iter().fold(T::zero(), |a, &p| a + p);
        if (s - T::one()).abs() > tol::<T>(DISTRIBUTION_TOL) {
            return Err(Error::validation(format!(
                "probabilities sum to {s}, expected 1"
            )));
        }
        Ok(Distribution { probs })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let s = weights.iter().fold(T::zero(), |a, &p| a + p);
        if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) || s <= T::zero() {
            return Err(Error::validation(
                "weights must be nonnegative with positive sum",
            ));
        }
        Ok(Distribution {
            probs: weights.into_iter().map(|w| w / s).collect(),
        })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::validation("distribution over an empty set"));
        }
        let w = T::one() / lit::<T>(k as f64);
        Ok(Distribution { probs: vec![w; k] })
    }

    pub fn point(k: usize, i: usize) -> Result<Self> {
        if i >= k {
            return Err(Error::validation(format!(
                "point mass at {i} outside index set of size {k}"
            )));
        }
        let mut probs = vec![T::zero(); k];
        probs[i] = T::one();
        Ok(Distribution { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> T {
        self.probs[i]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> T {
        self.probs
            .iter()
            .fold(T::zero(), |a, &p| a + entropy_term(p))
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn tv_distance(&self, other: &Self) -> Result<T> {
        Error::check_dim(self.len(), other.len())?;
        let s = self
            .probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |a, (&p, &q)| a + (p - q).abs());
        Ok(s * lit::<T>(0.5))
    }

    pub fn map_scalar<U: Real>(&self) -> Distribution<U> {
        Distribution {
            probs: self
                .probs
                .iter()
                .map(|&p| lit::<U>(crate::scalar::to_f64(p)))
                .collect(),
        }
    }
}
