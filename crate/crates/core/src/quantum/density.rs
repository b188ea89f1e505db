use super::hermitian::{hermitian_deviation, symmetrize};
use super::{CMatrix, HermitianOperator, Spectrum, DENSITY_TOL, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, tol, Real, C};

/// Positive semidefinite operator of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity (all within
    /// `1e-10`). The stored matrix is symmetrized but otherwise unchanged.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::validation(format!(
                "density matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::validation("density matrix has dimension 0"));
        }
        let dev = hermitian_deviation(&m);
        if dev > tol::<T>(HERMITIAN_TOL) {
            return Err(Error::validation(format!(
                "density matrix is not Hermitian (max deviation {dev})"
            )));
        }
        let m = symmetrize(&m);
        let tr = (0..m.nrows()).fold(T::zero(), |a, i| a + m[(i, i)].re);
        if (tr - T::one()).abs() > tol::<T>(DENSITY_TOL) {
            return Err(Error::validation(format!(
                "density matrix has trace {tr}, expected 1"
            )));
        }
        let min = Spectrum::of(&m).min();
        if min < -tol::<T>(DENSITY_TOL) {
            return Err(Error::validation(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(DensityMatrix { m })
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix<T>) -> Self {
        DensityMatrix { m }
    }

    /// Normalizes a PSD matrix with positive trace.
    pub(crate) fn normalized_unchecked(m: CMatrix<T>) -> Self {
        let tr = (0..m.nrows()).fold(T::zero(), |a, i| a + m[(i, i)].re);
        let s = C::new(T::one() / tr, T::zero());
        DensityMatrix {
            m: symmetrize(&m.map(|z| z * s)),
        }
    }

    /// `|ψ⟩⟨ψ|` for the normalized amplitude vector.
    pub fn pure(amplitudes: &[C<T>]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::validation("empty amplitude vector"));
        }
        let norm2 = amplitudes.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if norm2 <= T::zero() || !norm2.is_finite() {
            return Err(Error::validation("amplitude vector has zero norm"));
        }
        let inv = T::one() / norm2.sqrt();
        let v: Vec<C<T>> = amplitudes.iter().map(|z| z.scale(inv)).collect();
        let n = v.len();
        Ok(DensityMatrix {
            m: CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj()),
        })
    }

    /// `|i⟩⟨i|` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::validation(format!(
                "basis index {i} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![C::new(T::zero(), T::zero()); dim];
        v[i] = C::new(T::one(), T::zero());
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / lit::<T>(dim as f64);
        DensityMatrix {
            m: CMatrix::<T>::identity(dim, dim).map(|z: C<T>| z * C::new(w, T::zero())),
        }
    }

    /// Diagonal state with the given probability vector.
    pub fn diagonal(probs: &[T]) -> Result<Self> {
        let h = HermitianOperator::from_real_diagonal(probs);
        Self::new(h.into_matrix())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn as_hermitian(&self) -> HermitianOperator<T> {
        HermitianOperator::from_matrix_unchecked(self.m.clone())
    }

    pub fn eigh(&self) -> Spectrum<T> {
        Spectrum::of(&self.m)
    }

    /// Eigenvalues in ascending order, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigh()
            .values
            .into_iter()
            .map(|v| v.max(T::zero()))
            .collect()
    }

    /// True when every off-diagonal entry vanishes (within `1e-14`).
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        let t = tol::<T>(1e-14);
        (0..n).all(|r| (0..n).all(|c| r == c || cabs(self.m[(r, c)]) <= t))
    }

    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        DensityMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `U ρ U†` for a unitary `U`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Result<Self> {
        Error::check_dim(self.dim(), u.nrows())?;
        Ok(DensityMatrix {
            m: symmetrize(&(u * &self.m * u.adjoint())),
        })
    }

    /// Convex combination `Σ wᵢ ρᵢ`; the weights are used as given.
    pub fn mixture(weights: &[T], states: &[&Self]) -> Result<Self> {
        Error::check_dim(weights.len(), states.len())?;
        let first = states
            .first()
            .ok_or_else(|| Error::validation("empty mixture"))?;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (&w, s) in weights.iter().zip(states) {
            Error::check_dim(first.dim(), s.dim())?;
            if w != T::zero() {
                m += s.m.map(|z| z * C::new(w, T::zero()));
            }
        }
        Ok(DensityMatrix { m })
    }
}
