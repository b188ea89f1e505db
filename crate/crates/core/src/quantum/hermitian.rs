use nalgebra::{DMatrix, SymmetricEigen};

use super::{CMatrix, DensityMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, tol, Real, C};

/// Self-adjoint operator on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    m: CMatrix<T>,
}

/// Eigendecomposition with eigenvalues in ascending order and the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub(crate) fn of(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Spectrum {
                values: vec![],
                vectors: CMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Spectrum { values, vectors }
    }

    /// Rebuilds `Σ f(λᵢ) vᵢ vᵢ†`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &v) in self.values.iter().enumerate() {
            let s = f(v);
            for r in 0..n {
                scaled[(r, c)] *= C::new(s, T::zero());
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> Vec<C<T>> {
        self.vectors.column(i).iter().copied().collect()
    }
}

impl<T: Real> HermitianOperator<T> {
    /// Validates conjugate symmetry within [`HERMITIAN_TOL`] and stores the
    /// symmetrized matrix.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::validation(format!(
                "operator is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::validation("operator has dimension 0"));
        }
        let dev = hermitian_deviation(&m);
        if dev > tol::<T>(HERMITIAN_TOL) {
            return Err(Error::validation(format!(
                "operator is not Hermitian (max deviation {dev})"
            )));
        }
        Ok(Self::from_matrix_unchecked(symmetrize(&m)))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix<T>) -> Self {
        HermitianOperator { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_matrix_unchecked(CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C::new(diag[r], T::zero())
            } else {
                C::new(T::zero(), T::zero())
            }
        }))
    }

    /// Real symmetric matrix, given row-major.
    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        Error::check_dim(dim * dim, entries.len())?;
        Self::new(CMatrix::from_fn(dim, dim, |r, c| {
            C::new(entries[r * dim + c], T::zero())
        }))
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

    pub fn eigh(&self) -> Spectrum<T> {
        Spectrum::of(&self.m)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigh().values
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.m[(i, i)].re)
    }

    /// `Tr[ρ A]`.
    pub fn expectation(&self, rho: &DensityMatrix<T>) -> T {
        trace_product_re(rho.matrix(), &self.m)
    }

    pub fn scale(&self, c: T) -> Self {
        Self::from_matrix_unchecked(self.m.map(|z| z * C::new(c, T::zero())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.m + &other.m))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.m - &other.m))
    }

    /// `A + c I`.
    pub fn shift(&self, c: T) -> Self {
        let mut m = self.m.clone();
        for i in 0..self.dim() {
            m[(i, i)] += C::new(c, T::zero());
        }
        Self::from_matrix_unchecked(m)
    }

    /// Largest absolute eigenvalue.
    pub fn op_norm(&self) -> T {
        let s = self.eigh();
        s.max().abs().max(s.min().abs())
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Result<Self> {
        Error::check_dim(self.dim(), u.nrows())?;
        Ok(Self::from_matrix_unchecked(symmetrize(
            &(u * &self.m * u.adjoint()),
        )))
    }

    /// `A²` as an operator.
    pub fn square(&self) -> Self {
        Self::from_matrix_unchecked(symmetrize(&(&self.m * &self.m)))
    }

    /// Real coordinates with respect to the orthonormal Hermitian basis of
    /// [`hermitian_basis`].
    pub fn coordinates(&self) -> Vec<T> {
        hermitian_basis::<T>(self.dim())
            .iter()
            .map(|b| trace_product_re(b, &self.m))
            .collect()
    }

    pub fn from_coordinates(dim: usize, coords: &[T]) -> Result<Self> {
        Error::check_dim(dim * dim, coords.len())?;
        let mut m = CMatrix::zeros(dim, dim);
        for (b, &a) in hermitian_basis::<T>(dim).iter().zip(coords) {
            m += b.map(|z| z * C::new(a, T::zero()));
        }
        Ok(Self::from_matrix_unchecked(symmetrize(&m)))
    }
}

/// Orthonormal basis of the real vector space of `dim×dim` Hermitian matrices
/// under the Hilbert–Schmidt inner product: diagonal units, then symmetric and
/// antisymmetric off-diagonal pairs.
pub(crate) fn hermitian_basis<T: Real>(dim: usize) -> Vec<CMatrix<T>> {
    let mut out = Vec::with_capacity(dim * dim);
    let zero = C::new(T::zero(), T::zero());
    let h = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..dim {
        let mut m = CMatrix::from_element(dim, dim, zero);
        m[(i, i)] = C::new(T::one(), T::zero());
        out.push(m);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut s = CMatrix::from_element(dim, dim, zero);
            s[(i, j)] = C::new(h, T::zero());
            s[(j, i)] = C::new(h, T::zero());
            out.push(s);
            let mut a = CMatrix::from_element(dim, dim, zero);
            a[(i, j)] = C::new(T::zero(), -h);
            a[(j, i)] = C::new(T::zero(), h);
            out.push(a);
        }
    }
    out
}

pub(crate) fn hermitian_deviation<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut dev = T::zero();
    for r in 0..n {
        for c in r..n {
            let d = cabs(m[(r, c)] - m[(c, r)].conj());
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

pub(crate) fn symmetrize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = C::new(lit::<T>(0.5), T::zero());
    (m + m.adjoint()).map(|z| z * half)
}

/// `Re Tr[A B]` without forming the product.
pub(crate) fn trace_product_re<T: Real>(a: &DMatrix<C<T>>, b: &DMatrix<C<T>>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)];
            let y = b[(k, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}
