//! Random states and unitaries for sampling experiments.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, DensityMatrix};
use crate::scalar::{cabs, lit, Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(lit(re), lit(im))
}

/// Haar-random pure state amplitudes.
pub fn pure_amplitudes<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> Vec<C<T>> {
    let v: Vec<C<T>> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    v.into_iter().map(|z| z.unscale(n)).collect()
}

pub fn pure<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> DensityMatrix<T> {
    DensityMatrix::pure(&pure_amplitudes(rng, dim)).expect("nonzero Gaussian vector")
}

/// Full-rank state from the induced (Ginibre) measure.
pub fn density<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> DensityMatrix<T> {
    let g = CMatrix::<T>::from_fn(dim, dim, |_, _| gaussian(rng));
    DensityMatrix::normalized_unchecked(&g * g.adjoint())
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<T: Real>(rng: &mut (impl Rng + ?Sized), dim: usize) -> CMatrix<T> {
    let g = CMatrix::<T>::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        let n = cabs(d);
        if n > T::zero() {
            let phase = d.unscale(n);
            for row in 0..dim {
                q[(row, c)] *= phase;
            }
        }
    }
    q
}

/// Uniform point on the probability simplex.
pub fn simplex(rng: &mut (impl Rng + ?Sized), k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
