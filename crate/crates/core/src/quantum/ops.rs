use super::{CMatrix, CqChannel, DensityMatrix, HermitianOperator, Spectrum};
use super::{DENSITY_TOL, SUPPORT_CUTOFF};
use crate::error::{Error, Result};
use crate::scalar::{entropy_term, lit, tol, Real, C};

/// Size limits for dense tensor-power objects and exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Largest allowed `dimⁿ` for dense operators.
    pub max_dense_dim: usize,
    /// Largest allowed number of enumerated input words.
    pub max_enumeration: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_dense_dim: 4096,
            max_enumeration: 1 << 20,
        }
    }
}

impl Budget {
    /// Checks `base^exp ≤ max_dense_dim` and returns the power.
    pub fn dense_dim(&self, base: usize, exp: usize) -> Result<usize> {
        let required = checked_pow(base, exp);
        if required > self.max_dense_dim as u128 {
            return Err(Error::Resource {
                what: format!("dense dimension {base}^{exp}"),
                required,
                allowed: self.max_dense_dim as u128,
            });
        }
        Ok(required as usize)
    }

    /// Checks `base^exp ≤ max_enumeration` and returns the power.
    pub fn enumeration(&self, base: usize, exp: usize) -> Result<u64> {
        let required = checked_pow(base, exp);
        if required > self.max_enumeration as u128 {
            return Err(Error::Resource {
                what: format!("enumeration of {base}^{exp} words"),
                required,
                allowed: self.max_enumeration as u128,
            });
        }
        Ok(required as u64)
    }
}

fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.eigenvalues()
        .into_iter()
        .fold(T::zero(), |a, l| a + entropy_term(l))
}

/// Sum of absolute eigenvalues.
pub fn trace_norm<T: Real>(a: &HermitianOperator<T>) -> T {
    a.eigenvalues()
        .into_iter()
        .fold(T::zero(), |acc, l| acc + l.abs())
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    // Fixed operand order keeps the result bitwise symmetric.
    let (a, b) = if entrywise_less(rho.matrix(), sigma.matrix()) {
        (rho, sigma)
    } else {
        (sigma, rho)
    };
    let diff = HermitianOperator::from_matrix_unchecked(a.matrix() - b.matrix());
    Ok(trace_norm(&diff) * lit::<T>(0.5))
}

fn entrywise_less<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x.re != y.re {
            return x.re < y.re;
        }
        if x.im != y.im {
            return x.im < y.im;
        }
    }
    false
}

/// Kronecker product of a nonempty list of matrices.
pub fn kron_all<T: Real>(factors: &[&CMatrix<T>]) -> CMatrix<T> {
    let mut it = factors.iter();
    let mut acc = match it.next() {
        Some(m) => (*m).clone(),
        None => return CMatrix::identity(1, 1),
    };
    for m in it {
        acc = acc.kronecker(*m);
    }
    acc
}

/// `W_{x₁} ⊗ ⋯ ⊗ W_{xₙ}`.
pub fn tensor_power_state<T: Real>(
    word: &[usize],
    w: &CqChannel<T>,
    budget: &Budget,
) -> Result<DensityMatrix<T>> {
    if word.is_empty() {
        return Err(Error::validation("empty input word"));
    }
    budget.dense_dim(w.dim(), word.len())?;
    let mut factors = Vec::with_capacity(word.len());
    for &x in word {
        if x >= w.len() {
            return Err(Error::validation(format!(
                "letter index {x} outside alphabet of size {}",
                w.len()
            )));
        }
        factors.push(w.state(x).matrix());
    }
    Ok(DensityMatrix::from_matrix_unchecked(kron_all(&factors)))
}

/// `A^p` for PSD `A`, with eigenvalues at or below the support cutoff mapped
/// to zero (so negative `p` gives the power of the pseudo-inverse and `p = 0`
/// the support projector).
pub fn matrix_power<T: Real>(a: &HermitianOperator<T>, p: T) -> Result<HermitianOperator<T>> {
    let s = a.eigh();
    if s.min() < -tol::<T>(DENSITY_TOL) {
        return Err(Error::validation(format!(
            "operator is not positive semidefinite (eigenvalue {})",
            s.min()
        )));
    }
    Ok(power_of_spectrum(&s, p))
}

pub(crate) fn power_of_spectrum<T: Real>(s: &Spectrum<T>, p: T) -> HermitianOperator<T> {
    let cut = lit::<T>(SUPPORT_CUTOFF);
    HermitianOperator::from_matrix_unchecked(s.apply(|l| if l > cut { l.powf(p) } else { T::zero() }))
}

impl<T: Real> DensityMatrix<T> {
    /// `ρ^p` on the support of `ρ`.
    pub fn power(&self, p: T) -> HermitianOperator<T> {
        power_of_spectrum(&self.eigh(), p)
    }
}

/// Traces out the first tensor factor of a `(da·db)`-dimensional operator.
pub fn partial_trace_first<T: Real>(m: &CMatrix<T>, da: usize, db: usize) -> Result<CMatrix<T>> {
    Error::check_dim(da * db, m.nrows())?;
    Ok(CMatrix::from_fn(db, db, |r, c| {
        (0..da).fold(C::new(T::zero(), T::zero()), |acc, a| {
            acc + m[(a * db + r, a * db + c)]
        })
    }))
}

/// Traces out the second tensor factor of a `(da·db)`-dimensional operator.
pub fn partial_trace_second<T: Real>(m: &CMatrix<T>, da: usize, db: usize) -> Result<CMatrix<T>> {
    Error::check_dim(da * db, m.nrows())?;
    Ok(CMatrix::from_fn(da, da, |r, c| {
        (0..db).fold(C::new(T::zero(), T::zero()), |acc, b| {
            acc + m[(r * db + b, c * db + b)]
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::<f64>::basis(2, 0).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-12);
        let d = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        assert!((von_neumann_entropy(&d) - h2(0.1)).abs() < 1e-12);
        assert!((h2(0.1) - 0.468996).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_bad_input() {
        let m = HermitianOperator::<f64>::from_real_diagonal(&[0.9, 0.2]).into_matrix();
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validation(_))));
        let mut m = CMatrix::<f64>::identity(2, 2).map(|z| z * 0.5);
        m[(0, 1)] = C::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::<f64>::basis(2, 0).unwrap();
        let b = DensityMatrix::<f64>::basis(2, 1).unwrap();
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-14);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let d = DensityMatrix::<f64>::diagonal(&[0.9, 0.1]).unwrap();
        let u = DensityMatrix::maximally_mixed(2);
        assert!((trace_distance(&d, &u).unwrap() - 0.4).abs() < 1e-12);
        let c = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(matches!(
            trace_distance(&a, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = random::density::<f64>(&mut rng, 3);
            let sigma = random::density::<f64>(&mut rng, 2);
            let u = random::unitary::<f64>(&mut rng, 3);
            let rot = rho.conjugate_by(&u).unwrap();
            assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rot)).abs() < 1e-8);
            let prod = rho.kron(&sigma);
            let lhs = von_neumann_entropy(&prod);
            let rhs = von_neumann_entropy(&rho) + von_neumann_entropy(&sigma);
            assert!((lhs - rhs).abs() < 1e-8);
            assert!(lhs <= (6f64).log2() + 1e-12);
        }
    }

    #[test]
    fn trace_distance_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let a = random::density::<f64>(&mut rng, 3);
            let b = random::density::<f64>(&mut rng, 3);
            let c = random::density::<f64>(&mut rng, 3);
            let ab = trace_distance(&a, &b).unwrap();
            assert_eq!(ab, trace_distance(&b, &a).unwrap());
            let ac = trace_distance(&a, &c).unwrap();
            let cb = trace_distance(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-10);
            assert!((0.0..=1.0 + 1e-12).contains(&ab));
        }
    }

    #[test]
    fn tensor_power_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let states = (0..3).map(|_| random::density::<f64>(&mut rng, 2)).collect();
        let w = CqChannel::from_states(states).unwrap();
        let budget = Budget::default();
        let one = tensor_power_state(&[1], &w, &budget).unwrap();
        assert_eq!(one, *w.state(1));
        let x = [0, 2, 1];
        let y = [1, 1];
        let xy = tensor_power_state(&[0, 2, 1, 1, 1], &w, &budget).unwrap();
        let sep = tensor_power_state(&x, &w, &budget)
            .unwrap()
            .kron(&tensor_power_state(&y, &w, &budget).unwrap());
        assert!((xy.matrix() - sep.matrix()).camax() <= 1e-12);
        let tr = (0..8).fold(0.0, |a, i| {
            a + tensor_power_state(&x, &w, &budget).unwrap().matrix()[(i, i)].re
        });
        assert!((tr - 1.0).abs() < 1e-12);
        let small = Budget {
            max_dense_dim: 16,
            ..Budget::default()
        };
        match tensor_power_state(&[0; 5], &w, &small) {
            Err(Error::Resource {
                required, allowed, ..
            }) => {
                assert_eq!(required, 32);
                assert_eq!(allowed, 16);
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn orthogonal_pure_product() {
        let w = CqChannel::from_states(vec![
            DensityMatrix::<f64>::basis(2, 0).unwrap(),
            DensityMatrix::basis(2, 1).unwrap(),
        ])
        .unwrap();
        let s = tensor_power_state(&[0, 1], &w, &Budget::default()).unwrap();
        assert!(von_neumann_entropy(&s).abs() < 1e-12);
        assert!((s.matrix()[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_power_examples() {
        let a = HermitianOperator::<f64>::from_real_diagonal(&[4.0, 1.0]);
        let r = matrix_power(&a, 0.5).unwrap();
        assert!((r.matrix()[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!((r.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let rho = random::density::<f64>(&mut rng, 3).as_hermitian();
        let same = matrix_power(&rho, 1.0).unwrap();
        assert!((same.matrix() - rho.matrix()).camax() < 1e-10);
        let proj = matrix_power(&HermitianOperator::from_real_diagonal(&[0.3, 0.0, 0.7]), 0.0)
            .unwrap();
        let expect = HermitianOperator::from_real_diagonal(&[1.0, 0.0, 1.0]);
        assert!((proj.matrix() - expect.matrix()).camax() < 1e-12);
        let inv = matrix_power(&HermitianOperator::<f64>::from_real_diagonal(&[0.5, 0.0]), -1.0).unwrap();
        assert!((inv.matrix()[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!(inv.matrix()[(1, 1)].re.abs() < 1e-12);
        assert!(matrix_power(&HermitianOperator::from_real_diagonal(&[1.0, -0.1]), 0.5).is_err());
    }

    #[test]
    fn partial_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random::density::<f64>(&mut rng, 2);
        let b = random::density::<f64>(&mut rng, 3);
        let ab = a.kron(&b);
        let rb = partial_trace_first(ab.matrix(), 2, 3).unwrap();
        let ra = partial_trace_second(ab.matrix(), 2, 3).unwrap();
        assert!((rb - b.matrix()).camax() < 1e-12);
        assert!((ra - a.matrix()).camax() < 1e-12);
    }

    #[test]
    fn single_precision_path() {
        let d = DensityMatrix::<f32>::diagonal(&[0.9, 0.1]).unwrap();
        assert!((von_neumann_entropy(&d) as f64 - h2(0.1)).abs() < 1e-5);
    }
}
