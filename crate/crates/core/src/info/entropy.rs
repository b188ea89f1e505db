use crate::error::{Error, Result};
use crate::quantum::{joint_state, von_neumann_entropy, CqChannel, DensityMatrix, Distribution};
use crate::scalar::{lit, log2, Real};

/// `H(X|Y) = H(XY) − H(Y)` of the joint state `𝐖×P`, in bits.
pub fn conditional_entropy<T: Real>(w: &CqChannel<T>, p: &Distribution<T>) -> Result<T> {
    let joint = joint_state(w, p)?;
    let h = joint.entropy() - von_neumann_entropy(&joint.marginal());
    Ok(h.max(T::zero()))
}

/// Holevo quantity `S(W_P) − Σ P(x) S(W_x)`.
pub fn holevo_info<T: Real>(w: &CqChannel<T>, p: &Distribution<T>) -> Result<T> {
    Error::check_dim(w.len(), p.len())?;
    let mut h = von_neumann_entropy(&w.average(p)?);
    for (s, &px) in w.states().iter().zip(p.probs()) {
        if px > T::zero() {
            h -= px * von_neumann_entropy(s);
        }
    }
    Ok(h.max(T::zero()))
}

/// Umegaki relative entropy `Tr ρ(log ρ − log σ)`; `+∞` when the support of
/// `ρ` is not contained in that of `σ`.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    if !support_contained(rho, sigma) {
        return Ok(lit(f64::INFINITY));
    }
    let cut = lit::<T>(crate::quantum::SUPPORT_CUTOFF);
    let log_sigma = sigma
        .eigh()
        .apply(|l| if l > cut { log2(l) } else { T::zero() });
    let cross = crate::quantum::hermitian_trace_product(rho.matrix(), &log_sigma);
    Ok((-von_neumann_entropy(rho) - cross).max(T::zero()))
}

/// True when `Tr[(I − Π_σ) ρ]` is negligible.
pub(crate) fn support_contained<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> bool {
    let cut = lit::<T>(crate::quantum::SUPPORT_CUTOFF);
    let outside = sigma
        .eigh()
        .apply(|l| if l > cut { T::zero() } else { T::one() });
    let leak = crate::quantum::hermitian_trace_product(rho.matrix(), &outside);
    leak <= lit(1e-10)
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

    fn basis_channel() -> CqChannel<f64> {
        CqChannel::from_states(vec![
            DensityMatrix::basis(3, 0).unwrap(),
            DensityMatrix::basis(3, 1).unwrap(),
            DensityMatrix::basis(3, 2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn conditional_entropy_examples() {
        let w = basis_channel();
        let p = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(conditional_entropy(&w, &p).unwrap().abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random::density::<f64>(&mut rng, 2);
        let same = CqChannel::from_states(vec![s.clone(), s.clone(), s]).unwrap();
        assert!((conditional_entropy(&same, &p).unwrap() - p.entropy()).abs() < 1e-10);
        let bsc = CqChannel::from_states(vec![
            DensityMatrix::diagonal(&[0.89, 0.11]).unwrap(),
            DensityMatrix::diagonal(&[0.11, 0.89]).unwrap(),
        ])
        .unwrap();
        let u = Distribution::uniform(2).unwrap();
        assert!((conditional_entropy(&bsc, &u).unwrap() - h2(0.11)).abs() < 1e-12);
    }

    #[test]
    fn joint_state_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random::density::<f64>(&mut rng, 2);
        let b = random::density::<f64>(&mut rng, 2);
        let w = CqChannel::from_states(vec![a.clone(), b.clone()]).unwrap();
        let p = Distribution::new(vec![0.3, 0.7]).unwrap();
        let j = joint_state(&w, &p).unwrap();
        let expect = a.matrix() * crate::scalar::C::new(0.3, 0.0)
            + b.matrix() * crate::scalar::C::new(0.7, 0.0);
        assert!((j.marginal().matrix() - expect).camax() < 1e-14);
        let full = j.to_matrix();
        let tr: f64 = (0..4).map(|i| full[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
        let point = joint_state(&w, &Distribution::point(2, 1).unwrap()).unwrap();
        assert!(point.block(0).camax() == 0.0);
        let bad = Distribution::uniform(3).unwrap();
        assert!(joint_state(&w, &bad).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let a = DensityMatrix::<f64>::diagonal(&[0.5, 0.5]).unwrap();
        let b = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let d = relative_entropy(&a, &b).unwrap();
        let expect = 0.5 * (0.5f64 / 0.9).log2() + 0.5 * (0.5f64 / 0.1).log2();
        assert!((d - expect).abs() < 1e-12);
        assert!((d - 0.736966).abs() < 1e-6);
        assert!(relative_entropy(&a, &a).unwrap().abs() < 1e-12);
        let e0 = DensityMatrix::<f64>::basis(2, 0).unwrap();
        let e1 = DensityMatrix::basis(2, 1).unwrap();
        assert!(relative_entropy(&e0, &e1).unwrap().is_infinite());
    }

    #[test]
    fn chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let w = CqChannel::from_states(
                (0..3).map(|_| random::density::<f64>(&mut rng, 2)).collect(),
            )
            .unwrap();
            let p = Distribution::new(random::simplex(&mut rng, 3)).unwrap();
            let h = conditional_entropy(&w, &p).unwrap();
            let i = holevo_info(&w, &p).unwrap();
            assert!((h + i - p.entropy()).abs() < 1e-9);
            assert!(h >= 0.0 && h <= 3f64.log2());
        }
    }
}
