use super::{induce, make_symmetric_channel, stabilizer, InducedChannel, ProjectiveRep, RepKind};
use crate::error::{Error, Result};
use crate::info::conditional_entropy;
use crate::quantum::{
    partial_trace_first, von_neumann_entropy, CMatrix, DensityMatrix, Distribution,
    HermitianOperator,
};
use crate::scalar::{lit, log2, Real, C};

#[derive(Clone, Debug)]
pub struct IsotypicComponent<T: Real> {
    pub label: String,
    /// Dimension `d_λ` of the irreducible representation.
    pub irrep_dim: usize,
    /// Multiplicity `n_λ`.
    pub multiplicity: usize,
    pub projector: HermitianOperator<T>,
    /// `p(λ) = Tr P_λ ρ`.
    pub weight: T,
    /// `ρ_λ` on the multiplicity space; absent when `p(λ) = 0`.
    pub state: Option<DensityMatrix<T>>,
}

#[derive(Clone, Debug)]
pub struct IsotypicDecomposition<T: Real> {
    pub components: Vec<IsotypicComponent<T>>,
}

/// Splits the output space into isotypic components and records the weight
/// and multiplicity-space state of `ρ` on each.
///
/// Supported: abelian groups with a trivial cocycle (character projectors)
/// and the Weyl–Heisenberg representation of `Z_d × Z_d`.
pub fn isotypic_decompose<T: Real>(
    rep: &ProjectiveRep<T>,
    rho: &DensityMatrix<T>,
) -> Result<IsotypicDecomposition<T>> {
    Error::check_dim(rep.dim(), rho.dim())?;
    match rep.kind() {
        RepKind::WeylHeisenberg { d, multiplicity } => {
            let reduced = partial_trace_first(rho.matrix(), d, multiplicity)?;
            Ok(IsotypicDecomposition {
                components: vec![IsotypicComponent {
                    label: "weyl-heisenberg".into(),
                    irrep_dim: d,
                    multiplicity,
                    projector: HermitianOperator::identity(rep.dim()),
                    weight: T::one(),
                    state: Some(DensityMatrix::from_matrix_unchecked(reduced)),
                }],
            })
        }
        RepKind::General => abelian_decompose(rep, rho),
    }
}

fn abelian_decompose<T: Real>(
    rep: &ProjectiveRep<T>,
    rho: &DensityMatrix<T>,
) -> Result<IsotypicDecomposition<T>> {
    let group = rep.group();
    let moduli = match group.moduli() {
        Some(m) if group.is_abelian() => m.to_vec(),
        _ => {
            return Err(Error::Unsupported(
                "isotypic decomposition needs an abelian group given as a product of cyclic groups"
                    .into(),
            ))
        }
    };
    if !rep.is_linear() {
        return Err(Error::Unsupported(
            "projective representations of abelian groups other than Weyl-Heisenberg".into(),
        ));
    }
    let order = group.order();
    let dim = rep.dim();
    let mut components = Vec::new();
    for a in 0..order {
        let ca = group.coords(a).unwrap_or_default();
        let mut p = CMatrix::<T>::zeros(dim, dim);
        for g in 0..order {
            let cg = group.coords(g).unwrap_or_default();
            let phase: f64 = ca
                .iter()
                .zip(&cg)
                .zip(&moduli)
                .map(|((&x, &y), &d)| (x * y % d) as f64 / d as f64)
                .sum();
            let theta = -std::f64::consts::TAU * phase;
            let chi_conj = C::new(lit::<T>(theta.cos()), lit::<T>(theta.sin()));
            p += rep.unitary(g).map(|z| z * chi_conj);
        }
        let inv = C::new(T::one() / lit::<T>(order as f64), T::zero());
        let p = HermitianOperator::new(p.map(|z| z * inv))?;
        let rank = p.trace();
        if rank < lit(0.5) {
            continue;
        }
        let spec = p.eigh();
        let keep: Vec<usize> = (0..dim).filter(|&i| spec.values[i] > lit(0.5)).collect();
        let basis = CMatrix::from_fn(dim, keep.len(), |r, c| spec.vectors[(r, keep[c])]);
        let weight = p.expectation(rho).max(T::zero());
        let state = (weight > lit(crate::quantum::SUPPORT_CUTOFF)).then(|| {
            let block = basis.adjoint() * rho.matrix() * &basis;
            DensityMatrix::normalized_unchecked(block)
        });
        let label = if ca.len() == 1 {
            format!("chi{}", ca[0])
        } else {
            let parts: Vec<String> = ca.iter().map(|v| v.to_string()).collect();
            format!("chi({})", parts.join(","))
        };
        components.push(IsotypicComponent {
            label,
            irrep_dim: 1,
            multiplicity: keep.len(),
            projector: p,
            weight,
            state,
        });
    }
    Ok(IsotypicDecomposition { components })
}

/// `Σ_λ p(λ)(S(ρ_λ) + log(d_λ/p(λ)))`, the entropy of the group-averaged
/// output.
pub fn average_state_entropy<T: Real>(decomp: &IsotypicDecomposition<T>) -> T {
    decomp
        .components
        .iter()
        .filter_map(|c| {
            c.state.as_ref().map(|s| {
                c.weight * (von_neumann_entropy(s) + log2(lit::<T>(c.irrep_dim as f64) / c.weight))
            })
        })
        .fold(T::zero(), |a, v| a + v)
}

/// Closed-form capacity of the induced symmetric channel.
#[derive(Clone, Debug)]
pub struct SymmetricCapacity<T: Real> {
    /// `log|G/K| + S(ρ) − Σ_λ p(λ)(S(ρ_λ) + log(d_λ/p(λ)))`.
    pub value: T,
    pub stabilizer: Vec<usize>,
    pub induced: InducedChannel<T>,
    pub decomposition: IsotypicDecomposition<T>,
    /// `H(X|Y)` of the induced channel at the uniform input, computed directly.
    pub direct: T,
}

impl<T: Real> SymmetricCapacity<T> {
    pub fn cross_check_gap(&self) -> T {
        (self.value - self.direct).abs()
    }
}

pub fn symmetric_capacity<T: Real>(
    rep: &ProjectiveRep<T>,
    rho: &DensityMatrix<T>,
) -> Result<SymmetricCapacity<T>> {
    let sc = make_symmetric_channel(rep, rho)?;
    let k = stabilizer(&sc)?;
    let induced = induce(&sc, &k)?;
    let decomposition = isotypic_decompose(rep, rho)?;
    let n = induced.channel.len();
    let value = log2(lit::<T>(n as f64)) + von_neumann_entropy(rho)
        - average_state_entropy(&decomposition);
    let direct = conditional_entropy(&induced.channel, &Distribution::uniform(n)?)?;
    Ok(SymmetricCapacity {
        value,
        stabilizer: k,
        induced,
        decomposition,
        direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random, DensityMatrix};
    use crate::symmetric::FiniteGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_partition(d: &IsotypicDecomposition<f64>, dim: usize) {
        let mut sum = CMatrix::<f64>::zeros(dim, dim);
        let mut w = 0.0;
        for (i, a) in d.components.iter().enumerate() {
            sum += a.projector.matrix();
            w += a.weight;
            for b in &d.components[..i] {
                assert!((a.projector.matrix() * b.projector.matrix()).camax() < 1e-9);
            }
        }
        assert!((sum - CMatrix::identity(dim, dim)).camax() < 1e-9);
        assert!((w - 1.0).abs() < 1e-10);
    }

    #[test]
    fn example_three_single_component() {
        let rep = ProjectiveRep::<f64>::scalar(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let rho = random::density::<f64>(&mut rng, 3);
        let d = isotypic_decompose(&rep, &rho).unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].irrep_dim, 1);
        assert_eq!(d.components[0].multiplicity, 3);
        check_partition(&d, 3);
        // All outputs coincide, so the induced channel has one letter.
        let cap = symmetric_capacity(&rep, &rho).unwrap();
        assert_eq!(cap.stabilizer, vec![0, 1, 2, 3]);
        assert!(cap.value.abs() < 1e-9);
    }

    #[test]
    fn example_one_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let amp = random::pure_amplitudes::<f64>(&mut rng, 3);
        let rep = ProjectiveRep::<f64>::clock(3, 1).unwrap();
        let rho = DensityMatrix::pure(&amp).unwrap();
        let d = isotypic_decompose(&rep, &rho).unwrap();
        check_partition(&d, 3);
        let shannon: f64 = amp.iter().map(|a| -a.norm_sqr() * a.norm_sqr().log2()).sum();
        assert!((average_state_entropy(&d) - shannon).abs() < 1e-10);
        for c in &d.components {
            let j: usize = c.label[3..].parse().unwrap();
            assert!((c.weight - amp[j].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn average_entropy_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for (rep, dim) in [
            (ProjectiveRep::<f64>::clock(3, 2).unwrap(), 6),
            (ProjectiveRep::weyl_heisenberg(2, 2).unwrap(), 4),
            (ProjectiveRep::weyl_heisenberg(3, 2).unwrap(), 6),
        ] {
            let rho = random::density::<f64>(&mut rng, dim);
            let sc = make_symmetric_channel(&rep, &rho).unwrap();
            let g = rep.group().order();
            let avg = sc.channel.average(&Distribution::uniform(g).unwrap()).unwrap();
            let d = isotypic_decompose(&rep, &rho).unwrap();
            check_partition(&d, dim);
            assert!((average_state_entropy(&d) - von_neumann_entropy(&avg)).abs() < 1e-8);
            let cap = symmetric_capacity(&rep, &rho).unwrap();
            assert!(cap.cross_check_gap() < 1e-8);
        }
    }

    #[test]
    fn irreducible_and_multiplicity_free_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let rho = random::density::<f64>(&mut rng, 3);
        let wh = ProjectiveRep::<f64>::weyl_heisenberg(3, 1).unwrap();
        let cap = symmetric_capacity(&wh, &rho).unwrap();
        let x = cap.induced.channel.len() as f64;
        assert!((cap.value - (x.log2() + von_neumann_entropy(&rho) - 3f64.log2())).abs() < 1e-8);
        let clock = ProjectiveRep::<f64>::clock(3, 1).unwrap();
        let cap = symmetric_capacity(&clock, &rho).unwrap();
        let d = &cap.decomposition;
        let sum: f64 = d.components.iter().map(|c| c.weight * c.weight.log2()).sum();
        let x = cap.induced.channel.len() as f64;
        assert!((cap.value - (x.log2() + von_neumann_entropy(&rho) + sum)).abs() < 1e-8);
    }

    #[test]
    fn unsupported_classes_error() {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let g = FiniteGroup::from_table((0..6).map(|i| format!("s{i}")).collect(), table).unwrap();
        let us = perms
            .iter()
            .map(|p| {
                CMatrix::<f64>::from_fn(3, 3, |r, c| {
                    if p[c] == r {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let rep = ProjectiveRep::new(g, us).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            isotypic_decompose(&rep, &rho),
            Err(Error::Unsupported(_))
        ));
    }
}
