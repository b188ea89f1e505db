use std::f64::consts::TAU;

use super::FiniteGroup;
use crate::error::{Error, Result};
use crate::quantum::CMatrix;
use crate::scalar::{cabs, lit, tol, Real, C};

/// Structural class of a representation, used to pick a decomposition
/// method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// Arbitrary unitaries; decomposable when the group is abelian and the
    /// cocycle is trivial.
    General,
    /// `X^j Z^k ⊗ I_m` of `Z_d × Z_d` on `ℂ^d ⊗ ℂ^m`.
    WeylHeisenberg { d: usize, multiplicity: usize },
}

/// Projective unitary representation of a finite group.
#[derive(Clone, Debug)]
pub struct ProjectiveRep<T: Real> {
    group: FiniteGroup,
    unitaries: Vec<CMatrix<T>>,
    kind: RepKind,
}

const UNITARY_TOL: f64 = 1e-10;
const COCYCLE_TOL: f64 = 1e-8;

impl<T: Real> ProjectiveRep<T> {
    /// Checks unitarity, `U_e = I` and that every `U_g U_h U_{gh}†` is a
    /// unimodular scalar.
    pub fn new(group: FiniteGroup, unitaries: Vec<CMatrix<T>>) -> Result<Self> {
        Self::with_kind(group, unitaries, RepKind::General)
    }

    fn with_kind(group: FiniteGroup, unitaries: Vec<CMatrix<T>>, kind: RepKind) -> Result<Self> {
        Error::check_dim(group.order(), unitaries.len())?;
        let dim = unitaries[0].nrows();
        let eye = CMatrix::<T>::identity(dim, dim);
        for (g, u) in unitaries.iter().enumerate() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.nrows(),
                });
            }
            if (u.adjoint() * u - &eye).camax() > tol::<T>(UNITARY_TOL) {
                return Err(Error::validation(format!(
                    "U for element {} is not unitary",
                    group.name(g)
                )));
            }
        }
        if (&unitaries[group.identity()] - &eye).camax() > tol::<T>(UNITARY_TOL) {
            return Err(Error::validation("identity element is not represented by I"));
        }
        let rep = ProjectiveRep {
            group,
            unitaries,
            kind,
        };
        let n = rep.group.order();
        for a in 0..n {
            for b in 0..n {
                if rep.cocycle(a, b).is_none() {
                    return Err(Error::validation(format!(
                        "U({})U({}) is not a phase times U({})",
                        rep.group.name(a),
                        rep.group.name(b),
                        rep.group.name(rep.group.mul(a, b))
                    )));
                }
            }
        }
        Ok(rep)
    }

    /// Phase `c` with `U_a U_b = c U_{ab}`, if it exists within tolerance.
    pub fn cocycle(&self, a: usize, b: usize) -> Option<C<T>> {
        let ab = self.group.mul(a, b);
        let m = &self.unitaries[a] * &self.unitaries[b] * self.unitaries[ab].adjoint();
        let c = m[(0, 0)];
        let t = tol::<T>(COCYCLE_TOL);
        let dim = self.dim();
        let scalar = (0..dim).all(|r| {
            (0..dim).all(|k| {
                let expect = if r == k { c } else { C::new(T::zero(), T::zero()) };
                cabs(m[(r, k)] - expect) <= t
            })
        });
        (scalar && (cabs(c) - T::one()).abs() <= t).then_some(c)
    }

    /// True when all cocycle phases are 1.
    pub fn is_linear(&self) -> bool {
        let n = self.group.order();
        let one = C::new(T::one(), T::zero());
        let t = tol::<T>(COCYCLE_TOL);
        (0..n).all(|a| {
            (0..n).all(|b| {
                self.cocycle(a, b)
                    .map(|c| cabs(c - one) <= t)
                    .unwrap_or(false)
            })
        })
    }

    /// `Z_d` acting by `Z^g ⊗ I_m` on `ℂ^d ⊗ ℂ^m`, with `Z|j⟩ = ω^j|j⟩`.
    pub fn clock(d: usize, multiplicity: usize) -> Result<Self> {
        check_sizes(d, multiplicity)?;
        let group = FiniteGroup::cyclic(d)?;
        let unitaries = (0..d)
            .map(|g| clock_power::<T>(d, g).kronecker(&CMatrix::identity(multiplicity, multiplicity)))
            .collect();
        Self::new(group, unitaries)
    }

    /// `Z_d` acting by the scalars `ω^g I_n`.
    pub fn scalar(d: usize, n: usize) -> Result<Self> {
        check_sizes(d, n)?;
        let group = FiniteGroup::cyclic(d)?;
        let unitaries = (0..d)
            .map(|g| CMatrix::<T>::identity(n, n).map(|z| z * root_of_unity::<T>(d, g)))
            .collect();
        Self::new(group, unitaries)
    }

    /// `Z_d × Z_d` acting by `X^j Z^k ⊗ I_m`, with `X|i⟩ = |i+1⟩`.
    pub fn weyl_heisenberg(d: usize, multiplicity: usize) -> Result<Self> {
        check_sizes(d, multiplicity)?;
        let group = FiniteGroup::abelian(&[d, d])?;
        let eye = CMatrix::<T>::identity(multiplicity, multiplicity);
        let unitaries = (0..d * d)
            .map(|g| {
                let (j, k) = (g / d, g % d);
                (shift_power::<T>(d, j) * clock_power::<T>(d, k)).kronecker(&eye)
            })
            .collect();
        Self::with_kind(
            group,
            unitaries,
            RepKind::WeylHeisenberg { d, multiplicity },
        )
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].nrows()
    }

    pub fn unitary(&self, g: usize) -> &CMatrix<T> {
        &self.unitaries[g]
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }
}

fn check_sizes(d: usize, m: usize) -> Result<()> {
    if d == 0 || m == 0 {
        return Err(Error::validation("representation sizes must be positive"));
    }
    Ok(())
}

pub(crate) fn root_of_unity<T: Real>(d: usize, k: usize) -> C<T> {
    let theta = TAU * ((k % d) as f64) / d as f64;
    C::new(lit(theta.cos()), lit(theta.sin()))
}

fn clock_power<T: Real>(d: usize, g: usize) -> CMatrix<T> {
    CMatrix::from_fn(d, d, |r, c| {
        if r == c {
            root_of_unity(d, r * g)
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

fn shift_power<T: Real>(d: usize, j: usize) -> CMatrix<T> {
    CMatrix::from_fn(d, d, |r, c| {
        if r == (c + j) % d {
            C::new(T::one(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_reps_validate() {
        let c = ProjectiveRep::<f64>::clock(4, 2).unwrap();
        assert_eq!(c.dim(), 8);
        assert!(c.is_linear());
        let s = ProjectiveRep::<f64>::scalar(3, 2).unwrap();
        assert!(s.is_linear());
        let wh = ProjectiveRep::<f64>::weyl_heisenberg(3, 1).unwrap();
        assert!(!wh.is_linear());
        assert_eq!(
            wh.kind(),
            RepKind::WeylHeisenberg {
                d: 3,
                multiplicity: 1
            }
        );
    }

    #[test]
    fn rejects_non_projective() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let x = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)],
        );
        assert!(ProjectiveRep::new(g.clone(), vec![CMatrix::identity(2, 2), x.clone()]).is_ok());
        let bad = x.map(|z| z * 0.5);
        assert!(ProjectiveRep::new(g.clone(), vec![CMatrix::identity(2, 2), bad]).is_err());
        // Hadamard squares to I, but pairing it with Z breaks the group law.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[C::new(h, 0.0), C::new(h, 0.0), C::new(h, 0.0), C::new(-h, 0.0)],
        );
        let g4 = FiniteGroup::abelian(&[2, 2]).unwrap();
        let z = clock_power::<f64>(2, 1);
        let us = vec![CMatrix::identity(2, 2), had.clone(), z.clone(), &had * &z];
        assert!(ProjectiveRep::new(g4, us).is_err());
    }
}
