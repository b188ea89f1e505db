//! Separator operators `Ξ_x`: Hermitian observables with zero mean on `W_x`
//! and strictly negative mean on every other output, found by linear
//! programming over Hermitian-matrix coordinates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::quantum::{hermitian_basis, HermitianOperator};
#[cfg(test)]
use crate::quantum::CMatrix;
use crate::symmetric::check_nr;
use crate::{Channel, Hermitian};

/// Letters whose best margin `t` is at or below this are reported redundant.
pub const REDUNDANT_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SeparatorFamily {
    pub xis: Vec<Hermitian>,
    pub zeta1: f64,
    pub zeta2: f64,
    /// Verifier slack: accept when `Ξ⁽ⁿ⁾ ≥ −nε₁`.
    pub epsilon1: f64,
    /// Minimum relative Hamming distance between codewords.
    pub epsilon2: f64,
}

/// `(ε₁, ε₂) = (ζ₁/8, 1/2)`, which leaves `ζ₁ε₂/2 − ε₁ = ζ₁/8`.
pub fn default_epsilons(zeta1: f64) -> (f64, f64) {
    (zeta1 / 8.0, 0.5)
}

impl SeparatorFamily {
    /// Builds a family with margins recomputed from `w`.
    pub fn from_operators(w: &Channel, xis: Vec<Hermitian>, epsilon1: f64, epsilon2: f64) -> Result<Self> {
        Error::check_dim(w.len(), xis.len())?;
        for x in &xis {
            Error::check_dim(w.dim(), x.dim())?;
        }
        let fam = SeparatorFamily {
            zeta1: zeta1(w, &xis),
            zeta2: zeta2(w, &xis),
            xis,
            epsilon1: 0.0,
            epsilon2: 0.0,
        };
        fam.with_epsilons(epsilon1, epsilon2)
    }

    /// Replaces `(ε₁, ε₂)`, requiring `ε₁ > 0`, `0 < ε₂ < 1` and
    /// `ζ₁ε₂/2 − ε₁ > 0`.
    pub fn with_epsilons(mut self, epsilon1: f64, epsilon2: f64) -> Result<Self> {
        if !(epsilon1.is_finite() && epsilon1 > 0.0) {
            return Err(Error::validation(format!("epsilon1 = {epsilon1} must be positive")));
        }
        if !(epsilon2 > 0.0 && epsilon2 < 1.0) {
            return Err(Error::validation(format!("epsilon2 = {epsilon2} must lie in (0, 1)")));
        }
        let margin = self.zeta1 * epsilon2 / 2.0 - epsilon1;
        if margin <= 0.0 {
            return Err(Error::validation(format!(
                "zeta1*epsilon2/2 - epsilon1 = {margin} must be positive (zeta1 = {})",
                self.zeta1
            )));
        }
        self.epsilon1 = epsilon1;
        self.epsilon2 = epsilon2;
        Ok(self)
    }

    /// `ζ₁ε₂/2 − ε₁`.
    pub fn lemma_margin(&self) -> f64 {
        self.zeta1 * self.epsilon2 / 2.0 - self.epsilon1
    }

    /// Binding bound `ζ₂ / (n [ζ₁ε₂/2 − ε₁]₊²)`; `+∞` when the margin vanishes.
    pub fn binding_bound(&self, n: usize) -> f64 {
        let m = self.lemma_margin().max(0.0);
        if m == 0.0 {
            f64::INFINITY
        } else {
            self.zeta2 / (n as f64 * m * m)
        }
    }

    /// Pointwise acceptance bound `nζ₂ / [ζ₁d − nε₁]₊²` for an input at
    /// Hamming distance `d` from the codeword.
    pub fn chebyshev_bound(&self, n: usize, d: usize) -> f64 {
        let m = (self.zeta1 * d as f64 - n as f64 * self.epsilon1).max(0.0);
        if m == 0.0 {
            f64::INFINITY
        } else {
            n as f64 * self.zeta2 / (m * m)
        }
    }
}

/// `ζ₁ = min_{x≠x′} −Tr[W_{x′} Ξ_x]`; `+∞` for a one-letter channel.
pub fn zeta1(w: &Channel, xis: &[Hermitian]) -> f64 {
    let mut z = f64::INFINITY;
    for (x, xi) in xis.iter().enumerate() {
        for (y, s) in w.states().iter().enumerate() {
            if x != y {
                z = z.min(-xi.expectation(s));
            }
        }
    }
    z
}

/// `ζ₂ = max_{x,x′} Tr[W_{x′}(Ξ_x − Tr[W_{x′}Ξ_x])²]`.
pub fn zeta2(w: &Channel, xis: &[Hermitian]) -> f64 {
    let mut z: f64 = 0.0;
    for xi in xis {
        let sq = xi.square();
        for s in w.states() {
            let mean = xi.expectation(s);
            z = z.max(sq.expectation(s) - mean * mean);
        }
    }
    z
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparatorOptions {
    /// Maximum number of cutting-plane rounds per letter.
    pub max_rounds: usize,
    /// Relative gap between the relaxed and the feasible margin at which the
    /// rounds stop.
    pub tolerance: f64,
}

impl Default for SeparatorOptions {
    fn default() -> Self {
        SeparatorOptions {
            max_rounds: 2000,
            tolerance: 1e-10,
        }
    }
}

/// Per-letter solver diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LetterSolve {
    /// Margin of the relaxed LP (an upper bound on the optimum).
    pub relaxed: f64,
    /// Margin of the returned operator.
    pub achieved: f64,
    pub rounds: usize,
}

pub fn find_separators(w: &Channel) -> Result<SeparatorFamily> {
    find_separators_with(w, &SeparatorOptions::default()).map(|(f, _)| f)
}

/// Solves, for each letter `x`, `max t` subject to `Tr W_x A = 0`,
/// `Tr W_{x′} A ≤ −t` for `x′ ≠ x` and `‖A‖_op ≤ 1`.
///
/// For commuting (diagonal) channels `A` is restricted to the diagonal,
/// where the norm constraint is the box `|a_i| ≤ 1` and one LP is exact.
/// Otherwise the norm ball is approached from outside by eigenvector cuts
/// `±v†Av ≤ 1` and the LP iterate is rescaled into the ball.
pub fn find_separators_with(
    w: &Channel,
    opts: &SeparatorOptions,
) -> Result<(SeparatorFamily, Vec<LetterSolve>)> {
    let nr = check_nr(w);
    if let Some(x) = nr.first_redundant() {
        return Err(Error::Redundant {
            letter: x,
            label: w.label(x).to_string(),
        });
    }
    let solves: Vec<Result<(Hermitian, LetterSolve)>> = (0..w.len())
        .into_par_iter()
        .map(|x| {
            if w.is_classical() {
                classical_letter(w, x)
            } else {
                quantum_letter(w, x, opts)
            }
        })
        .collect();
    let mut xis = Vec::with_capacity(w.len());
    let mut diag = Vec::with_capacity(w.len());
    for (x, s) in solves.into_iter().enumerate() {
        let (xi, d) = s?;
        if w.len() > 1 && d.achieved <= REDUNDANT_MARGIN {
            return Err(Error::Redundant {
                letter: x,
                label: w.label(x).to_string(),
            });
        }
        xis.push(xi);
        diag.push(d);
    }
    let z1 = zeta1(w, &xis);
    let (e1, e2) = default_epsilons(if z1.is_finite() { z1 } else { 1.0 });
    let fam = SeparatorFamily {
        zeta1: z1,
        zeta2: zeta2(w, &xis),
        xis,
        epsilon1: e1,
        epsilon2: e2,
    };
    Ok((fam, diag))
}

fn classical_letter(w: &Channel, x: usize) -> Result<(Hermitian, LetterSolve)> {
    let d = w.dim();
    let diag: Vec<Vec<f64>> = w.states().iter().map(|s| s.diagonal_entries()).collect();
    // Variables y_i = a_i + 1 ∈ [0, 2], then t ≥ 0.
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    let mut lp = LinearProgram::new(obj);
    let shift = |p: &[f64]| p.iter().sum::<f64>();
    let mut row = diag[x].clone();
    row.push(0.0);
    lp.eq(row, shift(&diag[x]));
    for (y, p) in diag.iter().enumerate() {
        if y != x {
            let mut row = p.clone();
            row.push(1.0);
            lp.leq(row, shift(p));
        }
    }
    for i in 0..d {
        let mut row = vec![0.0; d + 1];
        row[i] = 1.0;
        lp.leq(row, 2.0);
    }
    let (sol, t) = match lp.solve() {
        LpOutcome::Optimal { x, value } => (x, value),
        _ => return Err(Error::Inconsistent("separator LP has no optimum".into())),
    };
    let a: Vec<f64> = sol[..d].iter().map(|y| y - 1.0).collect();
    let xi = finalize(w, x, HermitianOperator::from_real_diagonal(&a));
    let achieved = margin_of(w, x, &xi);
    Ok((
        xi,
        LetterSolve {
            relaxed: t,
            achieved,
            rounds: 1,
        },
    ))
}

fn quantum_letter(w: &Channel, x: usize, opts: &SeparatorOptions) -> Result<(Hermitian, LetterSolve)> {
    let d = w.dim();
    let basis = hermitian_basis::<f64>(d);
    let nb = basis.len();
    let coords: Vec<Vec<f64>> = w.states().iter().map(|s| s.as_hermitian().coordinates()).collect();
    let bound = (d as f64).sqrt();
    // Variables y_i = a_i + bound ∈ [0, 2·bound], then t ≥ 0.
    let mut obj = vec![0.0; nb + 1];
    obj[nb] = 1.0;
    let mut base = LinearProgram::new(obj);
    let mut row = coords[x].clone();
    row.push(0.0);
    base.eq(row, bound * coords[x].iter().sum::<f64>());
    for (y, c) in coords.iter().enumerate() {
        if y != x {
            let mut row = c.clone();
            row.push(1.0);
            base.leq(row, bound * c.iter().sum::<f64>());
        }
    }
    for i in 0..nb {
        let mut row = vec![0.0; nb + 1];
        row[i] = 1.0;
        base.leq(row, 2.0 * bound);
    }
    let mut best: Option<(Hermitian, f64)> = None;
    let mut relaxed = f64::INFINITY;
    let mut rounds = 0;
    while rounds < opts.max_rounds {
        rounds += 1;
        let (sol, t) = match base.solve() {
            LpOutcome::Optimal { x, value } => (x, value),
            _ => return Err(Error::Inconsistent("separator LP has no optimum".into())),
        };
        relaxed = t;
        let a: Vec<f64> = sol[..nb].iter().map(|y| y - bound).collect();
        let op = HermitianOperator::from_coordinates(d, &a)?;
        let spec = op.eigh();
        let norm = spec.max().abs().max(spec.min().abs());
        let feasible = finalize(w, x, op);
        let m = margin_of(w, x, &feasible);
        if best.as_ref().is_none_or(|(_, bm)| m > *bm) {
            best = Some((feasible, m));
        }
        let bm = best.as_ref().map(|b| b.1).unwrap_or(0.0);
        if norm <= 1.0 + 1e-12 || relaxed - bm <= opts.tolerance * relaxed.abs().max(1e-300) {
            break;
        }
        for (i, &l) in spec.values.iter().enumerate() {
            if l.abs() > 1.0 {
                let v = spec.vectors.column(i).clone_owned();
                let sign = l.signum();
                let k: Vec<f64> = basis
                    .iter()
                    .map(|b| sign * (v.adjoint() * b * &v)[(0, 0)].re)
                    .collect();
                let mut row = k.clone();
                row.push(0.0);
                base.leq(row, 1.0 + bound * k.iter().sum::<f64>());
            }
        }
    }
    let (xi, achieved) = best.expect("at least one LP round");
    Ok((
        xi,
        LetterSolve {
            relaxed,
            achieved,
            rounds,
        },
    ))
}

/// Enforces `Tr W_x A = 0` exactly by an identity shift, then rescales into
/// the unit operator-norm ball.
fn finalize(w: &Channel, x: usize, a: Hermitian) -> Hermitian {
    let shifted = a.shift(-a.expectation(w.state(x)));
    let norm = shifted.op_norm();
    if norm > 1.0 {
        shifted.scale(1.0 / norm)
    } else {
        shifted
    }
}

fn margin_of(w: &Channel, x: usize, xi: &Hermitian) -> f64 {
    w.states()
        .iter()
        .enumerate()
        .filter(|&(y, _)| y != x)
        .map(|(_, s)| -xi.expectation(s))
        .fold(f64::INFINITY, f64::min)
}

/// Recomputed separator conditions.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatorCheck {
    /// `|Tr W_x Ξ_x|` per letter.
    pub cs1_residuals: Vec<f64>,
    pub cs1_ok: bool,
    pub zeta1: f64,
    pub zeta2: f64,
    pub cs2_ok: bool,
    pub zeta1_matches: bool,
    pub zeta2_matches: bool,
    /// `ζ₁ε₂/2 − ε₁`.
    pub lemma_margin: f64,
    pub lemma_ok: bool,
    pub max_op_norm: f64,
}

impl SeparatorCheck {
    pub fn all_ok(&self) -> bool {
        self.cs1_ok && self.cs2_ok && self.zeta1_matches && self.zeta2_matches && self.lemma_ok
    }
}

pub fn verify_separators(w: &Channel, fam: &SeparatorFamily) -> Result<SeparatorCheck> {
    Error::check_dim(w.len(), fam.xis.len())?;
    let cs1: Vec<f64> = fam
        .xis
        .iter()
        .zip(w.states())
        .map(|(xi, s)| xi.expectation(s).abs())
        .collect();
    let z1 = zeta1(w, &fam.xis);
    let z2 = zeta2(w, &fam.xis);
    let margin = z1 * fam.epsilon2 / 2.0 - fam.epsilon1;
    Ok(SeparatorCheck {
        cs1_ok: cs1.iter().all(|&r| r <= 1e-9),
        cs1_residuals: cs1,
        cs2_ok: z1 > 0.0,
        zeta1_matches: (z1 - fam.zeta1).abs() <= 1e-10 || z1 == fam.zeta1,
        zeta2_matches: (z2 - fam.zeta2).abs() <= 1e-9,
        zeta1: z1,
        zeta2: z2,
        lemma_margin: margin,
        lemma_ok: margin > 0.0,
        max_op_norm: fam.xis.iter().map(|x| x.op_norm()).fold(0.0, f64::max),
    })
}

#[cfg(test)]
fn trace_norm_of(m: &CMatrix<f64>) -> f64 {
    crate::quantum::trace_norm(&HermitianOperator::from_matrix_unchecked(m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random, DensityMatrix};
    use crate::Density;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn orth() -> Channel {
        Channel::from_states(vec![Density::basis(2, 0).unwrap(), Density::basis(2, 1).unwrap()])
            .unwrap()
    }

    #[test]
    fn orthogonal_pure_closed_form() {
        let w = orth();
        let fam = find_separators(&w).unwrap();
        assert!((fam.zeta1 - 1.0).abs() < 1e-12);
        // Ξ₀ = diag(0, −1) up to rounding: zero on W₀, −1 on W₁, no variance.
        assert!(fam.zeta2.abs() < 1e-12);
        let check = verify_separators(&w, &fam).unwrap();
        assert!(check.all_ok());
    }

    #[test]
    fn redundant_letter_named() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let a = random::density::<f64>(&mut rng, 2);
        let b = random::density::<f64>(&mut rng, 2);
        let mid = DensityMatrix::mixture(&[0.5, 0.5], &[&a, &b]).unwrap();
        let w = Channel::from_states(vec![a, b, mid]).unwrap();
        match find_separators(&w) {
            Err(Error::Redundant { letter, .. }) => assert_eq!(letter, 2),
            other => panic!("expected redundancy error, got {other:?}"),
        }
    }

    #[test]
    fn zero_family_fails_cs2() {
        let w = orth();
        let fam = SeparatorFamily {
            xis: vec![Hermitian::zeros(2), Hermitian::zeros(2)],
            zeta1: 0.0,
            zeta2: 0.0,
            epsilon1: 0.1,
            epsilon2: 0.5,
        };
        let c = verify_separators(&w, &fam).unwrap();
        assert!(!c.cs2_ok);
        assert_eq!(c.zeta1, 0.0);
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let w = Channel::from_states((0..3).map(|_| random::density::<f64>(&mut rng, 2)).collect())
            .unwrap();
        let fam = find_separators(&w).unwrap();
        for c in [0.5, 2.0] {
            let xis: Vec<Hermitian> = fam.xis.iter().map(|x| x.scale(c)).collect();
            assert!((zeta1(&w, &xis) - c * fam.zeta1).abs() < 1e-12);
            assert!((zeta2(&w, &xis) - c * c * fam.zeta2).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_optimum_matches_dual() {
        // Two letters: max{t : ‖A‖ ≤ 1, Tr W₀A = 0, Tr W₁A ≤ −t} has the dual
        // min_s ‖W₁ − s W₀‖₁.
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..5 {
            let w = Channel::from_states((0..2).map(|_| random::density::<f64>(&mut rng, 2)).collect())
                .unwrap();
            let (fam, solves) = find_separators_with(&w, &SeparatorOptions::default()).unwrap();
            // t* = min_{s ≥ 0} ‖W₁ − s W₀‖₁, convex in s.
            let f = |s: f64| {
                let m = w.state(1).matrix() - w.state(0).matrix() * crate::scalar::C::new(s, 0.0);
                trace_norm_of(&m)
            };
            let (mut lo, mut hi) = (0.0, 1e3);
            for _ in 0..300 {
                let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
                if f(m1) <= f(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let dual = f(0.5 * (lo + hi));
            let t = -fam.xis[0].expectation(w.state(1));
            assert!(t <= dual + 1e-9, "{t} vs {dual}");
            assert!(t >= dual - 1e-6, "{t} vs {dual} {:?}", solves[0]);
        }
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let w = Channel::from_states((0..3).map(|_| random::density::<f64>(&mut rng, 2)).collect())
            .unwrap();
        let u = random::unitary::<f64>(&mut rng, 2);
        let v = w.conjugate_by(&u).unwrap();
        let (_, a) = find_separators_with(&w, &SeparatorOptions::default()).unwrap();
        let (_, b) = find_separators_with(&v, &SeparatorOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.achieved - y.achieved).abs() < 1e-8, "{x:?} {y:?}");
        }
    }

    /// Vertex enumeration of `max t` over `(a, t)` with `|a_i| ≤ 1`,
    /// `p_x·a = 0`, `p_y·a + t ≤ 0`.
    fn classical_oracle(w: &Channel, x: usize) -> f64 {
        let d = w.dim();
        let n = d + 1;
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for i in 0..d {
            for sgn in [1.0, -1.0] {
                let mut r = vec![0.0; n];
                r[i] = sgn;
                rows.push((r, 1.0));
            }
        }
        for y in 0..w.len() {
            if y != x {
                let mut r = w.state(y).diagonal_entries();
                r.push(1.0);
                rows.push((r, 0.0));
            }
        }
        let mut eq = w.state(x).diagonal_entries();
        eq.push(0.0);
        let mut best = f64::NEG_INFINITY;
        let m = rows.len();
        let mut pick = vec![0usize; d];
        fn rec(k: usize, start: usize, m: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if k == pick.len() {
                f(pick);
                return;
            }
            for j in start..m {
                pick[k] = j;
                rec(k + 1, j + 1, m, pick, f);
            }
        }
        rec(0, 0, m, &mut pick, &mut |idx| {
            let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
            let mut b = nalgebra::DVector::<f64>::zeros(n);
            for c in 0..n {
                a[(0, c)] = eq[c];
            }
            for (r, &j) in idx.iter().enumerate() {
                for c in 0..n {
                    a[(r + 1, c)] = rows[j].0[c];
                }
                b[r + 1] = rows[j].1;
            }
            let Some(z) = a.lu().solve(&b) else { return };
            if !z.iter().all(|v| v.is_finite()) {
                return;
            }
            let ok = rows
                .iter()
                .all(|(r, h)| r.iter().zip(z.iter()).map(|(p, q)| p * q).sum::<f64>() <= h + 1e-9);
            if ok {
                best = best.max(z[d]);
            }
        });
        best
    }

    #[test]
    fn classical_matches_vertex_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        for _ in 0..10 {
            let k = rng.random_range(2..4);
            let states: Vec<Density> = (0..k)
                .map(|_| Density::diagonal(&random::simplex(&mut rng, 3)).unwrap())
                .collect();
            let w = Channel::from_states(states).unwrap();
            let (fam, _) = find_separators_with(&w, &SeparatorOptions::default()).unwrap();
            for x in 0..k {
                let best = classical_oracle(&w, x);
                let t = margin_of(&w, x, &fam.xis[x]);
                assert!((t - best).abs() < 1e-9, "letter {x}: {t} vs {best}");
            }
        }
    }

    #[test]
    fn epsilon_validation() {
        let w = orth();
        let fam = find_separators(&w).unwrap();
        assert!((fam.epsilon1 - fam.zeta1 / 8.0).abs() < 1e-15);
        assert!(fam.lemma_margin() > 0.0);
        assert!(fam.clone().with_epsilons(0.5, 0.5).is_err());
        assert!(fam.clone().with_epsilons(0.01, 1.0).is_err());
        assert!(fam.with_epsilons(0.01, 0.1).is_ok());
    }
}
