use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::support_contained;
use crate::error::{Error, Result};
use crate::quantum::{
    symmetrize, CMatrix, CqChannel, DensityMatrix, Distribution, Spectrum,
    SUPPORT_CUTOFF,
};
use crate::scalar::{lit, log2, to_f64, tol, Real, C};

/// Rényi order `α ∈ (1, 2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 1.0 && alpha <= 2.0 {
            Ok(RenyiOrder(alpha))
        } else {
            Err(Error::validation(format!(
                "Renyi order {alpha} outside (1, 2]"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn value<T: Real>(self) -> T {
        lit(self.0)
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        RenyiOrder::new(a)
    }
}

impl From<RenyiOrder> for f64 {
    fn from(a: RenyiOrder) -> f64 {
        a.0
    }
}

/// `Q_α(ρ‖σ) = Tr(σ^{−γ} ρ σ^{−γ})^α` with `γ = (α−1)/2α`, or `+∞` when the
/// support of `ρ` is not inside that of `σ`.
pub fn quasi_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    alpha: RenyiOrder,
) -> Result<T> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    if !support_contained(rho, sigma) {
        return Ok(lit(f64::INFINITY));
    }
    let a: T = alpha.value();
    let gamma = (a - T::one()) / (a + a);
    let cut = lit::<T>(SUPPORT_CUTOFF);
    let s = sigma
        .eigh()
        .apply(|l| if l > cut { l.powf(-gamma) } else { T::zero() });
    let b = symmetrize(&(&s * rho.matrix() * &s));
    let q = Spectrum::of(&b)
        .values
        .into_iter()
        .fold(T::zero(), |acc, l| acc + l.max(T::zero()).powf(a));
    Ok(q)
}

/// Sandwiched Rényi divergence `D̃_α(ρ‖σ)` in bits.
pub fn sandwiched_divergence<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    alpha: RenyiOrder,
) -> Result<T> {
    let q = quasi_entropy(rho, sigma, alpha)?;
    if !q.is_finite() {
        return Ok(q);
    }
    Ok(log2(q) / (alpha.value::<T>() - T::one()))
}

/// Iteration controls for the σ-minimization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once successive objective values (in bits) differ by less.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 500,
            tolerance: 1e-10,
        }
    }
}

/// Input state for the σ-minimization, stored either as a diagonal or as a
/// factor `F` with `ρ = F F†`. Low-rank factors keep tensor powers of pure
/// letters cheap.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFactor<T: Real> {
    Diagonal(Vec<T>),
    Factor(CMatrix<T>),
}

impl<T: Real> StateFactor<T> {
    pub fn from_density(rho: &DensityMatrix<T>) -> Self {
        if rho.is_diagonal() {
            return StateFactor::Diagonal(rho.diagonal_entries());
        }
        let s = rho.eigh();
        let cut = lit::<T>(SUPPORT_CUTOFF);
        let keep: Vec<usize> = (0..s.dim()).filter(|&i| s.values[i] > cut).collect();
        let d = rho.dim();
        StateFactor::Factor(CMatrix::from_fn(d, keep.len(), |r, c| {
            s.vectors[(r, keep[c])] * C::new(s.values[keep[c]].sqrt(), T::zero())
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            StateFactor::Diagonal(p) => p.len(),
            StateFactor::Factor(f) => f.nrows(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        match (self, other) {
            (StateFactor::Diagonal(a), StateFactor::Diagonal(b)) => StateFactor::Diagonal(
                a.iter()
                    .flat_map(|&x| b.iter().map(move |&y| x * y))
                    .collect(),
            ),
            _ => StateFactor::Factor(self.factor().kronecker(&other.factor())),
        }
    }

    /// Factor `F` with `ρ = F F†`.
    pub fn factor(&self) -> CMatrix<T> {
        match self {
            StateFactor::Factor(f) => f.clone(),
            StateFactor::Diagonal(p) => {
                let keep: Vec<usize> = (0..p.len()).filter(|&i| p[i] > T::zero()).collect();
                CMatrix::from_fn(p.len(), keep.len(), |r, c| {
                    if r == keep[c] {
                        C::new(p[r].sqrt(), T::zero())
                    } else {
                        C::new(T::zero(), T::zero())
                    }
                })
            }
        }
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        match self {
            StateFactor::Diagonal(p) => {
                let n = p.len();
                DensityMatrix::from_matrix_unchecked(CMatrix::from_fn(n, n, |r, c| {
                    if r == c {
                        C::new(p[r], T::zero())
                    } else {
                        C::new(T::zero(), T::zero())
                    }
                }))
            }
            StateFactor::Factor(f) => DensityMatrix::from_matrix_unchecked(f * f.adjoint()),
        }
    }
}

/// Minimizer of `Σₓ cₓ Q_α(ρₓ‖σ)` over states `σ`.
#[derive(Clone, Debug)]
pub struct SigmaSolution<T: Real> {
    pub sigma: DensityMatrix<T>,
    /// Minimal weighted sum `Σ cₓ Q_α(ρₓ‖σ*)`.
    pub min_value: T,
    pub iterations: usize,
    /// Largest entry of `T(σ)/Tr T(σ) − σ`, zero at a stationary point.
    pub gap: T,
}

/// Minimizes `Σₓ cₓ Q_α(ρₓ‖σ)` over density operators `σ`.
///
/// The objective is convex in `σ` and stationary exactly when
/// `T(σ) = Σₓ cₓ (σ^{−γ}ρₓσ^{−γ})^α` is proportional to `σ`. Each step moves
/// to the normalized geometric mean `σ #_{1/α} T(σ)`, which is the exact
/// minimizer when everything commutes, and falls back to a damped convex
/// combination whenever the objective fails to decrease.
pub fn minimize_weighted_quasi<T: Real>(
    states: &[StateFactor<T>],
    weights: &[T],
    alpha: RenyiOrder,
    opts: &SolverOptions,
) -> Result<SigmaSolution<T>> {
    Error::check_dim(states.len(), weights.len())?;
    let active: Vec<usize> = (0..states.len())
        .filter(|&i| weights[i] > T::zero())
        .collect();
    if active.is_empty() {
        return Err(Error::validation("all weights are zero"));
    }
    let dim = states[active[0]].dim();
    for &i in &active {
        Error::check_dim(dim, states[i].dim())?;
    }
    let a: T = alpha.value();
    if active
        .iter()
        .all(|&i| matches!(states[i], StateFactor::Diagonal(_)))
    {
        return Ok(classical_solution(states, weights, &active, a, dim));
    }

    // Restrict to the support of Σ cₓ ρₓ.
    let scaled: Vec<CMatrix<T>> = active
        .iter()
        .map(|&i| {
            let c = C::new(weights[i].sqrt(), T::zero());
            states[i].factor().map(|z| z * c)
        })
        .collect();
    let (basis, init) = support_basis(&scaled, dim);
    let r = basis.ncols();
    let factors: Vec<CMatrix<T>> = scaled
        .iter()
        .zip(&active)
        .map(|(f, &i)| {
            let c = C::new(T::one() / weights[i].sqrt(), T::zero());
            (basis.adjoint() * f).map(|z| z * c)
        })
        .collect();
    let c: Vec<T> = active.iter().map(|&i| weights[i]).collect();
    let total = init.iter().fold(T::zero(), |s, &v| s + v);
    let mut sigma = CMatrix::from_fn(r, r, |i, j| {
        if i == j {
            C::new(init[i] / total, T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    });

    let to_bits = |f: T| log2(f) / (a - T::one());
    let mut cur = evaluate(&sigma, &factors, &c, a);
    let tol_bits = tol::<T>(opts.tolerance);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let proposal = geometric_step(&sigma, &cur.t, a);
        let mut next = None;
        let mut step = T::one();
        for _ in 0..40 {
            let cand = if step == T::one() {
                proposal.clone()
            } else {
                let s = C::new(step, T::zero());
                let s1 = C::new(T::one() - step, T::zero());
                sigma.map(|z| z * s1) + proposal.map(|z| z * s)
            };
            let ev = evaluate(&cand, &factors, &c, a);
            if ev.f <= cur.f {
                next = Some((cand, ev));
                break;
            }
            step *= lit(0.5);
        }
        let Some((cand, ev)) = next else {
            // No representable decrease left.
            converged = true;
            break;
        };
        let delta = (to_bits(cur.f) - to_bits(ev.f)).abs();
        sigma = cand;
        cur = ev;
        if delta < tol_bits {
            converged = true;
            break;
        }
    }
    let gap = stationarity_gap(&sigma, &cur.t);
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            best_value: to_f64(to_bits(cur.f)),
            gap: to_f64(gap),
        });
    }
    let full = symmetrize(&(&basis * &sigma * basis.adjoint()));
    Ok(SigmaSolution {
        sigma: DensityMatrix::from_matrix_unchecked(full),
        min_value: cur.f,
        iterations,
        gap,
    })
}

fn classical_solution<T: Real>(
    states: &[StateFactor<T>],
    weights: &[T],
    active: &[usize],
    a: T,
    dim: usize,
) -> SigmaSolution<T> {
    let mut acc = vec![T::zero(); dim];
    for &i in active {
        if let StateFactor::Diagonal(p) = &states[i] {
            for (s, &pi) in acc.iter_mut().zip(p) {
                if pi > T::zero() {
                    *s += weights[i] * pi.powf(a);
                }
            }
        }
    }
    let roots: Vec<T> = acc.iter().map(|&v| v.powf(T::one() / a)).collect();
    let z = roots.iter().fold(T::zero(), |s, &v| s + v);
    let probs: Vec<T> = roots.iter().map(|&v| v / z).collect();
    SigmaSolution {
        sigma: StateFactor::Diagonal(probs).to_density(),
        min_value: z.powf(a),
        iterations: 0,
        gap: T::zero(),
    }
}

/// Orthonormal basis of the span of the factor columns, with the initial
/// diagonal `Σ cₓρₓ` expressed in that basis.
fn support_basis<T: Real>(scaled: &[CMatrix<T>], dim: usize) -> (CMatrix<T>, Vec<T>) {
    let k: usize = scaled.iter().map(|f| f.ncols()).sum();
    let mut g = CMatrix::zeros(dim, k);
    let mut col = 0;
    for f in scaled {
        g.view_mut((0, col), (dim, f.ncols())).copy_from(f);
        col += f.ncols();
    }
    if k < dim {
        // Eigen-decompose the small Gram matrix G†G instead of GG†.
        let s = Spectrum::of(&symmetrize(&(g.adjoint() * &g)));
        let cut = lit::<T>(SUPPORT_CUTOFF) * s.max().max(T::one());
        let keep: Vec<usize> = (0..k).filter(|&i| s.values[i] > cut).collect();
        let mut basis = CMatrix::zeros(dim, keep.len());
        for (j, &i) in keep.iter().enumerate() {
            let v = &g * s.vectors.column(i);
            let norm = C::new(T::one() / s.values[i].sqrt(), T::zero());
            basis.column_mut(j).copy_from(&v.map(|z| z * norm));
        }
        let vals = keep.iter().map(|&i| s.values[i]).collect();
        (orthonormalize(basis), vals)
    } else {
        let s = Spectrum::of(&symmetrize(&(&g * g.adjoint())));
        let cut = lit::<T>(SUPPORT_CUTOFF) * s.max().max(T::one());
        let keep: Vec<usize> = (0..dim).filter(|&i| s.values[i] > cut).collect();
        let basis = CMatrix::from_fn(dim, keep.len(), |r, c| s.vectors[(r, keep[c])]);
        (basis, keep.iter().map(|&i| s.values[i]).collect())
    }
}

/// One Gram–Schmidt pass to remove rounding drift from a near-orthonormal set.
fn orthonormalize<T: Real>(mut b: CMatrix<T>) -> CMatrix<T> {
    for j in 0..b.ncols() {
        for i in 0..j {
            let proj = b.column(i).dotc(&b.column(j));
            let ci = b.column(i).clone_owned();
            b.column_mut(j).axpy(-proj, &ci, C::new(T::one(), T::zero()));
        }
        let n = b.column(j).norm_squared().sqrt();
        b.column_mut(j).scale_mut(T::one() / n);
    }
    b
}

struct Evaluation<T: Real> {
    f: T,
    t: CMatrix<T>,
}

/// Objective value and `T(σ)` for a full-rank `σ` on the support.
fn evaluate<T: Real>(sigma: &CMatrix<T>, factors: &[CMatrix<T>], c: &[T], a: T) -> Evaluation<T> {
    let gamma = (a - T::one()) / (a + a);
    let s = Spectrum::of(sigma);
    let floor = lit::<T>(1e-30);
    let neg = s.apply(|l| l.max(floor).powf(-gamma));
    let terms: Vec<(T, CMatrix<T>)> = if factors.len() >= 8 {
        factors
            .par_iter()
            .map(|f| term(&neg, f, a))
            .collect()
    } else {
        factors.iter().map(|f| term(&neg, f, a)).collect()
    };
    let r = sigma.nrows();
    let mut f = T::zero();
    let mut t = CMatrix::zeros(r, r);
    for ((q, tm), &cx) in terms.into_iter().zip(c) {
        f += cx * q;
        t += tm.map(|z| z * C::new(cx, T::zero()));
    }
    Evaluation {
        f,
        t: symmetrize(&t),
    }
}

/// `(Q_α, (BB†)^α)` for `B = σ^{−γ} F`.
fn term<T: Real>(neg: &CMatrix<T>, f: &CMatrix<T>, a: T) -> (T, CMatrix<T>) {
    let b = neg * f;
    let pos = |l: T| l.max(T::zero());
    if b.ncols() < b.nrows() {
        let s = Spectrum::of(&symmetrize(&(b.adjoint() * &b)));
        let q = s.values.iter().fold(T::zero(), |acc, &l| acc + pos(l).powf(a));
        let mid = s.apply(|l| {
            if l > T::zero() {
                l.powf(a - T::one())
            } else {
                T::zero()
            }
        });
        (q, &b * mid * b.adjoint())
    } else {
        let s = Spectrum::of(&symmetrize(&(&b * b.adjoint())));
        let q = s.values.iter().fold(T::zero(), |acc, &l| acc + pos(l).powf(a));
        (q, s.apply(|l| pos(l).powf(a)))
    }
}

/// Normalized `σ #_{1/α} T = σ^{1/2} (σ^{−1/2} T σ^{−1/2})^{1/α} σ^{1/2}`.
fn geometric_step<T: Real>(sigma: &CMatrix<T>, t: &CMatrix<T>, a: T) -> CMatrix<T> {
    let s = Spectrum::of(sigma);
    let floor = lit::<T>(1e-30);
    let half = lit::<T>(0.5);
    let sq = s.apply(|l| l.max(T::zero()).powf(half));
    let isq = s.apply(|l| l.max(floor).powf(-half));
    let mid = symmetrize(&(&isq * t * &isq));
    let midp = Spectrum::of(&mid).apply(|l| l.max(T::zero()).powf(T::one() / a));
    let out = symmetrize(&(&sq * midp * &sq));
    let tr = (0..out.nrows()).fold(T::zero(), |acc, i| acc + out[(i, i)].re);
    out.map(|z| z * C::new(T::one() / tr, T::zero()))
}

fn stationarity_gap<T: Real>(sigma: &CMatrix<T>, t: &CMatrix<T>) -> T {
    let tr = (0..t.nrows()).fold(T::zero(), |acc, i| acc + t[(i, i)].re);
    let diff = t.map(|z| z * C::new(T::one() / tr, T::zero())) - sigma;
    diff.iter()
        .fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
}

/// Solution of the conditional-entropy minimization together with
/// `H̃_α(X|Y) = −(1/(α−1)) log min_σ Σₓ P(x)^α Q_α(Wₓ‖σ)`.
pub fn min_sigma_conditional<T: Real>(
    w: &CqChannel<T>,
    p: &Distribution<T>,
    alpha: RenyiOrder,
) -> Result<(SigmaSolution<T>, T)> {
    Error::check_dim(w.len(), p.len())?;
    let a: T = alpha.value();
    let states: Vec<StateFactor<T>> = w.states().iter().map(StateFactor::from_density).collect();
    let weights: Vec<T> = p.probs().iter().map(|&q| q.powf(a)).collect();
    let sol = minimize_weighted_quasi(&states, &weights, alpha, &SolverOptions::default())?;
    let h = -log2(sol.min_value) / (a - T::one());
    Ok((sol, h))
}

/// Minimizer `σ_{P,α}` and value of `Ĩ_α = (1/(α−1)) log min_σ Σₓ P(x) Q_α(Wₓ‖σ)`.
pub fn sandwiched_mutual_info_solution<T: Real>(
    w: &CqChannel<T>,
    p: &Distribution<T>,
    alpha: RenyiOrder,
) -> Result<(SigmaSolution<T>, T)> {
    Error::check_dim(w.len(), p.len())?;
    let a: T = alpha.value();
    let states: Vec<StateFactor<T>> = w.states().iter().map(StateFactor::from_density).collect();
    let sol = minimize_weighted_quasi(&states, p.probs(), alpha, &SolverOptions::default())?;
    let i = (log2(sol.min_value) / (a - T::one())).max(T::zero());
    Ok((sol, i))
}

/// Nonnegative sandwiched Rényi mutual information `min_σ D̃_α(𝐖×P‖P⊗σ)`.
pub fn sandwiched_mutual_info<T: Real>(
    w: &CqChannel<T>,
    p: &Distribution<T>,
    alpha: RenyiOrder,
) -> Result<T> {
    sandwiched_mutual_info_solution(w, p, alpha).map(|(_, i)| i)
}
