use serde::{Deserialize, Serialize};

use super::conditional_entropy;
use crate::error::{Error, Result};
use crate::quantum::{hermitian_trace_product, von_neumann_entropy, CqChannel, Distribution};
use crate::scalar::{lit, log2, to_f64, tol, Real};

/// Result of maximizing `H(X|Y)_P` over input distributions.
#[derive(Clone, Debug)]
pub struct CapacityResult<T: Real> {
    pub value: T,
    pub argmax: Distribution<T>,
    pub iterations: usize,
    /// `max_x g_x − Σ P(x) g_x` at the returned point; an upper bound on the
    /// distance to the optimal value by concavity.
    pub certificate_gap: T,
    /// False when the iteration cap was reached before the gap target.
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    pub max_iterations: usize,
    pub gap_tolerance: f64,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            max_iterations: 10_000,
            gap_tolerance: 1e-7,
        }
    }
}

/// Gradient of `P ↦ H(X|Y)_P` extended to unnormalized weights:
/// `g_x = S(W_x) + Tr[W_x log W_P] − log P(x)`.
///
/// Letters with `P(x) = 0` get `+∞`.
pub fn conditional_entropy_gradient<T: Real>(w: &CqChannel<T>, p: &Distribution<T>) -> Result<Vec<T>> {
    Error::check_dim(w.len(), p.len())?;
    let avg = w.average(p)?;
    let cut = lit::<T>(crate::quantum::SUPPORT_CUTOFF);
    let log_avg = avg
        .eigh()
        .apply(|l| if l > cut { log2(l) } else { T::zero() });
    Ok(w
        .states()
        .iter()
        .zip(p.probs())
        .map(|(s, &px)| {
            if px <= T::zero() {
                lit(f64::INFINITY)
            } else {
                von_neumann_entropy(s) + hermitian_trace_product(s.matrix(), &log_avg) - log2(px)
            }
        })
        .collect())
}

/// Commitment capacity `max_P H(X|Y)_P` with default options.
pub fn capacity<T: Real>(w: &CqChannel<T>) -> Result<CapacityResult<T>> {
    capacity_with(w, &CapacityOptions::default())
}

/// Exponentiated-gradient ascent on the simplex with Armijo backtracking,
/// started at the uniform distribution.
pub fn capacity_with<T: Real>(w: &CqChannel<T>, opts: &CapacityOptions) -> Result<CapacityResult<T>> {
    let k = w.len();
    let mut p = Distribution::uniform(k)?;
    let mut f = conditional_entropy(w, &p)?;
    let mut step = T::one();
    let armijo = lit::<T>(1e-4);
    let gap_tol = tol::<T>(opts.gap_tolerance);
    let mut iterations = 0;
    loop {
        let g = conditional_entropy_gradient(w, &p)?;
        let mean = dot(p.probs(), &g);
        let gap = g.iter().fold(lit::<T>(f64::NEG_INFINITY), |m, &v| m.max(v)) - mean;
        if gap < gap_tol || k == 1 {
            return Ok(CapacityResult {
                value: f,
                argmax: p,
                iterations,
                certificate_gap: gap.max(T::zero()),
                certified: true,
            });
        }
        if iterations >= opts.max_iterations {
            return Ok(CapacityResult {
                value: f,
                argmax: p,
                iterations,
                certificate_gap: gap,
                certified: false,
            });
        }
        iterations += 1;
        let gmax = g.iter().fold(lit::<T>(f64::NEG_INFINITY), |m, &v| m.max(v));
        let mut accepted = false;
        for _ in 0..60 {
            let weights: Vec<T> = p
                .probs()
                .iter()
                .zip(&g)
                .map(|(&q, &gx)| q * (step * (gx - gmax)).exp())
                .collect();
            let cand = Distribution::from_weights(weights)?;
            let fc = conditional_entropy(w, &cand)?;
            let lin: T = cand
                .probs()
                .iter()
                .zip(p.probs())
                .zip(&g)
                .fold(T::zero(), |acc, ((&a, &b), &gx)| acc + (a - b) * gx);
            if fc >= f + armijo * lin {
                p = cand;
                f = fc;
                accepted = true;
                step *= lit(2.0);
                break;
            }
            step *= lit(0.5);
        }
        if !accepted {
            // The line search cannot make progress at working precision.
            return Ok(CapacityResult {
                value: f,
                argmax: p,
                iterations,
                certificate_gap: gap,
                certified: to_f64(gap) < 10.0 * opts.gap_tolerance,
            });
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}
