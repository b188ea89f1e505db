use nalgebra::{DMatrix, DVector};

use crate::quantum::{hermitian_trace_product, CqChannel};
use crate::scalar::{lit, tol, Real};

/// A letter is redundant when its squared Hilbert–Schmidt distance to the
/// hull of the other outputs is at or below this.
pub const NR_THRESHOLD: f64 = 1e-8;

/// Per-letter distances to the convex hull of the remaining outputs.
#[derive(Clone, Debug)]
pub struct NrReport<T: Real> {
    /// `min_q ‖W_x − Σ_{x′≠x} q(x′) W_{x′}‖₂²`; `+∞` for a one-letter channel.
    pub margins: Vec<T>,
    /// Mixture weights attaining each margin (indexed over the full alphabet).
    pub weights: Vec<Vec<T>>,
    pub holds: bool,
}

impl<T: Real> NrReport<T> {
    /// First letter whose margin is at or below the threshold.
    pub fn first_redundant(&self) -> Option<usize> {
        let thr = lit::<T>(NR_THRESHOLD);
        self.margins.iter().position(|&m| m <= thr)
    }
}

/// Non-redundancy check: each margin is the optimum of a simplex-constrained
/// least-squares problem in the Gram matrix of the outputs, solved by
/// accelerated projected gradient until the Frank–Wolfe gap drops below
/// `1e-10`.
pub fn check_nr<T: Real>(w: &CqChannel<T>) -> NrReport<T> {
    let k = w.len();
    let gram = DMatrix::<T>::from_fn(k, k, |a, b| {
        hermitian_trace_product(w.state(a).matrix(), w.state(b).matrix())
    });
    let mut margins = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for x in 0..k {
        if k == 1 {
            margins.push(lit(f64::INFINITY));
            weights.push(vec![T::zero()]);
            continue;
        }
        let others: Vec<usize> = (0..k).filter(|&j| j != x).collect();
        let g = DMatrix::from_fn(others.len(), others.len(), |a, b| gram[(others[a], others[b])]);
        let b = DVector::from_iterator(others.len(), others.iter().map(|&j| gram[(x, j)]));
        let (q, val) = simplex_qp(&g, &b, gram[(x, x)]);
        let mut full = vec![T::zero(); k];
        for (i, &j) in others.iter().enumerate() {
            full[j] = q[i];
        }
        margins.push(val.max(T::zero()));
        weights.push(full);
    }
    let thr = lit::<T>(NR_THRESHOLD);
    let holds = margins.iter().all(|&m| m > thr);
    NrReport {
        margins,
        weights,
        holds,
    }
}

/// Minimizes `qᵀGq − 2bᵀq + c` over the probability simplex.
fn simplex_qp<T: Real>(g: &DMatrix<T>, b: &DVector<T>, c: T) -> (Vec<T>, T) {
    let n = b.len();
    let f = |q: &DVector<T>| (q.transpose() * g * q)[(0, 0)] - lit::<T>(2.0) * b.dot(q) + c;
    let two = lit::<T>(2.0);
    // Lipschitz constant of the gradient 2(Gq − b).
    let lip = two * g.iter().fold(T::zero(), |m, &v| m + v.abs()).max(tol::<T>(1e-12));
    let mut q = DVector::from_element(n, T::one() / lit::<T>(n as f64));
    let mut y = q.clone();
    let mut t = T::one();
    let gap_tol = tol::<T>(1e-10);
    let mut best = (q.clone(), f(&q));
    for _ in 0..200_000 {
        let grad = (g * &y - b) * two;
        let next = project_simplex(&(&y - grad / lip));
        let tn = (T::one() + (T::one() + lit::<T>(4.0) * t * t).sqrt()) / two;
        let momentum = (t - T::one()) / tn;
        let fn_ = f(&next);
        // Restart momentum when the objective goes up.
        if fn_ > best.1 {
            y = best.0.clone();
            t = T::one();
        } else {
            y = &next + (&next - &q) * momentum;
            t = tn;
        }
        q = next;
        if fn_ <= best.1 {
            best = (q.clone(), fn_);
        }
        let gq = (g * &best.0 - b) * two;
        let min = gq.iter().fold(lit::<T>(f64::INFINITY), |m, &v| m.min(v));
        if gq.dot(&best.0) - min < gap_tol {
            break;
        }
    }
    (best.0.iter().copied().collect(), best.1)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex<T: Real>(v: &DVector<T>) -> DVector<T> {
    let mut u: Vec<T> = v.iter().copied().collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = T::zero();
    let mut theta = T::zero();
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let th = (css - T::one()) / lit::<T>((i + 1) as f64);
        if ui - th > T::zero() {
            theta = th;
        }
    }
    v.map(|x| (x - theta).max(T::zero()))
}
