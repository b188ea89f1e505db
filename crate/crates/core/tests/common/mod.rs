//! Reference computations built directly on nalgebra, independent of the
//! library's own spectral helpers.
#![allow(dead_code)]

use cqcommit::quantum::CMatrix;
use cqcommit::scalar::C;

pub fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eigh(m: &CMatrix<f64>) -> (Vec<f64>, CMatrix<f64>) {
    let h = (m + m.adjoint()) * c(0.5);
    let e = h.symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `f(M)` through the spectral decomposition.
pub fn mat_fn(m: &CMatrix<f64>, f: impl Fn(f64) -> f64) -> CMatrix<f64> {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut d = CMatrix::<f64>::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        d[(i, i)] = c(f(v));
    }
    &vecs * d * vecs.adjoint()
}

pub fn trace(m: &CMatrix<f64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `−Tr A log A` for positive semidefinite `A`, not necessarily normalized.
pub fn entropy(m: &CMatrix<f64>) -> f64 {
    eigh(m)
        .0
        .into_iter()
        .filter(|&l| l > 1e-300)
        .map(|l| -l * l.log2())
        .sum()
}

/// `Tr_A` of an operator on `A ⊗ B`.
pub fn trace_out_first(m: &CMatrix<f64>, da: usize, db: usize) -> CMatrix<f64> {
    let mut out = CMatrix::<f64>::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut s = c(0.0);
            for a in 0..da {
                s += m[(a * db + i, a * db + j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// `Tr(σ^{−γ} ρ σ^{−γ})^α`, `γ = (α−1)/2α`, for full-rank `σ`.
pub fn quasi(rho: &CMatrix<f64>, sigma: &CMatrix<f64>, alpha: f64) -> f64 {
    let g = (alpha - 1.0) / (2.0 * alpha);
    let s = mat_fn(sigma, |l| l.powf(-g));
    let mid = &s * rho * &s;
    eigh(&mid).0.into_iter().map(|l| l.max(0.0).powf(alpha)).sum()
}

/// Qubit density matrix from an unconstrained vector mapped into the open
/// Bloch ball.
pub fn bloch(v: &[f64]) -> CMatrix<f64> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let s = if norm > 0.0 { norm.tanh() / norm } else { 1.0 };
    let (x, y, z) = (s * v[0], s * v[1], s * v[2]);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + z)),
            C::new(0.5 * x, -0.5 * y),
            C::new(0.5 * x, 0.5 * y),
            c(0.5 * (1.0 - z)),
        ],
    )
}

/// Nelder–Mead simplex search.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], scale: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if (vals[n] - vals[0]).abs() < 1e-15 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (pts[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let xc = if fr < vals[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    pts[i] = (0..n).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best].clone(), vals[best])
}
