//! Dense two-phase simplex method for small linear programs
//! `max cᵀx  s.t.  Ax ≤ b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule, which cannot cycle. Problem sizes here are a
//! few dozen columns and at most a few thousand rows.

const PIVOT_EPS: f64 = 1e-11;

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row · x ≤ rhs`.
    pub fn leq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.vars(), "constraint width");
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds `row · x = rhs` as two inequalities.
    pub fn eq(&mut self, row: Vec<f64>, rhs: f64) {
        let neg = row.iter().map(|v| -v).collect();
        self.leq(row, rhs);
        self.leq(neg, -rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::new(self).solve(&self.objective)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// `m` constraint rows of width `n + m + 2` (variables, slacks, auxiliary,
    /// right-hand side).
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.vars();
        let w = n + m + 2;
        let t = lp
            .rows
            .iter()
            .zip(&lp.rhs)
            .enumerate()
            .map(|(i, (row, &b))| {
                let mut r = vec![0.0; w];
                r[..n].copy_from_slice(row);
                r[n + i] = 1.0;
                r[n + m] = -1.0;
                r[w - 1] = b;
                r
            })
            .collect();
        Tableau {
            m,
            n,
            t,
            basis: (0..m).map(|i| n + i).collect(),
        }
    }

    fn aux(&self) -> usize {
        self.n + self.m
    }

    fn rhs(&self) -> usize {
        self.n + self.m + 1
    }

    fn pivot(&mut self, row: usize, col: usize, obj: &mut [f64]) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pr = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != 0.0 {
                    for (v, &q) in r.iter_mut().zip(&pr) {
                        *v -= f * q;
                    }
                    r[col] = 0.0;
                }
            }
        }
        let f = obj[col];
        if f != 0.0 {
            for (v, &q) in obj.iter_mut().zip(&pr) {
                *v -= f * q;
            }
            obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule on `obj` (reduced costs; last entry is minus the
    /// objective value). Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [f64], allowed: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(col) = (0..allowed).find(|&j| obj[j] > PIVOT_EPS) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][rhs] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return false,
                Some((row, _)) => self.pivot(row, col, obj),
            }
        }
    }

    fn solve(mut self, c: &[f64]) -> LpOutcome {
        let width = self.rhs() + 1;
        let rhs = self.rhs();
        let aux = self.aux();
        let most_negative = (0..self.m)
            .filter(|&i| self.t[i][rhs] < 0.0)
            .min_by(|&a, &b| self.t[a][rhs].total_cmp(&self.t[b][rhs]));
        if let Some(row) = most_negative {
            // Phase one: maximize −x₀.
            let mut obj = vec![0.0; width];
            obj[aux] = -1.0;
            self.pivot(row, aux, &mut obj);
            self.optimize(&mut obj, aux + 1);
            if -obj[rhs] < -1e-9 {
                return LpOutcome::Infeasible;
            }
            if let Some(r) = self.basis.iter().position(|&b| b == aux) {
                if let Some(col) = (0..aux).find(|&j| self.t[r][j].abs() > PIVOT_EPS) {
                    let mut dummy = vec![0.0; width];
                    self.pivot(r, col, &mut dummy);
                }
            }
        }
        for r in self.t.iter_mut() {
            r[aux] = 0.0;
        }
        let mut obj = vec![0.0; width];
        obj[..self.n].copy_from_slice(c);
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.n && c[b] != 0.0 {
                let f = c[b];
                for (v, &q) in obj.iter_mut().zip(&self.t[i]) {
                    *v -= f * q;
                }
                obj[b] = 0.0;
            }
        }
        if !self.optimize(&mut obj, aux) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.t[i][rhs];
            }
        }
        let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
