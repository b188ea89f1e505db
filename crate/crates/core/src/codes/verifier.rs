use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::quantum::{kron_all, tensor_power_state, Budget, CMatrix, Spectrum};
use crate::scalar::C;
use crate::separators::SeparatorFamily;
use crate::{Channel, Hermitian};

/// Slack on the acceptance threshold, absorbing rounding in eigenvalue sums.
pub const ACCEPT_TOL: f64 = 1e-9;

/// Partial sums closer than this share a DP cell.
const SUM_QUANTUM: f64 = 1e-12;

/// Verifier projections `Π_c = {Ξ⁽ⁿ⁾_c ≥ −nε₁}` for a list of codewords.
///
/// `Ξ⁽ⁿ⁾_c` is diagonal in the product of the letter eigenbases, so the
/// acceptance probability of an input word `x` is the tail probability of a
/// sum of independent eigenvalue draws `Jᵢ ~ ⟨e_{j,cᵢ}|W_{xᵢ}|e_{j,cᵢ}⟩`.
#[derive(Clone, Debug)]
pub struct Verifier {
    n: usize,
    epsilon1: f64,
    letters: Vec<Spectrum<f64>>,
    /// `tables[x][c]`: eigenvalues of `Ξ_c` with their weights under `W_x`.
    tables: Vec<Vec<Vec<(f64, f64)>>>,
    codewords: Vec<Vec<usize>>,
}

pub fn build_verifier(w: &Channel, fam: &SeparatorFamily, n: usize, codewords: Vec<Vec<usize>>) -> Result<Verifier> {
    Error::check_dim(w.len(), fam.xis.len())?;
    for (i, c) in codewords.iter().enumerate() {
        if c.len() != n || c.iter().any(|&x| x >= w.len()) {
            return Err(Error::validation(format!("codeword {i} is not a word of length {n} over the channel alphabet")));
        }
    }
    let letters: Vec<Spectrum<f64>> = fam.xis.iter().map(Hermitian::eigh).collect();
    let tables = w
        .states()
        .iter()
        .map(|s| {
            letters
                .iter()
                .map(|spec| {
                    let mut out: Vec<(f64, f64)> = Vec::new();
                    for (j, &l) in spec.values.iter().enumerate() {
                        let v = spec.vectors.column(j);
                        let q = (v.adjoint() * s.matrix() * v)[(0, 0)].re.max(0.0);
                        match out.last_mut() {
                            Some(last) if (last.0 - l).abs() <= SUM_QUANTUM => last.1 += q,
                            _ => out.push((l, q)),
                        }
                    }
                    out.retain(|&(_, q)| q > 0.0);
                    out
                })
                .collect()
        })
        .collect();
    Ok(Verifier {
        n,
        epsilon1: fam.epsilon1,
        letters,
        tables,
        codewords,
    })
}

impl Verifier {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon1(&self) -> f64 {
        self.epsilon1
    }

    /// `−nε₁`.
    pub fn threshold(&self) -> f64 {
        -(self.n as f64) * self.epsilon1
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn alphabet(&self) -> usize {
        self.letters.len()
    }

    /// Same letter data over a different codeword list.
    pub fn with_codewords(&self, codewords: Vec<Vec<usize>>) -> Result<Verifier> {
        for (i, c) in codewords.iter().enumerate() {
            if c.len() != self.n || c.iter().any(|&x| x >= self.letters.len()) {
                return Err(Error::validation(format!("codeword {i} is not a word of length {}", self.n)));
            }
        }
        Ok(Verifier {
            codewords,
            ..self.clone()
        })
    }

    /// `Tr[W⁽ⁿ⁾_word Π_m]` by dynamic programming over partial eigenvalue sums.
    pub fn accept_prob(&self, word: &[usize], m: usize) -> f64 {
        self.accept_word(word, &self.codewords[m])
    }

    pub(crate) fn accept_word(&self, word: &[usize], cw: &[usize]) -> f64 {
        let n = self.n;
        let thr = self.threshold() - ACCEPT_TOL;
        // Extreme sums still reachable from position i onward.
        let mut lo = vec![0.0; n + 1];
        let mut hi = vec![0.0; n + 1];
        for i in (0..n).rev() {
            let t = &self.tables[word[i]][cw[i]];
            lo[i] = lo[i + 1] + t.first().map_or(0.0, |e| e.0);
            hi[i] = hi[i + 1] + t.last().map_or(0.0, |e| e.0);
        }
        let mut accepted = 0.0;
        let mut cells: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        for i in 0..n {
            let t = &self.tables[word[i]][cw[i]];
            let mut next: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
            for &(s, p) in &cells {
                for &(l, q) in t {
                    let v = s + l;
                    let mass = p * q;
                    if v + lo[i + 1] >= thr {
                        accepted += mass;
                    } else if v + hi[i + 1] >= thr {
                        let e = next.entry((v / SUM_QUANTUM).round() as i64).or_insert((v, 0.0));
                        e.1 += mass;
                    }
                }
            }
            cells = next.into_values().collect();
        }
        accepted.clamp(0.0, 1.0)
    }

    /// Dense `Ξ⁽ⁿ⁾_c = Σᵢ I ⊗ ⋯ ⊗ Ξ_{cᵢ} ⊗ ⋯ ⊗ I`.
    pub fn assemble_xi(&self, fam: &SeparatorFamily, m: usize, budget: &Budget) -> Result<CMatrix<f64>> {
        let d = self.letters.first().map_or(1, Spectrum::dim);
        let dim = budget.dense_dim(d, self.n)?;
        let eye = CMatrix::<f64>::identity(d, d);
        let mut acc = CMatrix::<f64>::zeros(dim, dim);
        for (i, &c) in self.codewords[m].iter().enumerate() {
            let factors: Vec<&CMatrix<f64>> = (0..self.n)
                .map(|j| if j == i { fam.xis[c].matrix() } else { &eye })
                .collect();
            acc += kron_all(&factors);
        }
        Ok(acc)
    }

    /// Dense projector `Π_m` built from the product eigenbasis.
    pub fn dense_projector(&self, m: usize, budget: &Budget) -> Result<CMatrix<f64>> {
        let cw = &self.codewords[m];
        let d = self.letters.first().map_or(1, Spectrum::dim);
        let dim = budget.dense_dim(d, self.n)?;
        let bases: Vec<&CMatrix<f64>> = cw.iter().map(|&c| &self.letters[c].vectors).collect();
        let u = kron_all(&bases);
        let mut sums = vec![0.0];
        for &c in cw {
            sums = sums
                .iter()
                .flat_map(|&s| self.letters[c].values.iter().map(move |&l| s + l))
                .collect();
        }
        let keep: Vec<usize> = (0..dim).filter(|&k| sums[k] >= self.threshold() - ACCEPT_TOL).collect();
        let sel = CMatrix::from_fn(dim, keep.len(), |r, c| u[(r, keep[c])]);
        Ok(&sel * sel.adjoint())
    }

    /// `Tr[W⁽ⁿ⁾_word Π]` for each word against one dense projector.
    pub fn dense_accepts(
        &self,
        w: &Channel,
        words: &[Vec<usize>],
        projector: &CMatrix<f64>,
        budget: &Budget,
    ) -> Result<Vec<f64>> {
        words
            .iter()
            .map(|word| {
                let rho = tensor_power_state(word, w, budget)?;
                Error::check_dim(projector.nrows(), rho.dim())?;
                // Tr[ρΠ] = Σ ρ_ij conj(Π_ij) for Hermitian Π.
                let t: C<f64> = rho
                    .matrix()
                    .iter()
                    .zip(projector.iter())
                    .map(|(a, b)| a * b.conj())
                    .sum();
                Ok(t.re.clamp(0.0, 1.0))
            })
            .collect()
    }
}
