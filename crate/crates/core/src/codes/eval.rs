use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Code, Verifier};
use crate::error::{Error, Result};
use crate::info::{minimize_weighted_quasi, RenyiOrder, SolverOptions, StateFactor};
use crate::quantum::{kron_all, tensor_power_state, trace_norm, Budget, CMatrix, HermitianOperator, Spectrum};
use crate::scalar::C;
use crate::Channel;

/// Honest rejection probabilities `ε_{A,m} = 1 − Tr[W_{φ(m)} Π_m]`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsA {
    pub max: f64,
    pub average: f64,
    pub per_row: Vec<f64>,
}

pub fn eval_eps_a(ver: &Verifier) -> EpsA {
    let per_row: Vec<f64> = (0..ver.len())
        .into_par_iter()
        .map(|m| 1.0 - ver.accept_prob(&ver.codewords()[m], m))
        .collect();
    let max = per_row.iter().copied().fold(0.0, f64::max);
    let average = if per_row.is_empty() {
        0.0
    } else {
        per_row.iter().sum::<f64>() / per_row.len() as f64
    };
    EpsA { max, average, per_row }
}

/// Largest second-highest acceptance over input words.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaC {
    pub value: f64,
    /// Maximizing input word.
    pub word: Vec<usize>,
    /// Codeword rows with the two highest acceptances on `word`.
    pub reveals: [usize; 2],
    /// Set when words were sampled instead of enumerated.
    pub approximate: bool,
    /// Fraction of `𝒳ⁿ` examined (with repetition when sampled).
    pub coverage: f64,
}

pub fn word_of(index: u64, alphabet: usize, n: usize) -> Vec<usize> {
    let mut w = vec![0; n];
    let mut r = index;
    for i in (0..n).rev() {
        w[i] = (r % alphabet as u64) as usize;
        r /= alphabet as u64;
    }
    w
}

/// `(second, best row, second row)` of the acceptance profile of `word`.
pub(crate) fn top_two(ver: &Verifier, word: &[usize]) -> (f64, usize, usize) {
    let (mut b1, mut i1) = (f64::NEG_INFINITY, 0);
    let (mut b2, mut i2) = (f64::NEG_INFINITY, 0);
    for m in 0..ver.len() {
        let a = ver.accept_prob(word, m);
        if a > b1 {
            (b2, i2) = (b1, i1);
            (b1, i1) = (a, m);
        } else if a > b2 {
            (b2, i2) = (a, m);
        }
    }
    (b2, i1, i2)
}

fn better(a: (f64, u64, usize, usize), b: (f64, u64, usize, usize)) -> (f64, u64, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exhaustive `δ_C`; zero when fewer than two codewords exist.
pub fn eval_delta_c(ver: &Verifier, budget: &Budget) -> Result<DeltaC> {
    let k = ver.alphabet();
    let n = ver.n();
    let total = budget.enumeration(k, n).map_err(|e| match e {
        Error::Resource { what, required, allowed } => Error::Resource {
            what: format!("{what} (use sampled evaluation)"),
            required,
            allowed,
        },
        other => other,
    })?;
    if ver.len() < 2 {
        return Ok(DeltaC {
            value: 0.0,
            word: vec![0; n],
            reveals: [0, 0],
            approximate: false,
            coverage: 1.0,
        });
    }
    let best = (0..total)
        .into_par_iter()
        .map(|i| {
            let (v, a, b) = top_two(ver, &word_of(i, k, n));
            (v, i, a, b)
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX, 0, 0), better);
    Ok(DeltaC {
        value: best.0,
        word: word_of(best.1, k, n),
        reveals: [best.2, best.3],
        approximate: false,
        coverage: 1.0,
    })
}

/// `δ_C` over uniformly sampled input words; a lower estimate.
pub fn eval_delta_c_sampled(ver: &Verifier, samples: usize, seed: u64) -> DeltaC {
    let k = ver.alphabet();
    let n = ver.n();
    let space = (k as f64).powi(n as i32);
    if ver.len() < 2 || samples == 0 {
        return DeltaC {
            value: 0.0,
            word: vec![0; n],
            reveals: [0, 0],
            approximate: true,
            coverage: 0.0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<usize>> = (0..samples)
        .map(|_| (0..n).map(|_| rng.random_range(0..k)).collect())
        .collect();
    let best = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (v, a, b) = top_two(ver, &words[i]);
            (v, i as u64, a, b)
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX, 0, 0), better);
    DeltaC {
        value: best.0,
        word: words[best.1 as usize].clone(),
        reveals: [best.2, best.3],
        approximate: true,
        coverage: (samples as f64 / space).min(1.0),
    }
}

/// Largest distance between message-averaged output states.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaB {
    /// Full trace norm `‖ρ_m − ρ_{m′}‖₁`.
    pub value: f64,
    /// Trace distance, `value / 2`.
    pub half: f64,
    pub pair: [usize; 2],
}

/// `max_{m,m′} ‖ρ_m − ρ_{m′}‖₁` with `ρ_m = (1/𝖫) Σ_l W⁽ⁿ⁾_{φ(m,l)}`.
///
/// When the stacked rank of two messages is below `dimⁿ`, the difference
/// `V S V†` is evaluated through its Gram form `G^{1/2} S G^{1/2}`, whose
/// entries factor over positions.
pub fn eval_delta_b(code: &Code, w: &Channel, budget: &Budget) -> Result<DeltaB> {
    Error::check_dim(w.len(), code.alphabet)?;
    let factors: Vec<CMatrix<f64>> = w.states().iter().map(|s| StateFactor::from_density(s).factor()).collect();
    let ranks: Vec<usize> = factors.iter().map(|f| f.ncols()).collect();
    let grams: Vec<Vec<CMatrix<f64>>> = factors
        .iter()
        .map(|a| factors.iter().map(|b| a.adjoint() * b).collect())
        .collect();
    let dim = (w.dim() as u128).saturating_pow(code.n as u32);
    let word_rank = |r: &[usize]| r.iter().map(|&x| ranks[x] as u128).product::<u128>();
    let msg_rank: Vec<u128> = (0..code.messages)
        .map(|m| (0..code.randomness).map(|l| word_rank(code.row(m, l))).sum())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..code.messages)
        .flat_map(|a| (a + 1..code.messages).map(move |b| (a, b)))
        .collect();
    let dense_needed = pairs.iter().any(|&(a, b)| msg_rank[a] + msg_rank[b] >= dim);
    let averages: Option<Vec<CMatrix<f64>>> = if dense_needed {
        budget.dense_dim(w.dim(), code.n)?;
        Some(
            (0..code.messages)
                .map(|m| {
                    let mut acc: Option<CMatrix<f64>> = None;
                    for l in 0..code.randomness {
                        let s = tensor_power_state(code.row(m, l), w, budget)?.into_matrix();
                        acc = Some(match acc {
                            Some(a) => a + s,
                            None => s,
                        });
                    }
                    let c = C::new(1.0 / code.randomness as f64, 0.0);
                    Ok(acc.expect("randomness ≥ 1").map(|z| z * c))
                })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            if msg_rank[a] + msg_rank[b] < dim {
                gram_trace_norm(code, &grams, &ranks, a, b)
            } else {
                let avg = averages.as_ref().expect("dense averages");
                trace_norm(&HermitianOperator::from_matrix_unchecked(&avg[a] - &avg[b]))
            }
        })
        .collect();
    let mut best = (0.0, [0, 0]);
    for (&(a, b), &v) in pairs.iter().zip(&values) {
        if v > best.0 {
            best = (v, [a, b]);
        }
    }
    Ok(DeltaB {
        value: best.0,
        half: best.0 / 2.0,
        pair: best.1,
    })
}

fn gram_trace_norm(code: &Code, grams: &[Vec<CMatrix<f64>>], ranks: &[usize], a: usize, b: usize) -> f64 {
    let words: Vec<(&[usize], f64)> = (0..code.randomness)
        .map(|l| (code.row(a, l), 1.0))
        .chain((0..code.randomness).map(|l| (code.row(b, l), -1.0)))
        .collect();
    let sizes: Vec<usize> = words
        .iter()
        .map(|(r, _)| r.iter().map(|&x| ranks[x]).product())
        .collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let mut g = CMatrix::<f64>::zeros(total, total);
    for (i, (ri, _)) in words.iter().enumerate() {
        for (j, (rj, _)) in words.iter().enumerate().skip(i) {
            let blocks: Vec<&CMatrix<f64>> = ri.iter().zip(rj.iter()).map(|(&x, &y)| &grams[x][y]).collect();
            let blk = kron_all(&blocks);
            for r in 0..sizes[i] {
                for c in 0..sizes[j] {
                    g[(offsets[i] + r, offsets[j] + c)] = blk[(r, c)];
                    g[(offsets[j] + c, offsets[i] + r)] = blk[(r, c)].conj();
                }
            }
        }
    }
    let root = Spectrum::of(&g).apply(|l| l.max(0.0).sqrt());
    let scale = 1.0 / code.randomness as f64;
    let signs: Vec<f64> = words
        .iter()
        .zip(&sizes)
        .flat_map(|((_, s), &k)| std::iter::repeat_n(s * scale, k))
        .collect();
    let mid = CMatrix::from_fn(total, total, |r, c| root[(r, c)] * C::new(signs[c], 0.0));
    let k = &mid * &root;
    let k = (&k + k.adjoint()).map(|z| z * C::new(0.5, 0.0));
    Spectrum::of(&k).values.iter().map(|l| l.abs()).sum()
}

/// `E_α = log M̃ − min_σ (1/(α−1)) log Σ_m (1/M̃) 2^{(α−1)D̃_α(W_{φ(m)}‖σ)}`.
pub fn eval_e_alpha(rows: &[Vec<usize>], w: &Channel, alpha: RenyiOrder, budget: &Budget) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::validation("empty pre-code"));
    }
    let n = rows[0].len();
    budget.dense_dim(w.dim(), n)?;
    let letters: Vec<StateFactor<f64>> = w.states().iter().map(StateFactor::from_density).collect();
    let states: Vec<StateFactor<f64>> = rows
        .iter()
        .map(|r| {
            let mut it = r.iter();
            let first = letters[*it.next().expect("n ≥ 1")].clone();
            it.fold(first, |acc, &x| acc.kron(&letters[x]))
        })
        .collect();
    let mt = rows.len() as f64;
    let weights = vec![1.0 / mt; rows.len()];
    let sol = minimize_weighted_quasi(&states, &weights, alpha, &SolverOptions::default())?;
    let e = mt.log2() - sol.min_value.log2() / (alpha.get() - 1.0);
    Ok(e.clamp(0.0, mt.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_verifier;
    use crate::info::min_sigma_conditional;
    use crate::quantum::random;
    use crate::separators::{find_separators, SeparatorFamily};
    use crate::{Density, Dist};

    fn orth() -> Channel {
        Channel::from_states(vec![Density::basis(2, 0).unwrap(), Density::basis(2, 1).unwrap()]).unwrap()
    }

    #[test]
    fn single_codeword_policies() {
        let w = orth();
        let fam = find_separators(&w).unwrap();
        let v = build_verifier(&w, &fam, 3, vec![vec![0, 1, 0]]).unwrap();
        let e = eval_eps_a(&v);
        assert_eq!(e.max, e.average);
        assert_eq!(eval_delta_c(&v, &Budget::default()).unwrap().value, 0.0);
    }

    #[test]
    fn duplicate_codewords_give_full_binding_failure() {
        let w = orth();
        let fam = find_separators(&w).unwrap();
        let v = build_verifier(&w, &fam, 3, vec![vec![0, 1, 0], vec![0, 1, 0]]).unwrap();
        let d = eval_delta_c(&v, &Budget::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        assert_eq!(d.word, vec![0, 1, 0]);
    }

    #[test]
    fn orthogonal_letters_bind_perfectly() {
        // ζ₂ = 0, so the pairwise bound forces δ_C = 0 for distinct codewords.
        let w = orth();
        let fam = find_separators(&w).unwrap().with_epsilons(0.05, 0.3).unwrap();
        let rows = vec![vec![0, 0, 0, 0], vec![1, 1, 0, 0], vec![0, 1, 1, 1]];
        let v = build_verifier(&w, &fam, 4, rows).unwrap();
        assert_eq!(eval_delta_c(&v, &Budget::default()).unwrap().value, 0.0);
        assert_eq!(fam.binding_bound(4), 0.0);
    }

    #[test]
    fn chebyshev_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let w = Channel::from_states((0..2).map(|_| random::density::<f64>(&mut rng, 2)).collect()).unwrap();
            let fam = find_separators(&w).unwrap();
            let fam = SeparatorFamily {
                epsilon1: fam.zeta1 / 16.0,
                ..fam
            };
            let n = 6;
            let cw: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let v = build_verifier(&w, &fam, n, vec![cw.clone()]).unwrap();
            for i in 0..1u64 << n {
                let x = word_of(i, 2, n);
                let d = x.iter().zip(&cw).filter(|(a, b)| a != b).count();
                assert!(v.accept_prob(&x, 0) <= fam.chebyshev_bound(n, d) + 1e-12);
            }
        }
    }

    #[test]
    fn sampled_is_lower_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let w = Channel::from_states((0..2).map(|_| random::density::<f64>(&mut rng, 2)).collect()).unwrap();
        let fam = find_separators(&w).unwrap();
        let rows: Vec<Vec<usize>> = (0..4).map(|_| (0..5).map(|_| rng.random_range(0..2)).collect()).collect();
        let v = build_verifier(&w, &fam, 5, rows).unwrap();
        let exact = eval_delta_c(&v, &Budget::default()).unwrap();
        let s = eval_delta_c_sampled(&v, 20, 1);
        assert!(s.approximate && s.value <= exact.value + 1e-15);
        let tiny = Budget {
            max_enumeration: 8,
            ..Budget::default()
        };
        assert!(matches!(eval_delta_c(&v, &tiny), Err(Error::Resource { .. })));
    }

    #[test]
    fn delta_b_cases() {
        let w = orth();
        let budget = Budget::default();
        // 𝖫 = 1 with orthogonal codeword states.
        let c = Code::new(2, 2, 2, 1, vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert!((eval_delta_b(&c, &w, &budget).unwrap().value - 2.0).abs() < 1e-12);
        // Same multiset for both messages.
        let c = Code::new(2, 2, 2, 2, vec![vec![0, 0], vec![1, 1], vec![1, 1], vec![0, 0]]).unwrap();
        assert!(eval_delta_b(&c, &w, &budget).unwrap().value < 1e-12);
    }

    #[test]
    fn gram_and_dense_delta_b_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let budget = Budget::default();
        // Pure letters take the Gram path; the dense reference is built here.
        let w = Channel::from_states((0..3).map(|_| random::pure::<f64>(&mut rng, 2)).collect()).unwrap();
        let n = 4;
        let rows: Vec<Vec<usize>> = (0..6).map(|_| (0..n).map(|_| rng.random_range(0..3)).collect()).collect();
        let code = Code::new(n, 3, 3, 2, rows).unwrap();
        let got = eval_delta_b(&code, &w, &budget).unwrap();
        let avg = |m: usize| {
            let a = tensor_power_state(code.row(m, 0), &w, &budget).unwrap().into_matrix();
            let b = tensor_power_state(code.row(m, 1), &w, &budget).unwrap().into_matrix();
            (a + b).map(|z| z * C::new(0.5, 0.0))
        };
        let mut want: f64 = 0.0;
        for a in 0..3 {
            for b in a + 1..3 {
                want = want.max(trace_norm(&HermitianOperator::from_matrix_unchecked(avg(a) - avg(b))));
            }
        }
        assert!((got.value - want).abs() < 1e-10, "{} vs {want}", got.value);
        // Mixed letters take the dense path.
        let w = Channel::from_states((0..3).map(|_| random::density::<f64>(&mut rng, 2)).collect()).unwrap();
        let got = eval_delta_b(&code, &w, &budget).unwrap();
        assert!(got.value > 0.0 && got.value <= 2.0);
        assert!((got.half * 2.0 - got.value).abs() < 1e-15);
    }

    #[test]
    fn e_alpha_cases_and_conditional_entropy() {
        let alpha = RenyiOrder::new(1.5).unwrap();
        let budget = Budget::default();
        let w = orth();
        let same = vec![vec![0, 1]; 4];
        assert!((eval_e_alpha(&same, &w, alpha, &budget).unwrap() - 2.0).abs() < 1e-9);
        let distinct = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        assert!(eval_e_alpha(&distinct, &w, alpha, &budget).unwrap().abs() < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let w = Channel::from_states((0..2).map(|_| random::density::<f64>(&mut rng, 2)).collect()).unwrap();
        let rows: Vec<Vec<usize>> = (0..5).map(|_| (0..3).map(|_| rng.random_range(0..2)).collect()).collect();
        let e = eval_e_alpha(&rows, &w, alpha, &budget).unwrap();
        let states: Vec<Density> = rows.iter().map(|r| tensor_power_state(r, &w, &budget).unwrap()).collect();
        let big = Channel::from_states(states).unwrap();
        let (_, h) = min_sigma_conditional(&big, &Dist::uniform(5).unwrap(), alpha).unwrap();
        assert!((e - h).abs() < 1e-8, "{e} vs {h}");
    }

    #[test]
    fn e_alpha_monotone_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let budget = Budget::default();
        let w = Channel::from_states((0..2).map(|_| random::density::<f64>(&mut rng, 2)).collect()).unwrap();
        let rows: Vec<Vec<usize>> = (0..6).map(|_| (0..3).map(|_| rng.random_range(0..2)).collect()).collect();
        let mut prev = f64::INFINITY;
        for a in [1.1, 1.3, 1.5, 1.8, 2.0] {
            let e = eval_e_alpha(&rows, &w, RenyiOrder::new(a).unwrap(), &budget).unwrap();
            assert!(e <= prev + 1e-9);
            prev = e;
        }
    }
}
