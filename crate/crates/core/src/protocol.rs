//! The non-interactive commitment protocol built from a code and its
//! verifier: Alice sends a codeword through the channel to commit and
//! announces `(m, l)` to reveal, and Bob accepts when `Π_{m,l}` clicks.
//!
//! Bob sends nothing while committing, so passive and active concealing
//! coincide and equal `δ_B` of the code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{build_verifier, eval_delta_b, eval_delta_c, eval_eps_a, top_two, word_of, Code, Verifier};
use crate::error::{Error, Result};
use crate::info::conditional_entropy;
use crate::quantum::Budget;
use crate::scalar::entropy_term;
use crate::separators::SeparatorFamily;
use crate::Channel;

/// Slack when testing `f(m,l) > 1 − δ^{1/3}`.
pub const GOOD_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ProtocolInstance {
    pub code: Code,
    pub verifier: Verifier,
    pub channel: Channel,
}

impl ProtocolInstance {
    pub fn new(channel: Channel, fam: &SeparatorFamily, code: Code) -> Result<Self> {
        Error::check_dim(channel.len(), code.alphabet)?;
        let verifier = build_verifier(&channel, fam, code.n, code.rows.clone())?;
        Ok(ProtocolInstance {
            code,
            verifier,
            channel,
        })
    }

    pub fn n(&self) -> usize {
        self.code.n
    }

    fn row_index(&self, m: usize, l: usize) -> Result<usize> {
        if m >= self.code.messages || l >= self.code.randomness {
            return Err(Error::validation(format!(
                "reveal ({m}, {l}) outside {}×{}",
                self.code.messages, self.code.randomness
            )));
        }
        Ok(m * self.code.randomness + l)
    }

    /// `(m, l)` of a flattened row.
    pub fn reveal_of(&self, row: usize) -> (usize, usize) {
        (row / self.code.randomness, row % self.code.randomness)
    }
}

/// Exact acceptance `Tr[W⁽ⁿ⁾_{φ(m,l)} Π_{m,l}] = 1 − ε_{A,m,l}`.
pub fn honest_acceptance(inst: &ProtocolInstance, m: usize, l: usize) -> Result<f64> {
    let r = inst.row_index(m, l)?;
    Ok(inst.verifier.accept_prob(&inst.code.rows[r], r))
}

/// One sampled verdict of an honest run.
pub fn honest_sample(inst: &ProtocolInstance, m: usize, l: usize, rng: &mut (impl Rng + ?Sized)) -> Result<bool> {
    Ok(rng.random_bool(honest_acceptance(inst, m, l)?))
}

/// Accepted count over `trials` sampled honest runs.
pub fn honest_trials(inst: &ProtocolInstance, m: usize, l: usize, trials: u64, seed: u64) -> Result<u64> {
    let p = honest_acceptance(inst, m, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials).filter(|_| rng.random_bool(p)).count() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reveal {
    pub m: usize,
    pub l: usize,
}

/// Best dishonest reveal `(m′, l′)`, `m′ ≠ m`, after an honest commit to
/// `(m, l)`. `None` with probability 0 for a single-message code.
pub fn passive_cheat_best_reveal(inst: &ProtocolInstance, m: usize, l: usize) -> Result<(Option<Reveal>, f64)> {
    let r = inst.row_index(m, l)?;
    let word = &inst.code.rows[r];
    let mut best: (Option<Reveal>, f64) = (None, 0.0);
    for s in 0..inst.code.rows.len() {
        let (mm, ll) = inst.reveal_of(s);
        if mm == m {
            continue;
        }
        let p = inst.verifier.accept_prob(word, s);
        if best.0.is_none() || p > best.1 {
            best = (Some(Reveal { m: mm, l: ll }), p);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct ActiveCheat {
    pub word: Vec<usize>,
    pub reveals: [Reveal; 2],
    /// Smaller of the two acceptance probabilities.
    pub value: f64,
}

/// Commit-phase input maximizing the second-largest acceptance over all
/// reveals, by exhaustive search over `𝒳ⁿ`.
pub fn active_cheat_best(inst: &ProtocolInstance, budget: &Budget) -> Result<ActiveCheat> {
    let ver = &inst.verifier;
    let total = budget.enumeration(ver.alphabet(), ver.n())?;
    let zero = Reveal { m: 0, l: 0 };
    if ver.len() < 2 {
        return Ok(ActiveCheat {
            word: vec![0; ver.n()],
            reveals: [zero, zero],
            value: 0.0,
        });
    }
    let per_word: Vec<(f64, usize, usize)> = (0..total)
        .into_par_iter()
        .map(|i| top_two(ver, &word_of(i, ver.alphabet(), ver.n())))
        .collect();
    let mut best = 0;
    for (i, t) in per_word.iter().enumerate() {
        if t.0 > per_word[best].0 {
            best = i;
        }
    }
    let (value, a, b) = per_word[best];
    let (ma, la) = inst.reveal_of(a);
    let (mb, lb) = inst.reveal_of(b);
    Ok(ActiveCheat {
        word: word_of(best as u64, ver.alphabet(), ver.n()),
        reveals: [Reveal { m: ma, l: la }, Reveal { m: mb, l: lb }],
        value,
    })
}

/// Decoder `h(x) = argmax_m max_{l ∈ Good(m)} Tr[W⁽ⁿ⁾_x Π_{m,l}]` with
/// `Good(m) = {l : f(m,l) > 1 − δ^{1/3}}`.
#[derive(Clone, Debug, Serialize)]
pub struct FanoReport {
    pub delta: f64,
    pub good: Vec<Vec<usize>>,
    /// Messages with an empty `Good(m)`.
    pub empty_good: Vec<usize>,
    /// `Pr{L ∈ Good(M)}` under uniform `(M, L)`.
    pub good_probability: f64,
    /// `1 − δ^{2/3}`.
    pub good_bound: f64,
    /// `Pr{M ≠ h(Xⁿ)}` for honest `Xⁿ = φ(M, L)`.
    pub error_probability: f64,
    /// `3δ^{1/3}`.
    pub error_bound: f64,
    /// `h` over `𝒳ⁿ` in lexicographic order.
    #[serde(skip)]
    pub table: Vec<usize>,
}

impl FanoReport {
    pub fn holds(&self) -> bool {
        self.empty_good.is_empty()
            && self.error_probability < self.error_bound
            && self.good_probability >= self.good_bound
    }
}

pub fn fano_estimator(inst: &ProtocolInstance, delta: f64, budget: &Budget) -> Result<FanoReport> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::validation(format!("delta = {delta} outside [0, 1]")));
    }
    let ver = &inst.verifier;
    let code = &inst.code;
    let total = budget.enumeration(ver.alphabet(), ver.n())?;
    let cut = 1.0 - delta.cbrt() - GOOD_TOL;
    let good: Vec<Vec<usize>> = (0..code.messages)
        .map(|m| {
            (0..code.randomness)
                .filter(|&l| {
                    let r = m * code.randomness + l;
                    ver.accept_prob(&code.rows[r], r) > cut
                })
                .collect()
        })
        .collect();
    let empty_good: Vec<usize> = (0..code.messages).filter(|&m| good[m].is_empty()).collect();
    let h = |word: &[usize]| -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (m, ls) in good.iter().enumerate() {
            for &l in ls {
                let p = ver.accept_prob(word, m * code.randomness + l);
                if p > best.0 {
                    best = (p, m);
                }
            }
        }
        best.1
    };
    let table: Vec<usize> = (0..total)
        .into_par_iter()
        .map(|i| h(&word_of(i, ver.alphabet(), ver.n())))
        .collect();
    let rows = code.rows.len() as f64;
    let index = |w: &[usize]| w.iter().fold(0usize, |acc, &x| acc * ver.alphabet() + x);
    let errors = (0..code.rows.len())
        .filter(|&r| table[index(&code.rows[r])] != code.message_of(r))
        .count();
    let good_count: usize = good.iter().map(Vec::len).sum();
    Ok(FanoReport {
        delta,
        empty_good,
        good_probability: good_count as f64 / rows,
        good_bound: 1.0 - delta.powf(2.0 / 3.0),
        error_probability: errors as f64 / rows,
        error_bound: 3.0 * delta.cbrt(),
        good,
        table,
    })
}

/// `η(ε) = (ε+1) log(ε+1) − ε log ε`.
pub fn eta(eps: f64) -> f64 {
    -entropy_term(eps + 1.0) + entropy_term(eps)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseCheck {
    pub p_x: Vec<f64>,
    pub conditional_entropy: f64,
    /// `log 𝖬 / n`.
    pub rate: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    /// `(1 − ε − 3δ^{1/3}) R`.
    pub lhs: f64,
    /// `H(X|Y)_{P_X} + (1 + η(ε))/n`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn converse_check(inst: &ProtocolInstance, epsilon: f64, delta: f64) -> Result<ConverseCheck> {
    let p = inst.code.letter_distribution()?;
    let h = conditional_entropy(&inst.channel, &p)?;
    let n = inst.n() as f64;
    let rate = (inst.code.messages as f64).log2() / n;
    let e = eta(epsilon);
    let lhs = (1.0 - epsilon - 3.0 * delta.cbrt()) * rate;
    let rhs = h + (1.0 + e) / n;
    Ok(ConverseCheck {
        p_x: p.probs().to_vec(),
        conditional_entropy: h,
        rate,
        epsilon,
        delta,
        eta: e,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    /// Active concealing parameter: largest distance between Bob's
    /// post-commit states.
    pub eps_a: f64,
    /// Active binding parameter `max(1 − min honest acceptance, best active cheat)`.
    pub delta_a: f64,
    /// Smallest honest acceptance probability.
    pub correctness: f64,
    /// Code-level `δ_B`.
    pub code_delta_b: f64,
    /// Code-level `max(ε_A, δ_C)`.
    pub code_binding: f64,
    /// Both identities hold with exact equality.
    pub parameter_identities: bool,
    pub active_cheat: ActiveCheat,
    pub fano: FanoReport,
    pub fano_estimator_error: f64,
    pub converse: ConverseCheck,
}

/// Audits the protocol; the converse uses `ε = δ_B/2` and `δ = δ_a`.
pub fn audit_protocol(inst: &ProtocolInstance, budget: &Budget) -> Result<ProtocolReport> {
    let rows = inst.code.rows.len();
    let correctness = (0..rows)
        .map(|r| {
            let (m, l) = inst.reveal_of(r);
            honest_acceptance(inst, m, l)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(1.0, f64::min);
    let active = active_cheat_best(inst, budget)?;
    let delta_a = (1.0 - correctness).max(active.value);
    let bob = eval_delta_b(&inst.code, &inst.channel, budget)?;
    let eps_a = bob.value;

    let code_binding = eval_eps_a(&inst.verifier).max.max(eval_delta_c(&inst.verifier, budget)?.value);
    let fano = fano_estimator(inst, delta_a, budget)?;
    let converse = converse_check(inst, bob.half, delta_a)?;
    Ok(ProtocolReport {
        eps_a,
        delta_a,
        correctness,
        code_delta_b: bob.value,
        code_binding,
        parameter_identities: eps_a == bob.value && delta_a == code_binding,
        fano_estimator_error: fano.error_probability,
        active_cheat: active,
        fano,
        converse,
    })
}
