use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    build_verifier, eval_delta_b, eval_delta_c, eval_e_alpha, eval_eps_a, hamming_filter, make_hash, min_distance,
    precode_to_code, random_precode, Code, EpsA, PreCode, Verifier, MAX_HASH_BITS,
};
use crate::error::{Error, Result};
use crate::info::{holevo_info, RenyiOrder};
use crate::quantum::Budget;
use crate::separators::{find_separators, SeparatorFamily};
use crate::{Channel, Dist};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PipelineOptions {
    pub alpha: RenyiOrder,
    /// Overrides `ε₁ = ζ₁ε₂/4`.
    pub epsilon1: Option<f64>,
    /// Overrides `ε₂ = 1/(2n)`.
    pub epsilon2: Option<f64>,
    pub budget: Budget,
    /// Fresh RNG streams tried before giving up on the selection step.
    pub max_attempts: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            alpha: RenyiOrder::new(2.0).expect("valid order"),
            epsilon1: None,
            epsilon2: None,
            budget: Budget::default(),
            max_attempts: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bounds {
    /// `ζ₂ / (n [ζ₁ε₂/2 − ε₁]₊²)`.
    pub chebyshev_delta_c: f64,
    /// `2^{2/α − 1 + ((α−1)/α)(log 𝖬 − E_α)}`.
    pub leftover_hash_delta_b: f64,
}

/// Measured security parameters of a code and the matching analytic bounds.
#[derive(Clone, Debug)]
pub struct CodeEvaluation {
    pub eps_a: EpsA,
    pub delta_b: f64,
    pub delta_b_half: f64,
    pub delta_c: f64,
    pub e_alpha: f64,
    pub bounds: Bounds,
}

pub fn leftover_hash_bound(alpha: f64, log_messages: f64, e_alpha: f64) -> f64 {
    (2.0 / alpha - 1.0 + (alpha - 1.0) / alpha * (log_messages - e_alpha)).exp2()
}

/// Evaluates `ε_A`, `δ_B`, `δ_C` and `E_α` of `code`, treating its rows as the
/// pre-code for `E_α`.
pub fn evaluate_code(
    w: &Channel,
    fam: &SeparatorFamily,
    code: &Code,
    alpha: RenyiOrder,
    budget: &Budget,
) -> Result<(CodeEvaluation, Verifier)> {
    let ver = build_verifier(w, fam, code.n, code.rows.clone())?;
    let eps_a = eval_eps_a(&ver);
    let delta_c = eval_delta_c(&ver, budget)?.value;
    let db = eval_delta_b(code, w, budget)?;
    let e_alpha = eval_e_alpha(&code.rows, w, alpha, budget)?;
    let bounds = Bounds {
        chebyshev_delta_c: fam.binding_bound(code.n),
        leftover_hash_delta_b: leftover_hash_bound(alpha.get(), (code.messages as f64).log2(), e_alpha),
    };
    Ok((
        CodeEvaluation {
            eps_a,
            delta_b: db.value,
            delta_b_half: db.half,
            delta_c,
            e_alpha,
            bounds,
        },
        ver,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct SecurityReport {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub k1: usize,
    pub k2: usize,
    pub alpha: f64,
    pub seed: u64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Selection threshold, three times the mean of `ε_{A,m} + η(m)`.
    pub epsilon3: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub mbar: usize,
    pub attempts: usize,
    pub hash_seed: u64,
    pub messages: usize,
    pub randomness: usize,
    pub eps_a: f64,
    pub eps_a_average: f64,
    pub delta_b: f64,
    pub delta_b_half: f64,
    pub delta_c: f64,
    pub e_alpha: f64,
    pub bounds: Bounds,
    pub min_distance: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    /// Selected `2^{k₁+k₂}` rows before hashing.
    pub precode: PreCode,
    pub code: Code,
    pub verifier: Verifier,
    pub family: SeparatorFamily,
    pub report: SecurityReport,
}

/// Rate-condition warnings for `R₁ + R₂ < H(P)` and `R₂ > I(X;Y)_P`.
fn rate_warnings(w: &Channel, p: &Dist, r1: f64, r2: f64) -> Result<Vec<String>> {
    let h = p.entropy();
    let i = holevo_info(w, p)?;
    let mut out = Vec::new();
    if r1 + r2 >= h {
        out.push(format!("R1 + R2 = {} is not below H(X) = {h}", r1 + r2));
    }
    if r2 <= i {
        out.push(format!("R2 = {r2} is not above I(X;Y) = {i}"));
    }
    Ok(out)
}

/// Random pre-code, Markov selection, Hamming filtering and hashing at block
/// length `n` with `k₁ = ⌊nR₁⌋` message bits and `k₂ = ⌊nR₂⌋` randomness bits.
pub fn build_pipeline(
    w: &Channel,
    p: &Dist,
    n: usize,
    r1: f64,
    r2: f64,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<PipelineOutput> {
    Error::check_dim(w.len(), p.len())?;
    if n == 0 {
        return Err(Error::validation("block length must be positive"));
    }
    if !(r1.is_finite() && r1 > 0.0 && r2.is_finite() && r2 >= 0.0) {
        return Err(Error::validation(format!("rates R1 = {r1}, R2 = {r2} must satisfy R1 > 0, R2 ≥ 0")));
    }
    let k1 = (n as f64 * r1).floor() as usize;
    let k2 = (n as f64 * r2).floor() as usize;
    if k1 == 0 {
        return Err(Error::validation(format!("floor(n*R1) = 0 at n = {n}, R1 = {r1}")));
    }
    if k1 + k2 > MAX_HASH_BITS {
        return Err(Error::validation(format!("k1 + k2 = {} exceeds {MAX_HASH_BITS}", k1 + k2)));
    }
    let warnings = rate_warnings(w, p, r1, r2)?;
    let fam = find_separators(w)?;
    let e2 = opts.epsilon2.unwrap_or(1.0 / (2.0 * n as f64));
    let e1 = opts.epsilon1.unwrap_or(fam.zeta1 * e2 / 4.0);
    let fam = fam.with_epsilons(e1, e2)?;
    let target = 1usize << (k1 + k2);
    let mbar = (1.5 * target as f64).ceil() as usize;
    let base = build_verifier(w, &fam, n, Vec::new())?;

    for attempt in 0..opts.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let pre = random_precode(p, n, mbar, &mut rng)?;
        let flags = hamming_filter(&pre.rows, e2);
        let ver = base.with_codewords(pre.rows.clone())?;
        let scores: Vec<f64> = eval_eps_a(&ver)
            .per_row
            .iter()
            .zip(&flags)
            .map(|(&e, &f)| e + if f { 1.0 } else { 0.0 })
            .collect();
        let epsilon3 = 3.0 * scores.iter().sum::<f64>() / scores.len() as f64;
        let mut keep: Vec<usize> = (0..mbar).filter(|&i| !flags[i] && scores[i] <= epsilon3).collect();
        if keep.len() < target {
            continue;
        }
        keep.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        keep.truncate(target);
        keep.sort_unstable();
        let precode = PreCode::new(n, w.len(), keep.iter().map(|&i| pre.rows[i].clone()).collect())?;
        let hash_seed = rng.next_u64();
        let hash = make_hash(k1, k2, hash_seed)?;
        let code = precode_to_code(&precode, &hash)?;
        let min_d = min_distance(&code.rows);
        if let Some(d) = min_d {
            if d as f64 <= n as f64 * e2 {
                return Err(Error::Inconsistent(format!(
                    "selected code has distance {d} ≤ n·eps2 = {}",
                    n as f64 * e2
                )));
            }
        }
        let (ev, verifier) = evaluate_code(w, &fam, &code, opts.alpha, &opts.budget)?;
        let report = SecurityReport {
            n,
            r1,
            r2,
            k1,
            k2,
            alpha: opts.alpha.get(),
            seed,
            epsilon1: e1,
            epsilon2: e2,
            epsilon3,
            zeta1: fam.zeta1,
            zeta2: fam.zeta2,
            mbar,
            attempts: attempt + 1,
            hash_seed,
            messages: code.messages,
            randomness: code.randomness,
            eps_a: ev.eps_a.max,
            eps_a_average: ev.eps_a.average,
            delta_b: ev.delta_b,
            delta_b_half: ev.delta_b_half,
            delta_c: ev.delta_c,
            e_alpha: ev.e_alpha,
            bounds: ev.bounds,
            min_distance: min_d,
            warnings,
        };
        return Ok(PipelineOutput {
            precode,
            code,
            verifier,
            family: fam,
            report,
        });
    }
    Err(Error::Construction(format!(
        "fewer than {target} rows survived selection in {} attempts",
        opts.max_attempts
    )))
}
