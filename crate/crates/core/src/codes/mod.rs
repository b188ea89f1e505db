//! Random pre-codes, Hamming filtering, verifier projections, universal₂
//! hashing and exact evaluation of the security parameters of a code.

mod eval;
mod hash;
mod pipeline;
mod precode;
mod verifier;

pub use eval::{
    eval_delta_b, eval_delta_c, eval_delta_c_sampled, eval_e_alpha, eval_eps_a, word_of, DeltaB, DeltaC, EpsA,
};
pub(crate) use eval::top_two;
pub use hash::{make_hash, ToeplitzHash, MAX_HASH_BITS};
pub use pipeline::{
    build_pipeline, evaluate_code, leftover_hash_bound, Bounds, CodeEvaluation, PipelineOptions, PipelineOutput,
    SecurityReport,
};
pub use precode::{hamming_distance, hamming_filter, min_distance, random_precode, Code, PreCode};
pub use verifier::{build_verifier, Verifier, ACCEPT_TOL};

use crate::error::{Error, Result};

/// `φ(m, l) = φ̃(f⁻¹(m, l))`.
pub fn precode_to_code(pre: &PreCode, hash: &ToeplitzHash) -> Result<Code> {
    let k = hash.k();
    if pre.len() as u64 != 1u64 << k {
        return Err(Error::validation(format!(
            "pre-code has {} rows, the hash needs 2^{k}",
            pre.len()
        )));
    }
    let randomness = 1usize << hash.k2;
    let mut rows = vec![Vec::new(); pre.len()];
    for (v, r) in pre.rows.iter().enumerate() {
        let (m, l) = hash.split(v as u64);
        rows[m * randomness + l] = r.clone();
    }
    Code::new(pre.n, pre.alphabet, 1 << hash.k1, randomness, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_hash_reshapes() {
        let h = ToeplitzHash::from_parts(1, 1, vec![0, 1], vec![0b10]).unwrap();
        let pre = PreCode::new(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let code = precode_to_code(&pre, &h).unwrap();
        // v = m + 2l.
        assert_eq!(code.row(0, 0), &[0, 0]);
        assert_eq!(code.row(1, 0), &[0, 1]);
        assert_eq!(code.row(0, 1), &[1, 0]);
        assert_eq!(code.row(1, 1), &[1, 1]);
    }

    #[test]
    fn relabeling_preserves_multiset() {
        let h = make_hash(2, 2, 9).unwrap();
        let rows: Vec<Vec<usize>> = (0..16).map(|i| vec![i % 3, i / 3 % 3, i % 2]).collect();
        let pre = PreCode::new(3, 3, rows).unwrap();
        let code = precode_to_code(&pre, &h).unwrap();
        let mut a = pre.rows.clone();
        let mut b = code.rows.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(precode_to_code(&PreCode::new(3, 3, pre.rows[..8].to_vec()).unwrap(), &h).is_err());
    }
}
