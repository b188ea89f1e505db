use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported `k₁ + k₂`.
pub const MAX_HASH_BITS: usize = 32;

/// Invertible linear map `f` on `GF(2)^k` whose first `k₁` output bits are
/// the Toeplitz hash `T v` with `T_ij = s_{i−j+k−1}`.
///
/// Bit `j` of an input word is coordinate `j`; output bits `0..k₁` form the
/// message and bits `k₁..k` the randomness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToeplitzHash {
    pub k1: usize,
    pub k2: usize,
    /// Toeplitz diagonal bits, length `k + k₁ − 1`.
    pub seed_bits: Vec<u8>,
    /// Row masks of `f` (`k` rows of `k` bits).
    forward: Vec<u64>,
    inverse: Vec<u64>,
}

impl ToeplitzHash {
    /// Validates explicit Toeplitz bits and completion rows.
    pub fn from_parts(k1: usize, k2: usize, seed_bits: Vec<u8>, completion: Vec<u64>) -> Result<Self> {
        let k = k1 + k2;
        if k1 == 0 || k > MAX_HASH_BITS {
            return Err(Error::validation(format!(
                "hash sizes need k1 = {k1} ≥ 1 and k1 + k2 = {k} ≤ {MAX_HASH_BITS}"
            )));
        }
        if seed_bits.len() != k + k1 - 1 || seed_bits.iter().any(|&b| b > 1) {
            return Err(Error::validation(format!("Toeplitz seed must be {} bits", k + k1 - 1)));
        }
        if completion.len() != k2 || completion.iter().any(|&r| r >> k != 0) {
            return Err(Error::validation(format!("completion must be {k2} rows of {k} bits")));
        }
        let mut forward = toeplitz_rows(k1, k, &seed_bits);
        forward.extend(completion);
        let inverse = invert(&forward, k).ok_or_else(|| Error::Construction("hash map is not invertible".into()))?;
        Ok(ToeplitzHash {
            k1,
            k2,
            seed_bits,
            forward,
            inverse,
        })
    }

    pub fn k(&self) -> usize {
        self.k1 + self.k2
    }

    pub fn apply(&self, v: u64) -> u64 {
        apply_rows(&self.forward, v)
    }

    pub fn invert(&self, y: u64) -> u64 {
        apply_rows(&self.inverse, y)
    }

    /// `(m, l)` of a pre-code index.
    pub fn split(&self, v: u64) -> (usize, usize) {
        let y = self.apply(v);
        ((y & ((1u64 << self.k1) - 1)) as usize, (y >> self.k1) as usize)
    }

    /// The hash value `T v`.
    pub fn hash(&self, v: u64) -> usize {
        self.split(v).0
    }
}

/// Random Toeplitz seed with a rejection-sampled invertible completion.
/// Seeds whose Toeplitz block has rank below `k₁` admit no completion and
/// are redrawn.
pub fn make_hash(k1: usize, k2: usize, seed: u64) -> Result<ToeplitzHash> {
    let k = k1 + k2;
    if k1 == 0 || k > MAX_HASH_BITS {
        return Err(Error::validation(format!(
            "hash sizes need k1 = {k1} ≥ 1 and k1 + k2 = {k} ≤ {MAX_HASH_BITS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let bits: Vec<u8> = (0..k + k1 - 1).map(|_| rng.random_range(0..2u8)).collect();
        if rank(&toeplitz_rows(k1, k, &bits), k) < k1 {
            continue;
        }
        for _ in 0..64 {
            let completion: Vec<u64> = (0..k2).map(|_| rng.random::<u64>() & mask(k)).collect();
            if let Ok(h) = ToeplitzHash::from_parts(k1, k2, bits.clone(), completion) {
                return Ok(h);
            }
        }
    }
}

fn mask(k: usize) -> u64 {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

fn toeplitz_rows(k1: usize, k: usize, s: &[u8]) -> Vec<u64> {
    (0..k1)
        .map(|i| (0..k).fold(0u64, |acc, j| acc | (u64::from(s[i + k - 1 - j]) << j)))
        .collect()
}

fn apply_rows(rows: &[u64], v: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &r)| acc | (u64::from((r & v).count_ones() & 1) << i))
}

fn rank(rows: &[u64], k: usize) -> usize {
    let mut rows = rows.to_vec();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        r += 1;
    }
    r
}

/// Gauss–Jordan inverse over `GF(2)`.
fn invert(rows: &[u64], k: usize) -> Option<Vec<u64>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u64> = (0..k).map(|i| 1u64 << i).collect();
    for col in 0..k {
        let p = (col..k).find(|&i| a[i] >> col & 1 == 1)?;
        a.swap(col, p);
        inv.swap(col, p);
        for i in 0..k {
            if i != col && a[i] >> col & 1 == 1 {
                a[i] ^= a[col];
                inv[i] ^= inv[col];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_from_explicit_parts() {
        // T = [s₁ s₀] = [1 0], completion [0 1].
        let h = ToeplitzHash::from_parts(1, 1, vec![0, 1], vec![0b10]).unwrap();
        for v in 0..4 {
            assert_eq!(h.apply(v), v);
        }
    }

    #[test]
    fn singular_completion_rejected() {
        assert!(ToeplitzHash::from_parts(1, 1, vec![0, 1], vec![0b01]).is_err());
    }

    #[test]
    fn inverse_roundtrip_exhaustive() {
        for (k1, k2, seed) in [(1, 1, 0), (2, 3, 1), (4, 4, 2), (5, 7, 3), (6, 6, 4)] {
            let h = make_hash(k1, k2, seed).unwrap();
            let k = k1 + k2;
            let mut seen = vec![false; 1 << k];
            for v in 0..1u64 << k {
                let y = h.apply(v);
                assert_eq!(h.invert(y), v);
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
            }
        }
    }

    #[test]
    fn linear_and_toeplitz() {
        let h = make_hash(3, 2, 11).unwrap();
        assert_eq!(h.apply(0), 0);
        for a in 0..32u64 {
            for b in 0..32u64 {
                assert_eq!(h.apply(a ^ b), h.apply(a) ^ h.apply(b));
            }
        }
        // Constant diagonals: T_{i+1,j+1} = T_{i,j}.
        let rows = toeplitz_rows(3, 5, &h.seed_bits);
        for i in 0..2 {
            for j in 0..4 {
                assert_eq!(rows[i] >> j & 1, rows[i + 1] >> (j + 1) & 1);
            }
        }
    }

    #[test]
    fn universal_collision_rate() {
        // Over the whole seed family, distinct inputs collide with frequency
        // ≤ 2^{−k₁}. Exhaustive over all 2^{k+k₁−1} Toeplitz seeds.
        let (k1, k) = (2usize, 4usize);
        let seeds = 1u32 << (k + k1 - 1);
        for a in 0..16u64 {
            for b in a + 1..16u64 {
                let mut hits = 0;
                for s in 0..seeds {
                    let bits: Vec<u8> = (0..k + k1 - 1).map(|i| (s >> i & 1) as u8).collect();
                    let t = toeplitz_rows(k1, k, &bits);
                    if apply_rows(&t, a) == apply_rows(&t, b) {
                        hits += 1;
                    }
                }
                assert!(hits as f64 / seeds as f64 <= 0.25 + 1e-12);
            }
        }
    }
}
