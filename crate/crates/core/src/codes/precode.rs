use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Dist;

/// Encoder table indexed by a single message `m ∈ {0..M̃}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreCode {
    pub n: usize,
    pub alphabet: usize,
    pub rows: Vec<Vec<usize>>,
}

impl PreCode {
    pub fn new(n: usize, alphabet: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        check_rows(n, alphabet, &rows)?;
        Ok(PreCode { n, alphabet, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Encoder table indexed by `(m, l)`, stored row-major as `m·𝖫 + l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    pub n: usize,
    pub alphabet: usize,
    pub messages: usize,
    pub randomness: usize,
    pub rows: Vec<Vec<usize>>,
}

impl Code {
    pub fn new(
        n: usize,
        alphabet: usize,
        messages: usize,
        randomness: usize,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if messages == 0 || randomness == 0 {
            return Err(Error::validation("code needs at least one message and one randomness value"));
        }
        if rows.len() != messages * randomness {
            return Err(Error::validation(format!(
                "code table has {} rows, expected {messages}×{randomness}",
                rows.len()
            )));
        }
        check_rows(n, alphabet, &rows)?;
        Ok(Code {
            n,
            alphabet,
            messages,
            randomness,
            rows,
        })
    }

    pub fn row(&self, m: usize, l: usize) -> &[usize] {
        &self.rows[m * self.randomness + l]
    }

    /// Message of the flattened row index.
    pub fn message_of(&self, row: usize) -> usize {
        row / self.randomness
    }

    /// Average single-letter empirical distribution `Σᵢ (1/n) P_{Xᵢ}` under
    /// uniform `(m, l)`.
    pub fn letter_distribution(&self) -> Result<Dist> {
        let mut counts = vec![0.0; self.alphabet];
        for r in &self.rows {
            for &x in r {
                counts[x] += 1.0;
            }
        }
        Dist::from_weights(counts)
    }
}

fn check_rows(n: usize, alphabet: usize, rows: &[Vec<usize>]) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("block length must be positive"));
    }
    if alphabet == 0 {
        return Err(Error::validation("alphabet must be nonempty"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::validation(format!("row {i} has length {}, expected {n}", r.len())));
        }
        if let Some(&x) = r.iter().find(|&&x| x >= alphabet) {
            return Err(Error::validation(format!("row {i} uses letter {x} outside alphabet of size {alphabet}")));
        }
    }
    Ok(())
}

/// `mbar` rows drawn i.i.d. from `Pⁿ`.
pub fn random_precode(p: &Dist, n: usize, mbar: usize, rng: &mut (impl Rng + ?Sized)) -> Result<PreCode> {
    if mbar < 2 {
        return Err(Error::validation(format!("pre-code size {mbar} must be at least 2")));
    }
    let sampler = WeightedIndex::new(p.probs()).map_err(|e| Error::validation(e.to_string()))?;
    let rows = (0..mbar)
        .map(|_| (0..n).map(|_| sampler.sample(rng)).collect())
        .collect();
    PreCode::new(n, p.len(), rows)
}

pub fn hamming_distance(x: &[usize], y: &[usize]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// `η(m) = 1` iff some other row lies within distance `nε₂` of row `m`.
pub fn hamming_filter(rows: &[Vec<usize>], eps2: f64) -> Vec<bool> {
    let mut flags = vec![false; rows.len()];
    for i in 0..rows.len() {
        let limit = rows[i].len() as f64 * eps2;
        for j in i + 1..rows.len() {
            let d = rows[i].iter().zip(&rows[j]).filter(|(a, b)| a != b).count();
            if d as f64 <= limit {
                flags[i] = true;
                flags[j] = true;
            }
        }
    }
    flags
}

/// Smallest pairwise distance, `None` for fewer than two rows.
pub fn min_distance(rows: &[Vec<usize>]) -> Option<usize> {
    let mut best = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let d = rows[i].iter().zip(&rows[j]).filter(|(a, b)| a != b).count();
            best = Some(best.map_or(d, |b: usize| b.min(d)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_rows_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pre = random_precode(&Dist::point(3, 2).unwrap(), 5, 4, &mut rng).unwrap();
        assert!(pre.rows.iter().all(|r| r.iter().all(|&x| x == 2)));
    }

    #[test]
    fn seeded_tables_repeat() {
        let p = Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let a = random_precode(&p, 7, 9, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_precode(&p, 7, 9, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn letter_frequencies_concentrate() {
        let p = Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let (n, mbar) = (50, 400);
        let pre = random_precode(&p, n, mbar, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let total = (n * mbar) as f64;
        for x in 0..3 {
            let c = pre.rows.iter().flatten().filter(|&&y| y == x).count() as f64;
            let q = p.get(x);
            let sd = (total * q * (1.0 - q)).sqrt();
            assert!((c - total * q).abs() <= 3.0 * sd, "letter {x}: {c}");
        }
    }

    #[test]
    fn distances() {
        assert_eq!(hamming_distance(&[0, 1, 1], &[0, 1, 1]).unwrap(), 0);
        assert_eq!(hamming_distance(&[0, 1, 0, 1], &[1, 0, 1, 0]).unwrap(), 4);
        assert_eq!(hamming_distance(&[0, 1, 1], &[0, 0, 1]).unwrap(), 1);
        assert!(hamming_distance(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn filter_flags() {
        let rows = vec![vec![0, 1, 0], vec![0, 1, 0], vec![1, 0, 1]];
        assert_eq!(hamming_filter(&rows, 0.3), vec![true, true, false]);
        let far = vec![vec![0, 0, 0], vec![1, 1, 1]];
        assert_eq!(hamming_filter(&far, 0.99), vec![false, false]);
        assert_eq!(min_distance(&far), Some(3));
    }

    #[test]
    fn code_shape_checked() {
        assert!(Code::new(2, 2, 2, 2, vec![vec![0, 1]; 3]).is_err());
        let c = Code::new(2, 2, 2, 1, vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(c.row(1, 0), &[1, 1]);
        let p = c.letter_distribution().unwrap();
        assert!((p.get(1) - 0.75).abs() < 1e-15);
    }
}
