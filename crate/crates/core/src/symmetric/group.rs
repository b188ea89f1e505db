use crate::error::{Error, Result};

/// Finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    /// Cyclic factor orders when the group was built as `Z_{d₁} × ⋯ × Z_{d_k}`.
    moduli: Option<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and (for order ≤ 64) associativity.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::validation("group has no elements"));
        }
        if names.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::validation("multiplication table is not square"));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(Error::validation("multiplication table is not closed"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::validation("group has no identity element"))?;
        let mut inverses = vec![0; n];
        for g in 0..n {
            inverses[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::validation(format!("element {} has no inverse", names[g])))?;
        }
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if table[table[a][b]][c] != table[a][table[b][c]] {
                            return Err(Error::validation("multiplication is not associative"));
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
            inverses,
            moduli: None,
        })
    }

    /// `Z_{d₁} × ⋯ × Z_{d_k}` with elements in mixed-radix order (last
    /// coordinate fastest).
    pub fn abelian(moduli: &[usize]) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(Error::validation("cyclic factor orders must be positive"));
        }
        let n: usize = moduli.iter().product();
        let coords: Vec<Vec<usize>> = (0..n).map(|g| mixed_radix(g, moduli)).collect();
        let index = |c: &[usize]| c.iter().zip(moduli).fold(0, |acc, (&v, &d)| acc * d + v);
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let s: Vec<usize> = coords[a]
                            .iter()
                            .zip(&coords[b])
                            .zip(moduli)
                            .map(|((&x, &y), &d)| (x + y) % d)
                            .collect();
                        index(&s)
                    })
                    .collect()
            })
            .collect();
        let names = coords
            .iter()
            .map(|c| {
                if c.len() == 1 {
                    c[0].to_string()
                } else {
                    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                    format!("({})", parts.join(","))
                }
            })
            .collect();
        let inverses = (0..n)
            .map(|g| {
                let inv: Vec<usize> = coords[g]
                    .iter()
                    .zip(moduli)
                    .map(|(&x, &d)| (d - x) % d)
                    .collect();
                index(&inv)
            })
            .collect();
        Ok(FiniteGroup {
            names,
            table,
            identity: 0,
            inverses,
            moduli: Some(moduli.to_vec()),
        })
    }

    pub fn cyclic(d: usize) -> Result<Self> {
        Self::abelian(&[d])
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn moduli(&self) -> Option<&[usize]> {
        self.moduli.as_deref()
    }

    /// Coordinates of `g` in `Z_{d₁} × ⋯ × Z_{d_k}`, when known.
    pub fn coords(&self, g: usize) -> Option<Vec<usize>> {
        self.moduli.as_ref().map(|m| mixed_radix(g, m))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &g in subset {
            if g >= self.order() {
                return false;
            }
            member[g] = true;
        }
        member[self.identity]
            && subset
                .iter()
                .all(|&a| subset.iter().all(|&b| member[self.mul(a, self.inverse(b))]))
    }

    /// Left cosets `gK`, each sorted, listed in order of their smallest
    /// element.
    pub fn cosets(&self, k: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for g in 0..self.order() {
            if seen[g] {
                continue;
            }
            let mut c: Vec<usize> = k.iter().map(|&h| self.mul(g, h)).collect();
            c.sort_unstable();
            c.dedup();
            for &x in &c {
                seen[x] = true;
            }
            out.push(c);
        }
        out
    }
}

fn mixed_radix(mut g: usize, moduli: &[usize]) -> Vec<usize> {
    let mut c = vec![0; moduli.len()];
    for (slot, &d) in c.iter_mut().zip(moduli).rev() {
        *slot = g % d;
        g /= d;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.mul(4, 5), 3);
        assert_eq!(g.inverse(2), 4);
        assert!(g.is_abelian());
        assert!(g.is_subgroup(&[0, 2, 4]));
        assert!(!g.is_subgroup(&[0, 1]));
        let cos = g.cosets(&[0, 3]);
        assert_eq!(cos, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
    }

    #[test]
    fn product_group_matches_table_validation() {
        let g = FiniteGroup::abelian(&[3, 3]).unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(g.name(5), "(1,2)");
        assert_eq!(g.coords(7), Some(vec![2, 1]));
        let rebuilt = FiniteGroup::from_table(g.names().to_vec(), g.table.clone()).unwrap();
        assert_eq!(rebuilt.identity(), 0);
        assert_eq!(rebuilt.inverses, g.inverses);
    }

    #[test]
    fn rejects_non_groups() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::from_table(names.clone(), vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(names, vec![vec![0, 2], vec![1, 0]]).is_err());
    }

    #[test]
    fn non_abelian_table() {
        // S3 as permutations of three points.
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| idx([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        let names = (0..6).map(|i| format!("s{i}")).collect();
        let g = FiniteGroup::from_table(names, table).unwrap();
        assert!(!g.is_abelian());
        assert!(g.is_subgroup(&[0, 4, 5]));
    }
}
