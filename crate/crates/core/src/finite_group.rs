//! Finite groups given by a Cayley table on `0..order`, together with a
//! generating set. The cohomology routines only ever see this form.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteGroupError {
    #[error("Cayley table has {got} entries, expected {expected}")]
    BadTable { expected: usize, got: usize },
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("generators {0:?} do not generate the group")]
    NotGenerating(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// `table[a * order + b]` is the index of `a * b`. Associativity is the
    /// caller's responsibility (checking it is cubic); identity, inverses and
    /// generation are verified here.
    pub fn from_table(order: usize, table: Vec<u32>, generators: Vec<usize>) -> Result<Self, FiniteGroupError> {
        if table.len() != order * order {
            return Err(FiniteGroupError::BadTable {
                expected: order * order,
                got: table.len(),
            });
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| table[e * order + a] as usize == a && table[a * order + e] as usize == a))
            .ok_or_else(|| FiniteGroupError::NotAGroup("no identity".into()))?;
        let mut inverse = vec![0; order];
        for (a, slot) in inverse.iter_mut().enumerate() {
            *slot = (0..order)
                .find(|&b| table[a * order + b] as usize == identity)
                .ok_or_else(|| FiniteGroupError::NotAGroup(format!("element {a} has no inverse")))?;
        }
        let g = Self {
            order,
            table,
            identity,
            inverse,
            generators,
        };
        if g.closure(&g.generators).len() != order {
            return Err(FiniteGroupError::NotGenerating(g.generators));
        }
        Ok(g)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        let generators = if n > 1 { vec![1] } else { vec![] };
        Self::from_table(n, table, generators).expect("Z/n is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Elements reachable from the identity by right multiplication with `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        let mut out = vec![self.identity];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The subgroup generated by `gens`, reindexed to `0..k`, with the
    /// embedding `new index -> old index`.
    pub fn subgroup(&self, gens: &[usize]) -> (FiniteGroup, Vec<usize>) {
        let elems = self.closure(gens);
        let mut position = vec![usize::MAX; self.order];
        for (k, &e) in elems.iter().enumerate() {
            position[e] = k;
        }
        let k = elems.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &elems {
            for &b in &elems {
                table.push(position[self.mul(a, b)] as u32);
            }
        }
        let new_gens = gens.iter().map(|&g| position[g]).filter(|&g| g != position[self.identity]).collect();
        let sub = FiniteGroup::from_table(k, table, new_gens).expect("closure of generators is a subgroup");
        (sub, elems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_basics() {
        let g = FiniteGroup::cyclic(5);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(3, 4), 2);
        assert_eq!(g.inv(2), 3);
    }

    #[test]
    fn subgroup_of_cyclic() {
        let g = FiniteGroup::cyclic(12);
        let (h, emb) = g.subgroup(&[4]);
        assert_eq!(h.order(), 3);
        assert_eq!(emb, vec![0, 4, 8]);
    }

    #[test]
    fn non_generating_set_rejected() {
        let g = FiniteGroup::cyclic(6);
        let table: Vec<u32> = (0..36).map(|k| ((k / 6 + k % 6) % 6) as u32).collect();
        assert!(matches!(
            FiniteGroup::from_table(6, table, vec![2]),
            Err(FiniteGroupError::NotGenerating(_))
        ));
        assert_eq!(g.closure(&[2]).len(), 3);
    }
}
