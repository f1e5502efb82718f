//! The finite tame quotient `<F, tau | tau^l = 1, F^m = 1, F tau F^-1 = tau^q>`
//! with `m = l * ord_l(q)`.
//!
//! Elements are kept in the normal form `F^i tau^i'`. Moving `tau` past `F`
//! uses `tau^a F^j = F^j tau^(a q^-j)`, so
//!
//! ```text
//! (F^i1 tau^a1) (F^i2 tau^a2) = F^(i1+i2) tau^(a1 q^-i2 + a2)
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::finite_group::FiniteGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("elements belong to different groups: {0} and {1}")]
    MismatchedGroups(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TameGroup {
    ell: u64,
    q: u64,
    q_inv: u64,
    q_order: u64,
    m: u64,
}

/// `F^i tau^ip` in normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameElement {
    i: u64,
    ip: u64,
    ell: u64,
    q: u64,
}

impl TameElement {
    /// Frobenius exponent in `[0, m)`.
    pub fn frobenius_exponent(&self) -> u64 {
        self.i
    }

    /// Inertia exponent in `[0, l)`.
    pub fn inertia_exponent(&self) -> u64 {
        self.ip
    }
}

impl fmt::Display for TameElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.i, self.ip) {
            (0, 0) => write!(f, "1"),
            (i, 0) => write!(f, "F^{i}"),
            (0, a) => write!(f, "tau^{a}"),
            (i, a) => write!(f, "F^{i} tau^{a}"),
        }
    }
}

impl TameGroup {
    pub fn new(ell: u64, q: i64) -> Result<Self, GroupError> {
        if ell <= 3 || !arith::is_prime(ell) || ell >= 1 << 20 {
            return Err(GroupError::InvalidParameters(format!(
                "l = {ell} must be a prime with 3 < l < 2^20"
            )));
        }
        let q = arith::reduce(q, ell);
        if q == 0 {
            return Err(GroupError::InvalidParameters(format!("q is divisible by l = {ell}")));
        }
        let q_order = arith::multiplicative_order(q, ell).expect("q is a unit");
        let q_inv = arith::inv_mod(q, ell).expect("q is a unit");
        Ok(Self {
            ell,
            q,
            q_inv,
            q_order,
            m: ell * q_order,
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// `q mod l`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_inv(&self) -> u64 {
        self.q_inv
    }

    /// Multiplicative order of `q` modulo `l`.
    pub fn q_order(&self) -> u64 {
        self.q_order
    }

    /// Order of `F`.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn order(&self) -> usize {
        (self.m * self.ell) as usize
    }

    pub fn is_abelian(&self) -> bool {
        self.q == 1
    }

    /// Any integers are accepted and reduced into normal form.
    pub fn element(&self, i: i64, ip: i64) -> TameElement {
        TameElement {
            i: arith::reduce(i, self.m),
            ip: arith::reduce(ip, self.ell),
            ell: self.ell,
            q: self.q,
        }
    }

    pub fn identity(&self) -> TameElement {
        self.element(0, 0)
    }

    pub fn frobenius(&self) -> TameElement {
        self.element(1, 0)
    }

    pub fn tau(&self) -> TameElement {
        self.element(0, 1)
    }

    fn check(&self, g: &TameElement) -> Result<(), GroupError> {
        if g.ell != self.ell || g.q != self.q || g.i >= self.m || g.ip >= self.ell {
            return Err(GroupError::MismatchedGroups(
                format!("Gamma({}, {})", self.ell, self.q),
                format!("element {g} of Gamma({}, {})", g.ell, g.q),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, g: &TameElement, h: &TameElement) -> Result<TameElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    fn mul_unchecked(&self, g: &TameElement, h: &TameElement) -> TameElement {
        let l = self.ell;
        let twist = arith::pow_mod(self.q_inv, h.i, l);
        TameElement {
            i: (g.i + h.i) % self.m,
            ip: (g.ip * twist + h.ip) % l,
            ell: l,
            q: self.q,
        }
    }

    pub fn inv(&self, g: &TameElement) -> Result<TameElement, GroupError> {
        self.check(g)?;
        let l = self.ell;
        let ip = (l - g.ip * arith::pow_mod(self.q, g.i, l) % l) % l;
        Ok(TameElement {
            i: (self.m - g.i) % self.m,
            ip,
            ell: l,
            q: self.q,
        })
    }

    pub fn pow(&self, g: &TameElement, mut exp: u64) -> Result<TameElement, GroupError> {
        self.check(g)?;
        let mut result = self.identity();
        let mut base = *g;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul_unchecked(&result, &base);
            }
            base = self.mul_unchecked(&base, &base);
            exp >>= 1;
        }
        Ok(result)
    }

    /// All `m l` elements, ordered by `i` then `ip`.
    pub fn enumerate(&self) -> Vec<TameElement> {
        (0..self.m)
            .flat_map(|i| (0..self.ell).map(move |ip| (i, ip)))
            .map(|(i, ip)| TameElement {
                i,
                ip,
                ell: self.ell,
                q: self.q,
            })
            .collect()
    }

    /// Position of `g` in [`TameGroup::enumerate`].
    pub fn index_of(&self, g: &TameElement) -> usize {
        (g.i * self.ell + g.ip) as usize
    }

    pub fn element_at(&self, index: usize) -> TameElement {
        let index = index as u64;
        TameElement {
            i: index / self.ell,
            ip: index % self.ell,
            ell: self.ell,
            q: self.q,
        }
    }

    /// Mod-l cyclotomic character: `F -> q`, `tau -> 1`.
    pub fn cyclotomic(&self, g: &TameElement) -> u64 {
        arith::pow_mod(self.q, g.i, self.ell)
    }

    /// Cayley table form with generators `F` and `tau`, indexed as in
    /// [`TameGroup::enumerate`].
    pub fn cayley(&self) -> FiniteGroup {
        let elems = self.enumerate();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for g in &elems {
            for h in &elems {
                table.push(self.index_of(&self.mul_unchecked(g, h)) as u32);
            }
        }
        let gens = vec![self.index_of(&self.frobenius()), self.index_of(&self.tau())];
        FiniteGroup::from_table(n, table, gens).expect("tame quotient is a group")
    }

    /// The cyclic subgroup generated by `tau`, reindexed so that `tau^k` has index `k`.
    pub fn inertia_subgroup(&self) -> (FiniteGroup, Vec<usize>) {
        let n = self.ell as usize;
        let embedding = (0..self.ell).map(|k| self.index_of(&self.element(0, k as i64))).collect();
        (FiniteGroup::cyclic(n), embedding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_orders() {
        let g = TameGroup::new(5, 2).unwrap();
        assert_eq!((g.m(), g.order()), (20, 100));
        let g = TameGroup::new(7, 3).unwrap();
        assert_eq!((g.m(), g.order()), (42, 294));
        let g = TameGroup::new(5, 6).unwrap();
        assert_eq!((g.m(), g.order()), (5, 25));
        assert!(g.is_abelian());
    }

    #[test]
    fn invalid_parameters() {
        assert!(TameGroup::new(3, 2).is_err());
        assert!(TameGroup::new(5, 10).is_err());
        assert!(TameGroup::new(9, 2).is_err());
    }

    #[test]
    fn multiplication_examples() {
        let g = TameGroup::new(5, 2).unwrap();
        let (f, t) = (g.frobenius(), g.tau());
        assert_eq!(g.mul(&f, &t).unwrap(), g.element(1, 1));
        let conj = g.mul(&g.mul(&f, &t).unwrap(), &g.inv(&f).unwrap()).unwrap();
        assert_eq!(conj, g.element(0, 2));
        assert_eq!(g.mul(&t, &f).unwrap(), g.element(1, 3));
    }

    #[test]
    fn conjugation_relation_in_several_groups() {
        for (l, q) in [(5, 2), (5, 3), (7, 3), (7, 2), (11, 2), (13, 5), (5, 6)] {
            let g = TameGroup::new(l, q).unwrap();
            let (f, t) = (g.frobenius(), g.tau());
            let lhs = g.mul(&g.mul(&f, &t).unwrap(), &g.inv(&f).unwrap()).unwrap();
            assert_eq!(lhs, g.pow(&t, g.q()).unwrap());
            assert_eq!(g.pow(&f, g.m()).unwrap(), g.identity());
            assert_eq!(g.pow(&t, l).unwrap(), g.identity());
        }
    }

    #[test]
    fn enumeration_and_closure() {
        for (l, q) in [(5, 2), (5, 6)] {
            let g = TameGroup::new(l, q).unwrap();
            let elems = g.enumerate();
            assert_eq!(elems.len(), g.order());
            assert_eq!(elems[0], g.identity());
            let set: std::collections::HashSet<_> = elems.iter().copied().collect();
            assert_eq!(set.len(), elems.len());
            for a in &elems {
                for b in &elems {
                    assert!(set.contains(&g.mul(a, b).unwrap()));
                }
            }
            for (k, e) in elems.iter().enumerate() {
                assert_eq!(g.index_of(e), k);
                assert_eq!(g.element_at(k), *e);
            }
        }
    }

    #[test]
    fn axioms_on_gamma_5_2() {
        let g = TameGroup::new(5, 2).unwrap();
        let elems = g.enumerate();
        for a in &elems {
            assert_eq!(g.mul(a, &g.identity()).unwrap(), *a);
            assert_eq!(g.mul(&g.identity(), a).unwrap(), *a);
            assert_eq!(g.mul(a, &g.inv(a).unwrap()).unwrap(), g.identity());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let [a, b, c] = [0; 3].map(|_| elems[rng.gen_range(0..elems.len())]);
            let left = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
            let right = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn cross_group_multiplication_rejected() {
        let g = TameGroup::new(5, 2).unwrap();
        let h = TameGroup::new(5, 3).unwrap();
        assert!(matches!(
            g.mul(&g.frobenius(), &h.tau()),
            Err(GroupError::MismatchedGroups(..))
        ));
    }

    #[test]
    fn cayley_table_agrees_with_normal_form() {
        let g = TameGroup::new(5, 2).unwrap();
        let cay = g.cayley();
        for a in g.enumerate() {
            for b in g.enumerate() {
                let ab = g.mul(&a, &b).unwrap();
                assert_eq!(cay.mul(g.index_of(&a), g.index_of(&b)), g.index_of(&ab));
            }
        }
    }
}
