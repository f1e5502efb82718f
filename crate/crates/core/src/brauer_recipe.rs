//! The Brauer-class 2-cocycle of the tame quotient, built through the
//! monomial lattice and compared with the closed form
//! `b(F^i tau^i', F^j tau^j') = i' j q^i mod l`.
//!
//! The steps:
//!
//! 1. `f1(F^i) = <i>/l`, a character to `(1/l)Z/Z`.
//! 2. Its connecting 2-cocycle with values in `Z`:
//!    `w(i, j) = (<i+j> - <i> - <j>) / l`, which is 0 or -1.
//! 3. `C1 = q^w`, i.e. the lattice point `(l w, 0) = (<i+j> - <i> - <j>, 0)`,
//!    inflated to the whole group through the Frobenius exponent.
//! 4. `gamma(F^i tau^i') = (<i>, 0)`, and `B = C + d(gamma)` with
//!    `d(gamma)(s, t) = s.gamma(t) - gamma(st) + gamma(s)`. The a-coordinate
//!    cancels, so `B` takes values in `mu_l`.
//! 5. The exponent table is the c-coordinate of `B`.
//!
//! Additively, `C / d(gamma^-1) = C + d(gamma)`; subtracting `d(gamma)`
//! instead leaves the a-coordinate `2 (<i+j> - <i> - <j>)` and is rejected
//! by [`run_recipe_oriented`].

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cohomology::{Cochain, GroupModule};
use crate::exact_linalg::FpScalar;
use crate::finite_group::FiniteGroup;
use crate::galois_modules::{LatticePoint, MonomialLattice};
use crate::tame_group::{GroupError, TameElement, TameGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecipeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("lattice cocycle is not mu_l-valued at ({0}, {1}): a-coordinate {2}")]
    NotMuValued(String, String, i64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Requires `q^2 != 1 mod l` on top of the group constructor's conditions.
pub fn checked_group(ell: u64, q: i64) -> Result<TameGroup, RecipeError> {
    let group = TameGroup::new(ell, q).map_err(|e| match e {
        GroupError::InvalidParameters(m) => RecipeError::InvalidParameters(m),
        other => RecipeError::Group(other),
    })?;
    let qr = group.q();
    if qr * qr % ell == 1 {
        return Err(RecipeError::InvalidParameters(format!(
            "q^2 = 1 mod {ell} for q = {q} (need q^2 != 1 mod l)"
        )));
    }
    Ok(group)
}

/// `<x>`: the representative of `x mod l` in `[0, l)`.
fn rep(x: i64, ell: u64) -> i64 {
    x.rem_euclid(ell as i64)
}

/// `(<i+j> - <i> - <j>) / l`, always 0 or -1.
pub fn step2_connecting(i: i64, j: i64, ell: u64) -> i64 {
    (rep(i + j, ell) - rep(i, ell) - rep(j, ell)) / ell as i64
}

/// `i1' * i2 * q^i1 mod l`.
pub fn explicit_b(group: &TameGroup, g1: &TameElement, g2: &TameElement) -> Result<FpScalar, GroupError> {
    // multiplication validates membership of both arguments
    group.mul(g1, g2)?;
    let ell = group.ell();
    let v = g1.inertia_exponent() * (g2.frobenius_exponent() % ell) % ell * group.cyclotomic(g1) % ell;
    Ok(FpScalar::new(v as i64, ell).expect("l is prime"))
}

/// Table of `explicit_b` indexed by `(index_of(g1), index_of(g2))`.
pub fn explicit_b_table(group: &TameGroup) -> Vec<u64> {
    let elems = group.enumerate();
    let mut out = Vec::with_capacity(elems.len() * elems.len());
    for a in &elems {
        for b in &elems {
            out.push(explicit_b(group, a, b).expect("same group").value());
        }
    }
    out
}

/// Intermediate tables of the construction.
#[derive(Clone, Debug, Serialize)]
pub struct RecipeTrace {
    pub ell: u64,
    pub q: u64,
    pub group_order: usize,
    /// Sign `s` in `B = C + s d(gamma)`.
    pub coboundary_sign: i64,
    /// `l f1(F^i) = <i>` for `i` in `[0, l)`.
    pub f1_numerators: Vec<i64>,
    /// `w(i, j)` for `i, j` in `[0, l)`, row-major.
    pub connecting: Vec<i64>,
    /// a-coordinate of `C1(F^i, F^j)` for `i, j` in `[0, l)`, row-major.
    pub c1_exponents: Vec<i64>,
    /// `gamma(g)` for `g` in enumeration order.
    pub gamma: Vec<LatticePoint>,
    /// c-coordinate of `B(g, h)`, row-major over the enumeration.
    pub exponent_table: Vec<u64>,
}

impl RecipeTrace {
    pub fn exponent(&self, g: usize, h: usize) -> u64 {
        self.exponent_table[g * self.group_order + h]
    }
}

pub fn run_recipe(ell: u64, q: i64) -> Result<RecipeTrace, RecipeError> {
    run_recipe_oriented(ell, q, 1)
}

/// As [`run_recipe`] with `B = C + sign * d(gamma)`; fails unless the
/// result is `mu_l`-valued.
pub fn run_recipe_oriented(ell: u64, q: i64, sign: i64) -> Result<RecipeTrace, RecipeError> {
    let group = checked_group(ell, q)?;
    let lattice = MonomialLattice::new(group.clone());
    let l = ell as i64;
    let elems = group.enumerate();
    let n = elems.len();

    let f1_numerators: Vec<i64> = (0..l).collect();
    let connecting: Vec<i64> = (0..l).flat_map(|i| (0..l).map(move |j| step2_connecting(i, j, ell))).collect();
    let c1_exponents: Vec<i64> = connecting.iter().map(|w| w * l).collect();

    let gamma: Vec<LatticePoint> = elems
        .iter()
        .map(|g| lattice.point(rep(g.frobenius_exponent() as i64, ell), 0))
        .collect();

    let mut exponent_table = Vec::with_capacity(n * n);
    for (s_idx, s) in elems.iter().enumerate() {
        let i1 = rep(s.frobenius_exponent() as i64, ell);
        for (t_idx, t) in elems.iter().enumerate() {
            let i2 = rep(t.frobenius_exponent() as i64, ell);
            let st = group.index_of(&group.mul(s, t)?);
            let c = lattice.point(c1_exponents[(i1 * l + i2) as usize], 0);
            let dg = lattice.add(
                lattice.sub(lattice.act(s, gamma[t_idx]), gamma[st]),
                gamma[s_idx],
            );
            let scaled = LatticePoint {
                a: dg.a * sign,
                c: arith::reduce(dg.c as i64 * sign, ell),
            };
            let b = lattice.add(c, scaled);
            if b.a != 0 {
                return Err(RecipeError::NotMuValued(s.to_string(), t.to_string(), b.a));
            }
            exponent_table.push(b.c);
        }
    }
    Ok(RecipeTrace {
        ell,
        q: group.q(),
        group_order: n,
        coboundary_sign: sign,
        f1_numerators,
        connecting,
        c1_exponents,
        gamma,
        exponent_table,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub g1: String,
    pub g2: String,
    pub recipe: u64,
    pub formula: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecipeComparison {
    pub ell: u64,
    pub q: u64,
    /// Uniform scalar with `recipe = lambda * formula` on every pair.
    pub lambda: Option<u64>,
    pub pairs_checked: usize,
    pub all_pairs_agree: bool,
    pub first_mismatch: Option<Mismatch>,
}

pub fn compare_recipe_to_formula(ell: u64, q: i64) -> Result<RecipeComparison, RecipeError> {
    let trace = run_recipe(ell, q)?;
    Ok(compare_trace(&trace))
}

pub fn compare_trace(trace: &RecipeTrace) -> RecipeComparison {
    let ell = trace.ell;
    let group = TameGroup::new(ell, trace.q as i64).expect("validated by run_recipe");
    let formula = explicit_b_table(&group);
    let mut lambda: Option<u64> = None;
    let mut first_mismatch = None;
    for (k, (&r, &f)) in trace.exponent_table.iter().zip(&formula).enumerate() {
        let ok = match (f, lambda) {
            (0, _) => r == 0,
            (f, None) => {
                let cand = r * arith::inv_mod(f, ell).expect("nonzero") % ell;
                lambda = Some(cand);
                cand != 0
            }
            (f, Some(l)) => r == l * f % ell,
        };
        if !ok {
            let n = trace.group_order;
            first_mismatch = Some(Mismatch {
                g1: group.element_at(k / n).to_string(),
                g2: group.element_at(k % n).to_string(),
                recipe: r,
                formula: f,
            });
            break;
        }
    }
    let all_pairs_agree = first_mismatch.is_none() && lambda.is_some();
    RecipeComparison {
        ell,
        q: trace.q,
        lambda: if all_pairs_agree { lambda } else { None },
        pairs_checked: formula.len(),
        all_pairs_agree,
        first_mismatch,
    }
}

/// `mu_l` over the Cayley table together with a table-valued 2-cochain.
pub fn table_cochain(module: &GroupModule, table: &[u64]) -> Cochain {
    Cochain::from_values(module, 2, table.to_vec()).expect("table has |G|^2 entries")
}

/// How [`twisted_cocycle_failure`] chooses triples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TripleScan {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl TripleScan {
    /// Exhaustive up to `limit` elements, otherwise `count` seeded samples.
    pub fn for_order(order: usize, limit: usize, count: usize, seed: u64) -> Self {
        if order <= limit {
            TripleScan::Exhaustive
        } else {
            TripleScan::Sampled { count, seed }
        }
    }
}

/// First triple violating
/// `eps(s) b(t,u) - b(st,u) + b(s,tu) - b(s,t) = 0 mod l`, with `b` given as
/// a row-major table over the Cayley indexing. Returns the number of
/// triples checked alongside.
pub fn twisted_cocycle_failure(
    group: &TameGroup,
    cayley: &FiniteGroup,
    table: &[u64],
    scan: TripleScan,
) -> (usize, Option<[usize; 3]>) {
    let ell = group.ell();
    let n = cayley.order();
    let eps: Vec<u64> = (0..n).map(|g| group.cyclotomic(&group.element_at(g))).collect();
    let check = |s: usize, t: usize, u: usize| {
        let b = |x: usize, y: usize| table[x * n + y];
        let v = eps[s] * b(t, u) + b(s, cayley.mul(t, u)) + 2 * ell - b(cayley.mul(s, t), u) - b(s, t);
        v % ell == 0
    };
    match scan {
        TripleScan::Exhaustive => {
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        if !check(s, t, u) {
                            return (s * n * n + t * n + u + 1, Some([s, t, u]));
                        }
                    }
                }
            }
            (n * n * n, None)
        }
        TripleScan::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..count {
                let [s, t, u] = [0; 3].map(|_| rng.gen_range(0..n));
                if !check(s, t, u) {
                    return (k + 1, Some([s, t, u]));
                }
            }
            (count, None)
        }
    }
}

/// `mu_l` over a shared Cayley table of the group.
pub fn mu_module(group: &TameGroup, cayley: Arc<FiniteGroup>) -> GroupModule {
    crate::galois_modules::GaloisModule::cyclotomic(group.clone())
        .to_group_module_on(cayley)
        .expect("Cayley table of the same group")
}
