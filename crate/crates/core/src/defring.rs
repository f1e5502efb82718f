//! Polynomials in up to six variables over `Z/l^K`, truncated above a total
//! degree `D`, and the ideal cut out by imposing `F tau F^-1 = tau^p` on
//! parametrized 2x2 matrices.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::exact_linalg::{self, LinalgError, ZmodScalar};

pub const MAX_VARS: usize = 6;

/// Exponent vector; unused variables have exponent 0.
pub type Monomial = [u8; MAX_VARS];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefringError {
    #[error("ring parameters differ")]
    RingMismatch,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("constant term {0} is not a unit")]
    NonUnit(u64),
    #[error("matrix is not invertible: determinant has non-unit constant term")]
    NotInvertible,
    #[error("p = {p} is divisible by l = {ell}")]
    BadExponent { p: u64, ell: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TruncRing {
    pub nvars: usize,
    pub ell: u64,
    pub precision: u32,
    pub degree_cap: u32,
    modulus: u64,
}

impl TruncRing {
    pub fn new(nvars: usize, ell: u64, precision: u32, degree_cap: u32) -> Result<Self, DefringError> {
        if nvars == 0 || nvars > MAX_VARS {
            return Err(DefringError::InvalidRing(format!("need 1..={MAX_VARS} variables, got {nvars}")));
        }
        if degree_cap > 60 {
            return Err(DefringError::InvalidRing(format!("degree cap {degree_cap} too large")));
        }
        let modulus = exact_linalg::zmod_modulus(ell, precision)?;
        Ok(Self {
            nvars,
            ell,
            precision,
            degree_cap,
            modulus,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zero(&self) -> TruncPoly {
        TruncPoly {
            ring: *self,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(&self, c: i64) -> TruncPoly {
        self.monomial([0; MAX_VARS], c)
    }

    pub fn one(&self) -> TruncPoly {
        self.constant(1)
    }

    /// `T_(i+1)`, zero-based.
    pub fn var(&self, i: usize) -> TruncPoly {
        assert!(i < self.nvars, "variable index out of range");
        let mut m = [0; MAX_VARS];
        m[i] = 1;
        self.monomial(m, 1)
    }

    pub fn monomial(&self, m: Monomial, c: i64) -> TruncPoly {
        let mut p = self.zero();
        let c = arith::reduce(c, self.modulus);
        if c != 0 && degree(&m) <= self.degree_cap {
            p.terms.insert(m, c);
        }
        p
    }
}

fn degree(m: &Monomial) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Element of `(Z/l^K)[T_1..T_n] / (monomials of degree > D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    ring: TruncRing,
    terms: BTreeMap<Monomial, u64>,
}

impl TruncPoly {
    pub fn ring(&self) -> &TruncRing {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> u64 {
        self.terms.get(&[0; MAX_VARS]).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.constant_term() % self.ring.ell != 0
    }

    /// Smallest total degree of a term, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(degree).min()
    }

    pub fn homogeneous_part(&self, d: u32) -> TruncPoly {
        TruncPoly {
            ring: self.ring,
            terms: self.terms.iter().filter(|(m, _)| degree(m) == d).map(|(m, c)| (*m, *c)).collect(),
        }
    }

    fn check(&self, other: &TruncPoly) -> Result<(), DefringError> {
        if self.ring != other.ring {
            return Err(DefringError::RingMismatch);
        }
        Ok(())
    }

    fn insert_add(&mut self, m: Monomial, c: u64) {
        let n = self.ring.modulus;
        let e = self.terms.entry(m).or_insert(0);
        *e = (*e + c) % n;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &TruncPoly) -> Result<TruncPoly, DefringError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.insert_add(*m, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncPoly {
        self.scale(-1)
    }

    pub fn sub(&self, other: &TruncPoly) -> Result<TruncPoly, DefringError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: i64) -> TruncPoly {
        let n = self.ring.modulus;
        let s = arith::reduce(s, n);
        let mut out = self.ring.zero();
        for (m, &c) in &self.terms {
            out.insert_add(*m, arith::mul_mod(c, s, n));
        }
        out
    }

    pub fn mul(&self, other: &TruncPoly) -> Result<TruncPoly, DefringError> {
        self.check(other)?;
        let n = self.ring.modulus;
        let cap = self.ring.degree_cap;
        let mut out = self.ring.zero();
        for (ma, &ca) in &self.terms {
            let da = degree(ma);
            for (mb, &cb) in &other.terms {
                if da + degree(mb) > cap {
                    continue;
                }
                let mut m = *ma;
                for (x, y) in m.iter_mut().zip(mb) {
                    *x += y;
                }
                out.insert_add(m, arith::mul_mod(ca, cb, n));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> TruncPoly {
        let mut result = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same ring");
            }
            base = base.mul(&base).expect("same ring");
            e >>= 1;
        }
        result
    }

    /// `u^-1 = c^-1 sum_{k <= D} (1 - c^-1 u)^k` where `c` is the constant term.
    pub fn invert_unit(&self) -> Result<TruncPoly, DefringError> {
        let c = self.constant_term();
        if c % self.ring.ell == 0 {
            return Err(DefringError::NonUnit(c));
        }
        let zc = ZmodScalar::new(c as i64, self.ring.ell, self.ring.precision)?;
        let c_inv = exact_linalg::invert_unit(zc)?.value() as i64;
        let x = self.ring.one().sub(&self.scale(c_inv))?;
        let mut sum = self.ring.one();
        let mut power = self.ring.one();
        for _ in 0..self.ring.degree_cap {
            power = power.mul(&x)?;
            sum = sum.add(&power)?;
        }
        Ok(sum.scale(c_inv))
    }

    /// Renames `T_(i+1)` to `T_(perm[i]+1)`.
    pub fn relabel(&self, perm: &[usize]) -> TruncPoly {
        let mut out = self.ring.zero();
        for (m, &c) in &self.terms {
            let mut nm = [0; MAX_VARS];
            for (i, &e) in m.iter().enumerate().take(self.ring.nvars) {
                nm[perm.get(i).copied().unwrap_or(i)] += e;
            }
            out.insert_add(nm, c);
        }
        out
    }

    /// Coefficients keyed by monomial strings such as `T1*T2^2` (`1` for the constant).
    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.terms.iter().map(|(m, &c)| (monomial_name(m), c)).collect()
    }

    /// Exact division by `d`, both homogeneous, when the lex-leading
    /// coefficient of `d` is a unit.
    fn divide_homogeneous(&self, d: &TruncPoly) -> Option<TruncPoly> {
        let n = self.ring.modulus;
        let (&lm, &lc) = d.terms.iter().next_back()?;
        let lc_inv = arith::inv_mod(lc, n)?;
        let mut rem = self.clone();
        let mut quot = self.ring.zero();
        while let Some((&m, &c)) = rem.terms.iter().next_back() {
            if m.iter().zip(&lm).any(|(a, b)| a < b) {
                return None;
            }
            let mut qm = m;
            for (x, y) in qm.iter_mut().zip(&lm) {
                *x -= y;
            }
            let qc = arith::mul_mod(c, lc_inv, n);
            let term = TruncPoly {
                ring: self.ring,
                terms: BTreeMap::from([(qm, qc)]),
            };
            quot = quot.add(&term).ok()?;
            rem = rem.sub(&term.mul(d).ok()?).ok()?;
        }
        Some(quot)
    }
}

fn monomial_name(m: &Monomial) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("T{}", i + 1) } else { format!("T{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.ring.modulus;
        let mut terms: Vec<(&Monomial, &u64)> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (degree(m), std::cmp::Reverse(**m)));
        let rendered: Vec<String> = terms
            .into_iter()
            .map(|(m, &c)| {
                // print residues above n/2 as negatives
                let (sign, mag) = if c > n / 2 { ("-", n - c) } else { ("", c) };
                let name = monomial_name(m);
                match (mag, name.as_str()) {
                    (_, "1") => format!("{sign}{mag}"),
                    (1, _) => format!("{sign}{name}"),
                    _ => format!("{sign}{mag}*{name}"),
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + ").replace("+ -", "- "))
    }
}

/// If `g = u t` for a unit `u` of the truncated ring, returns `u`.
pub fn unit_multiple(g: &TruncPoly, t: &TruncPoly) -> Option<TruncPoly> {
    if g.ring != t.ring {
        return None;
    }
    let ring = t.ring;
    let m = t.order()?;
    if g.order().is_some_and(|o| o < m) {
        return None;
    }
    let t_low = t.homogeneous_part(m);
    let mut parts: Vec<TruncPoly> = Vec::new();
    for d in m..=ring.degree_cap {
        let mut r = g.homogeneous_part(d);
        for j in (m + 1)..=d {
            let k = (d - j) as usize;
            let prod = parts[k].mul(&t.homogeneous_part(j)).ok()?;
            r = r.sub(&prod).ok()?;
        }
        parts.push(if r.is_zero() {
            ring.zero()
        } else {
            r.divide_homogeneous(&t_low)?
        });
    }
    let u = parts.iter().try_fold(ring.zero(), |acc, p| acc.add(p)).ok()?;
    (u.is_unit() && u.mul(t).ok()? == *g).then_some(u)
}

/// 2x2 matrix with entries in a truncated ring, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixOverTrunc {
    pub entries: [TruncPoly; 4],
}

impl MatrixOverTrunc {
    pub fn new(entries: [TruncPoly; 4]) -> Result<Self, DefringError> {
        for e in &entries[1..] {
            entries[0].check(e)?;
        }
        Ok(Self { entries })
    }

    pub fn identity(ring: &TruncRing) -> Self {
        Self {
            entries: [ring.one(), ring.zero(), ring.zero(), ring.one()],
        }
    }

    fn ring(&self) -> TruncRing {
        self.entries[0].ring
    }

    pub fn mul(&self, o: &MatrixOverTrunc) -> Result<MatrixOverTrunc, DefringError> {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &o.entries;
        Ok(MatrixOverTrunc {
            entries: [
                a.mul(e)?.add(&b.mul(g)?)?,
                a.mul(f)?.add(&b.mul(h)?)?,
                c.mul(e)?.add(&d.mul(g)?)?,
                c.mul(f)?.add(&d.mul(h)?)?,
            ],
        })
    }

    pub fn det(&self) -> Result<TruncPoly, DefringError> {
        let [a, b, c, d] = &self.entries;
        a.mul(d)?.sub(&b.mul(c)?)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().map(|d| d.is_unit()).unwrap_or(false)
    }

    pub fn inverse(&self) -> Result<MatrixOverTrunc, DefringError> {
        let det = self.det()?;
        if !det.is_unit() {
            return Err(DefringError::NotInvertible);
        }
        let di = det.invert_unit()?;
        let [a, b, c, d] = &self.entries;
        Ok(MatrixOverTrunc {
            entries: [d.mul(&di)?, b.neg().mul(&di)?, c.neg().mul(&di)?, a.mul(&di)?],
        })
    }

    pub fn pow(&self, mut e: u64) -> Result<MatrixOverTrunc, DefringError> {
        let mut result = MatrixOverTrunc::identity(&self.ring());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(result)
    }

    pub fn sub(&self, o: &MatrixOverTrunc) -> Result<MatrixOverTrunc, DefringError> {
        let mut entries = self.entries.clone();
        for (x, y) in entries.iter_mut().zip(&o.entries) {
            *x = x.sub(y)?;
        }
        Ok(MatrixOverTrunc { entries })
    }

    /// Constant terms reduced mod `l`.
    pub fn residual(&self) -> [u64; 4] {
        let ell = self.ring().ell;
        [0, 1, 2, 3].map(|i| self.entries[i].constant_term() % ell)
    }
}

/// `E = rho(F) rho(tau) rho(F)^-1 (rho(tau)^p)^-1 - 1`; its nonzero entries
/// in the order (1,1), (1,2), (2,1), (2,2).
pub fn tame_relation_ideal(
    rho_f: &MatrixOverTrunc,
    rho_tau: &MatrixOverTrunc,
    p: u64,
) -> Result<Vec<TruncPoly>, DefringError> {
    let ring = rho_f.ring();
    if rho_tau.ring() != ring {
        return Err(DefringError::RingMismatch);
    }
    if p % ring.ell == 0 {
        return Err(DefringError::BadExponent { p, ell: ring.ell });
    }
    let conj = rho_f.mul(rho_tau)?.mul(&rho_f.inverse()?)?;
    let tau_p_inv = rho_tau.pow(p)?.inverse()?;
    let e = conj.mul(&tau_p_inv)?.sub(&MatrixOverTrunc::identity(&ring))?;
    Ok(e.entries.into_iter().filter(|x| !x.is_zero()).collect())
}

/// Whether the reductions look like `F ~ [[p, *], [0, 1]]`, `tau ~ [[1, *], [0, 1]]`.
pub fn steinberg_residual_shape(rho_f: &MatrixOverTrunc, rho_tau: &MatrixOverTrunc, p: u64) -> bool {
    let ell = rho_f.ring().ell;
    let [a, _, c, d] = rho_f.residual();
    let [e, _, g, h] = rho_tau.residual();
    a == p % ell && c == 0 && d == 1 && e == 1 && g == 0 && h == 1
}

/// `T1 T2 - T2 - p T3 T4 + T4` in the first four variables.
pub fn steinberg_target(ring: &TruncRing, p: u64) -> Result<TruncPoly, DefringError> {
    if ring.nvars < 4 {
        return Err(DefringError::InvalidRing("need at least four variables".into()));
    }
    let t = |i| ring.var(i);
    t(0).mul(&t(1))?
        .sub(&t(1))?
        .sub(&t(2).mul(&t(3))?.scale(p as i64))?
        .add(&t(3))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub candidate: String,
    pub degree_cap: u32,
    pub relabeling: Vec<usize>,
    pub residual_shape_ok: bool,
    pub generators: Vec<BTreeMap<String, u64>>,
    pub generator_strings: Vec<String>,
    pub target: String,
    pub on_the_nose: bool,
    pub up_to_unit: bool,
    pub matched: bool,
}

/// Compares the relation ideal of `(rho_f, rho_tau)` with the target
/// relation. `relabeling[i]` is the target index of the `i`-th variable.
pub fn steinberg_match(
    candidate: &str,
    rho_f: &MatrixOverTrunc,
    rho_tau: &MatrixOverTrunc,
    p: u64,
    relabeling: &[usize],
) -> Result<MatchReport, DefringError> {
    let ring = rho_f.ring();
    let target = steinberg_target(&ring, p)?;
    let gens: Vec<TruncPoly> = tame_relation_ideal(rho_f, rho_tau, p)?
        .into_iter()
        .map(|g| g.relabel(relabeling))
        .collect();
    let single = (gens.len() == 1).then(|| &gens[0]);
    let on_the_nose = single.is_some_and(|g| *g == target);
    let up_to_unit = single.is_some_and(|g| unit_multiple(g, &target).is_some());
    Ok(MatchReport {
        candidate: candidate.to_string(),
        degree_cap: ring.degree_cap,
        relabeling: relabeling.to_vec(),
        residual_shape_ok: steinberg_residual_shape(rho_f, rho_tau, p),
        generators: gens.iter().map(TruncPoly::to_map).collect(),
        generator_strings: gens.iter().map(ToString::to_string).collect(),
        target: target.to_string(),
        on_the_nose,
        up_to_unit,
        matched: up_to_unit,
    })
}

/// Slots of the candidate family: diagonal entries of `F` and `tau` (which
/// take the form `1 + T`, with the `(1,1)` entry of `F` scaled by `p`) and
/// the two upper-right entries (which take the form `T`).
const SLOTS: [&str; 6] = ["F11", "F22", "tau11", "tau22", "F12", "tau12"];

/// One member of the family: `assignment[k]` is the slot carrying `T_(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub name: String,
    pub assignment: [usize; 4],
}

/// All injective placements of `T1..T4` into the six slots, in lexicographic order.
pub fn candidate_family() -> Vec<Candidate> {
    let mut out = Vec::new();
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                for d in 0..6 {
                    let s = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| s[i] != s[j])) {
                        let name = s
                            .iter()
                            .enumerate()
                            .map(|(k, &slot)| format!("T{}->{}", k + 1, SLOTS[slot]))
                            .collect::<Vec<_>>()
                            .join(",");
                        out.push(Candidate { name, assignment: s });
                    }
                }
            }
        }
    }
    out
}

/// The matrices of a family member. Unassigned diagonal slots are 1 and
/// unassigned upper-right slots 0.
pub fn candidate_matrices(
    ring: &TruncRing,
    cand: &Candidate,
    p: u64,
) -> Result<(MatrixOverTrunc, MatrixOverTrunc), DefringError> {
    let mut slot = [ring.one(), ring.one(), ring.one(), ring.one(), ring.zero(), ring.zero()];
    for (k, &s) in cand.assignment.iter().enumerate() {
        slot[s] = if s < 4 { ring.one().add(&ring.var(k))? } else { ring.var(k) };
    }
    let [f11, f22, t11, t22, f12, t12] = slot;
    let rho_f = MatrixOverTrunc::new([f11.scale(p as i64), f12, ring.zero(), f22])?;
    let rho_tau = MatrixOverTrunc::new([t11, t12, ring.zero(), t22])?;
    Ok((rho_f, rho_tau))
}

/// Runs [`steinberg_match`] on every family member with the identity relabeling.
pub fn search_family(ell: u64, precision: u32, degree_cap: u32, p: u64) -> Result<Vec<MatchReport>, DefringError> {
    let ring = TruncRing::new(4, ell, precision, degree_cap)?;
    candidate_family()
        .iter()
        .map(|c| {
            let (f, t) = candidate_matrices(&ring, c, p)?;
            steinberg_match(&c.name, &f, &t, p, &[0, 1, 2, 3])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(d: u32) -> TruncRing {
        TruncRing::new(4, 5, 2, d).unwrap()
    }

    #[test]
    fn geometric_series() {
        let r = ring(3);
        let t1 = r.var(0);
        let u = r.one().add(&t1).unwrap();
        let s = r.one().sub(&t1).unwrap().add(&t1.pow(2)).unwrap().sub(&t1.pow(3)).unwrap();
        assert_eq!(u.mul(&s).unwrap(), r.one());
        assert_eq!(u.invert_unit().unwrap(), s);
        assert_eq!(t1.invert_unit(), Err(DefringError::NonUnit(0)));
    }

    #[test]
    fn truncation_drops_high_degree() {
        let r = ring(2);
        let t = r.var(0).mul(&r.var(1)).unwrap().mul(&r.var(2)).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn automatic_relation_has_empty_ideal() {
        let r = ring(3);
        let p = 3;
        let f = MatrixOverTrunc::new([r.constant(p as i64), r.var(3), r.zero(), r.one()]).unwrap();
        let tau = MatrixOverTrunc::new([r.one(), r.var(1), r.zero(), r.one()]).unwrap();
        assert!(tame_relation_ideal(&f, &tau, p).unwrap().is_empty());
        let id = MatrixOverTrunc::identity(&r);
        assert!(tame_relation_ideal(&f, &id, p).unwrap().is_empty());
        let rep = steinberg_match("auto", &f, &tau, p, &[0, 1, 2, 3]).unwrap();
        assert!(rep.generators.is_empty() && !rep.matched);
    }

    #[test]
    fn unit_scaled_frobenius_gives_one_defect() {
        let r = ring(3);
        let p = 3;
        let one_plus = |i| r.one().add(&r.var(i)).unwrap();
        let f = MatrixOverTrunc::new([one_plus(0).scale(p), r.var(3), r.zero(), one_plus(2)]).unwrap();
        let tau = MatrixOverTrunc::new([r.one(), r.var(1), r.zero(), r.one()]).unwrap();
        let gens = tame_relation_ideal(&f, &tau, p as u64).unwrap();
        assert_eq!(gens.len(), 1);
        // p T2 (T1 - T3) / (1 + T3)
        let expected = r
            .var(1)
            .mul(&r.var(0).sub(&r.var(2)).unwrap())
            .unwrap()
            .scale(p)
            .mul(&one_plus(2).invert_unit().unwrap())
            .unwrap();
        assert_eq!(gens[0], expected);
    }

    #[test]
    fn target_matches_itself() {
        let r = ring(3);
        let t = steinberg_target(&r, 3).unwrap();
        assert_eq!(unit_multiple(&t, &t), Some(r.one()));
        let u = r.one().add(&r.var(2)).unwrap().scale(2);
        let g = u.mul(&t).unwrap();
        assert_eq!(unit_multiple(&g, &t), Some(u));
        let not_multiple = t.add(&r.var(0)).unwrap();
        assert_eq!(unit_multiple(&not_multiple, &t), None);
        assert_eq!(t.to_string(), "-T2 + T4 + T1*T2 - 3*T3*T4");
    }

    #[test]
    fn relabel_permutes_variables() {
        let r = ring(2);
        let p = r.var(0).mul(&r.var(1)).unwrap();
        assert_eq!(p.relabel(&[2, 3, 0, 1]), r.var(2).mul(&r.var(3)).unwrap());
    }

    #[test]
    fn family_has_360_members() {
        let fam = candidate_family();
        assert_eq!(fam.len(), 360);
        assert_eq!(fam[0].assignment, [0, 1, 2, 3]);
    }

    #[test]
    fn non_invertible_frobenius_rejected() {
        let r = ring(2);
        let f = MatrixOverTrunc::new([r.var(0), r.zero(), r.zero(), r.one()]).unwrap();
        let tau = MatrixOverTrunc::identity(&r);
        assert_eq!(tame_relation_ideal(&f, &tau, 3), Err(DefringError::NotInvertible));
        assert!(matches!(tame_relation_ideal(&tau, &tau, 10), Err(DefringError::BadExponent { .. })));
    }
}
