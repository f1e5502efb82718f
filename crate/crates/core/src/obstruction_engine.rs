//! Local invariant predicates and the obstruction classification.
//!
//! The global count comes from the exact sequence
//!
//! ```text
//! 0 -> prod_p H^0(G_p, eps (x) ad) -> Hom(H^2(G_S, ad), F_l) -> Sha^1(G_S, eps (x) ad) -> 0
//! ```
//!
//! so `dim H^2 >= sum_p dim H^0_p + [Sha^1 != 0]`, with equality when every
//! term is known. `Sha^1` is never computed: it is supplied by the caller.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::exact_linalg::FpMatrix;
use crate::galois_modules::{AdjointKind, GaloisModule, ModuleError, ResidualFrobenius};
use crate::tame_group::{GroupError, TameGroup};

/// Symbolic deformation-ring presentation in the level-raising case.
pub const LEVEL_RAISE_RING: &str = "Z_ell[[T1,T2,T3,T]]/(T*(ell - Phi))";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("alpha/beta = {ratio} but q = {q} mod {ell}: Frobenius is not of level-raising shape")]
    FrobeniusShape { ratio: u64, q: u64, ell: u64 },
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

impl From<GroupError> for EngineError {
    fn from(e: GroupError) -> Self {
        EngineError::InvalidParameters(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandingViolation {
    EllDividesLevel,
    EllIsTwo,
    EvenPrimeDividesLevel,
    PrimeCongruentToOne(u64),
}

impl fmt::Display for StandingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandingViolation::EllDividesLevel => write!(f, "l divides N"),
            StandingViolation::EllIsTwo => write!(f, "l = 2"),
            StandingViolation::EvenPrimeDividesLevel => write!(f, "p = 2 divides N"),
            StandingViolation::PrimeCongruentToOne(p) => write!(f, "p = 1 mod l at p = {p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandingCheck {
    pub ok: bool,
    pub violations: Vec<StandingViolation>,
}

impl StandingCheck {
    /// Primes `p | N` flagged for `p = 1 mod l` or `p = 2`.
    pub fn violating_primes(&self) -> Vec<u64> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                StandingViolation::PrimeCongruentToOne(p) => Some(*p),
                StandingViolation::EvenPrimeDividesLevel => Some(2),
                _ => None,
            })
            .collect()
    }
}

/// `l` does not divide `N`, `l` is odd, and every `p | N` is odd with `p != 1 mod l`.
pub fn check_standing(level: u64, ell: u64) -> Result<StandingCheck, EngineError> {
    if level == 0 || !arith::is_prime(ell) {
        return Err(EngineError::InvalidParameters(format!(
            "need N >= 1 and l prime, got N = {level}, l = {ell}"
        )));
    }
    let mut violations = Vec::new();
    if level % ell == 0 {
        violations.push(StandingViolation::EllDividesLevel);
    }
    if ell == 2 {
        violations.push(StandingViolation::EllIsTwo);
    }
    for p in arith::prime_divisors(level) {
        if p == 2 {
            violations.push(StandingViolation::EvenPrimeDividesLevel);
        } else if p % ell == 1 {
            violations.push(StandingViolation::PrimeCongruentToOne(p));
        }
    }
    Ok(StandingCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// Fixed line(s) of `eps (x) ad0` at the level-raising prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRaiseInvariant {
    pub dim: usize,
    pub basis: Vec<Vec<u64>>,
    /// Basis names (`e1`, `e2`, `e3`) of kernel vectors that are coordinate vectors.
    pub generator_tags: Vec<String>,
}

fn coordinate_tag(v: &[u64], names: &[&str]) -> Option<String> {
    let nonzero: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    (nonzero.len() == 1).then(|| names[nonzero[0]].to_string())
}

pub fn levelraise_h0(ell: u64, q: i64, alpha: i64, beta: i64) -> Result<LevelRaiseInvariant, EngineError> {
    let group = TameGroup::new(ell, q)?;
    let frob = ResidualFrobenius::new(ell, q, alpha, beta)?;
    if !frob.is_level_raising() {
        return Err(EngineError::FrobeniusShape {
            ratio: frob.ratio().value(),
            q: group.q(),
            ell,
        });
    }
    let module = GaloisModule::build_adjoint(group, &frob, AdjointKind::TraceZero, true)?;
    let basis = module.fixed_space();
    let generator_tags = basis.iter().filter_map(|v| coordinate_tag(v, &["e1", "e2", "e3"])).collect();
    Ok(LevelRaiseInvariant {
        dim: basis.len(),
        basis,
        generator_tags,
    })
}

fn require_p_at_least_5(p: u64, ell: u64) -> Result<(), EngineError> {
    if p < 5 || !arith::is_prime(p) {
        return Err(EngineError::InvalidParameters(format!("p = {p} must be a prime >= 5")));
    }
    if ell < 3 || !arith::is_prime(ell) {
        return Err(EngineError::InvalidParameters(format!("l = {ell} must be an odd prime")));
    }
    Ok(())
}

/// Local invariants vanish at a supercuspidal prime when `p != 1 mod l`.
pub fn supercuspidal_vanishes(p: u64, ell: u64) -> Result<bool, EngineError> {
    require_p_at_least_5(p, ell)?;
    Ok(p % ell != 1)
}

/// Local invariants at a principal-series prime are nonzero iff `p^4 = 1 mod l`.
pub fn principal_series_nonzero(p: u64, ell: u64) -> Result<bool, EngineError> {
    require_p_at_least_5(p, ell)?;
    Ok(arith::pow_mod(p, 4, ell) == 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllInvariant {
    Vanishes,
    Inapplicable,
}

/// Vanishing at `l` needs a congruence prime with `l` not dividing the
/// modular degree and `a_l != 0 mod l`; otherwise nothing is concluded.
pub fn ell_invariant_vanishes(a_ell: i64, modular_degree: u64, ell: u64, is_congruence_prime: bool) -> EllInvariant {
    let holds = is_congruence_prime && modular_degree % ell != 0 && arith::reduce(a_ell, ell) != 0;
    if holds {
        EllInvariant::Vanishes
    } else {
        EllInvariant::Inapplicable
    }
}

/// `H^0(G_p, eps (x) ad)` for the residual shape `F -> diag(p, 1)`,
/// `tau -> [[1,1],[0,1]]` on the tame quotient at `p`.
pub fn steinberg_local_h0(p: u64, ell: u64) -> Result<usize, EngineError> {
    if p % ell == 0 {
        return Err(EngineError::InvalidParameters(format!("p = {p} equals l")));
    }
    let group = TameGroup::new(ell, p as i64)?;
    let f = FpMatrix::diagonal(&[p % ell, 1], ell);
    let t = FpMatrix::from_rows(&[vec![1, 1], vec![0, 1]], ell).expect("2x2");
    let module = GaloisModule::adjoint_from_images(group, &f, &t, AdjointKind::Full, true)?;
    Ok(module.fixed_space().len())
}

/// `H^0(G_q, eps (x) ad)` for the unramified level-raising shape.
fn levelraise_full_h0(ell: u64, q: i64, alpha: i64, beta: i64) -> Result<usize, EngineError> {
    let group = TameGroup::new(ell, q)?;
    let frob = ResidualFrobenius::new(ell, q, alpha, beta)?;
    Ok(GaloisModule::build_adjoint(group, &frob, AdjointKind::Full, true)?
        .fixed_space()
        .len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LocalType {
    Steinberg,
    Supercuspidal,
    PrincipalSeries,
    AtEll {
        a_ell: i64,
        modular_degree: u64,
        is_congruence_prime: bool,
    },
    LevelRaiseQ {
        alpha: i64,
        beta: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub level: u64,
    pub ell: u64,
    /// Extra finite places beyond those dividing `N l` (the level-raising prime).
    #[serde(default)]
    pub extra_places: Vec<u64>,
    pub local_types: BTreeMap<u64, LocalType>,
    /// Caller assertion that `H^2(G_S, ad) = 0` before adding the extra places.
    #[serde(default)]
    pub global_h2_vanishing_asserted: bool,
}

impl ProblemInstance {
    /// Finite places of `S`: primes dividing `N l` and the extra places.
    pub fn finite_places(&self) -> Vec<u64> {
        let mut s = arith::prime_divisors(self.level * self.ell);
        s.extend(&self.extra_places);
        s.sort_unstable();
        s.dedup();
        s
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.level == 0 || self.ell < 5 || !arith::is_prime(self.ell) {
            return Err(EngineError::Malformed(format!(
                "need N >= 1 and a prime l >= 5, got N = {}, l = {}",
                self.level, self.ell
            )));
        }
        let places = self.finite_places();
        for (&p, t) in &self.local_types {
            if !places.contains(&p) {
                return Err(EngineError::Malformed(format!("local type given at {p}, which is not in S")));
            }
            let at_ell = matches!(t, LocalType::AtEll { .. });
            if at_ell != (p == self.ell) {
                return Err(EngineError::Malformed(format!("local type at {p} does not match the place")));
            }
            if matches!(t, LocalType::LevelRaiseQ { .. }) && self.level % p == 0 {
                return Err(EngineError::Malformed(format!("level-raising prime {p} divides N")));
            }
        }
        Ok(())
    }
}

/// Local invariant dimension, possibly only bounded below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalH0 {
    pub local_type: String,
    pub dim_lower_bound: usize,
    /// Whether `dim_lower_bound` is the exact dimension.
    pub exact: bool,
    pub method: String,
}

impl LocalH0 {
    fn exact(local_type: &str, dim: usize, method: impl Into<String>) -> Self {
        Self {
            local_type: local_type.into(),
            dim_lower_bound: dim,
            exact: true,
            method: method.into(),
        }
    }

    fn bound(local_type: &str, dim: usize, method: impl Into<String>) -> Self {
        Self {
            local_type: local_type.into(),
            dim_lower_bound: dim,
            exact: false,
            method: method.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "primes", rename_all = "snake_case")]
pub enum Classification {
    Unobstructed,
    LocallyObstructed(Vec<u64>),
    GloballyObstructed,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub standing_ok: bool,
    pub standing_violations: Vec<String>,
    pub places: Vec<u64>,
    pub local_h0: BTreeMap<u64, LocalH0>,
    pub sha1_nonzero: TriState,
    pub classification: Classification,
    pub hom_h2_dim_lower_bound: usize,
    /// Whether the lower bound is the exact dimension.
    pub bound_is_exact: bool,
    pub invariant_generator: Option<String>,
    pub ring_descriptor: Option<String>,
    pub notes: Vec<String>,
}

fn local_entry(instance: &ProblemInstance, p: u64, t: &LocalType) -> Result<LocalH0, EngineError> {
    let ell = instance.ell;
    Ok(match t {
        LocalType::Steinberg => LocalH0::exact(
            "steinberg",
            steinberg_local_h0(p, ell)?,
            "fixed space of eps (x) ad with F -> diag(p,1), tau -> [[1,1],[0,1]]",
        ),
        LocalType::Supercuspidal => {
            if supercuspidal_vanishes(p, ell)? {
                LocalH0::exact("supercuspidal", 0, "p != 1 mod l")
            } else {
                LocalH0::bound("supercuspidal", 0, "p = 1 mod l: no conclusion")
            }
        }
        LocalType::PrincipalSeries => {
            if principal_series_nonzero(p, ell)? {
                LocalH0::bound("principal_series", 1, "p^4 = 1 mod l")
            } else {
                LocalH0::exact("principal_series", 0, "p^4 != 1 mod l")
            }
        }
        LocalType::AtEll {
            a_ell,
            modular_degree,
            is_congruence_prime,
        } => match ell_invariant_vanishes(*a_ell, *modular_degree, ell, *is_congruence_prime) {
            EllInvariant::Vanishes => LocalH0::exact("at_ell", 0, "congruence prime, l !| m_E, a_l != 0"),
            EllInvariant::Inapplicable => LocalH0::bound("at_ell", 0, "hypotheses not met: no conclusion"),
        },
        LocalType::LevelRaiseQ { alpha, beta } => {
            let lr = levelraise_h0(ell, p as i64, *alpha, *beta)?;
            let full = levelraise_full_h0(ell, p as i64, *alpha, *beta)?;
            LocalH0::exact(
                "level_raise_q",
                full,
                format!("fixed space of eps (x) ad; trace-zero part has dim {}", lr.dim),
            )
        }
    })
}

pub fn classify(instance: &ProblemInstance, sha1_nonzero: TriState) -> Result<ObstructionReport, EngineError> {
    instance.validate()?;
    let ell = instance.ell;
    let standing = check_standing(instance.level, ell)?;
    let mut local_h0 = BTreeMap::new();
    let mut notes = vec!["local terms use eps (x) ad; the trace-zero variant differs only by the scalar line".to_string()];
    for (&p, t) in &instance.local_types {
        local_h0.insert(p, local_entry(instance, p, t)?);
    }
    let untyped: Vec<u64> = instance
        .finite_places()
        .into_iter()
        .filter(|p| !instance.local_types.contains_key(p))
        .collect();
    if !untyped.is_empty() {
        notes.push(format!("no local type supplied at {untyped:?}; treated as undetermined"));
    }

    let positive: Vec<u64> = local_h0
        .iter()
        .filter(|(_, e)| e.dim_lower_bound > 0)
        .map(|(&p, _)| p)
        .collect();
    let all_exact = untyped.is_empty() && local_h0.values().all(|e| e.exact);
    let local_sum: usize = local_h0.values().map(|e| e.dim_lower_bound).sum();
    let sha_term = usize::from(sha1_nonzero == TriState::Yes);
    let hom_h2_dim_lower_bound = local_sum + sha_term;
    let bound_is_exact = all_exact && sha1_nonzero != TriState::Unknown;

    let classification = if !positive.is_empty() {
        Classification::LocallyObstructed(positive)
    } else if all_exact {
        match sha1_nonzero {
            TriState::Yes => Classification::GloballyObstructed,
            TriState::No => Classification::Unobstructed,
            TriState::Unknown => Classification::Unknown,
        }
    } else {
        Classification::Unknown
    };

    let mut invariant_generator = None;
    let mut ring_descriptor = None;
    let level_raise = instance
        .local_types
        .iter()
        .find(|(_, t)| matches!(t, LocalType::LevelRaiseQ { .. }));
    if let Some((&q, LocalType::LevelRaiseQ { alpha, beta })) = level_raise {
        let lr = levelraise_h0(ell, q as i64, *alpha, *beta)?;
        let q2_is_one = arith::pow_mod(q % ell, 2, ell) == 1;
        if lr.dim == 1 {
            invariant_generator = lr.generator_tags.first().cloned();
        }
        if instance.global_h2_vanishing_asserted && !q2_is_one {
            ring_descriptor = Some(LEVEL_RAISE_RING.to_string());
            notes.push("Phi is an unspecified Frobenius power series; kept symbolic".into());
            notes.push("obstruction class detected by pairing with the invariant line e3".into());
        } else if !q2_is_one {
            notes.push("global H^2 vanishing not asserted: no ring descriptor".into());
        } else {
            notes.push("q^2 = 1 mod l: level-raising invariant line is not unique".into());
        }
    }

    Ok(ObstructionReport {
        standing_ok: standing.ok,
        standing_violations: standing.violations.iter().map(ToString::to_string).collect(),
        places: instance.finite_places(),
        local_h0,
        sha1_nonzero,
        classification,
        hom_h2_dim_lower_bound,
        bound_is_exact,
        invariant_generator,
        ring_descriptor,
        notes,
    })
}

/// The level-raise instance at `q` for a form of level `N`, with only the
/// extra place carrying a local type.
pub fn level_raise_instance(level: u64, ell: u64, q: u64, alpha: i64, beta: i64, asserted: bool) -> ProblemInstance {
    ProblemInstance {
        level,
        ell,
        extra_places: vec![q],
        local_types: BTreeMap::from([(q, LocalType::LevelRaiseQ { alpha, beta })]),
        global_h2_vanishing_asserted: asserted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standing_examples() {
        assert!(check_standing(11, 7).unwrap().ok);
        let bad = check_standing(11, 5).unwrap();
        assert_eq!(bad.violations, vec![StandingViolation::PrimeCongruentToOne(11)]);
        assert_eq!(bad.violations[0].to_string(), "p = 1 mod l at p = 11");
        assert!(check_standing(1, 3).unwrap().ok);
        let many = check_standing(2 * 5 * 11, 5).unwrap();
        assert_eq!(many.violating_primes(), vec![2, 11]);
        assert!(many.violations.contains(&StandingViolation::EllDividesLevel));
    }

    #[test]
    fn levelraise_examples() {
        let r = levelraise_h0(5, 2, 2, 1).unwrap();
        assert_eq!((r.dim, r.generator_tags.clone()), (1, vec!["e3".to_string()]));
        let r = levelraise_h0(5, 4, 4, 1).unwrap();
        assert_eq!(r.dim, 2);
        assert_eq!(r.generator_tags, vec!["e2".to_string(), "e3".to_string()]);
        assert_eq!(levelraise_h0(7, 1, 3, 3).unwrap().dim, 3);
        assert!(matches!(levelraise_h0(5, 2, 1, 1), Err(EngineError::FrobeniusShape { .. })));
    }

    #[test]
    fn predicate_examples() {
        assert!(supercuspidal_vanishes(7, 5).unwrap());
        assert!(!supercuspidal_vanishes(11, 5).unwrap());
        assert!(supercuspidal_vanishes(3, 7).is_err());
        assert!(principal_series_nonzero(7, 5).unwrap());
        assert!(!principal_series_nonzero(7, 11).unwrap());
        assert!(principal_series_nonzero(11, 5).unwrap());
    }

    #[test]
    fn ell_invariant_examples() {
        assert_eq!(ell_invariant_vanishes(2, 3, 5, true), EllInvariant::Vanishes);
        assert_eq!(ell_invariant_vanishes(0, 3, 5, true), EllInvariant::Inapplicable);
        assert_eq!(ell_invariant_vanishes(2, 5, 5, true), EllInvariant::Inapplicable);
        assert_eq!(ell_invariant_vanishes(2, 3, 5, false), EllInvariant::Inapplicable);
    }

    #[test]
    fn steinberg_invariants_appear_only_for_p_minus_one() {
        // p = 13 = -1 mod 7, p = 11 = 4 mod 7, p = 29 = 1 mod 7
        assert_eq!(steinberg_local_h0(13, 7).unwrap(), 1);
        assert_eq!(steinberg_local_h0(11, 7).unwrap(), 0);
        assert_eq!(steinberg_local_h0(29, 7).unwrap(), 2);
    }

    #[test]
    fn level_raise_report() {
        let inst = level_raise_instance(11, 5, 2, 2, 1, true);
        let r = classify(&inst, TriState::No).unwrap();
        assert_eq!(r.hom_h2_dim_lower_bound, 1);
        assert_eq!(r.classification, Classification::LocallyObstructed(vec![2]));
        assert_eq!(r.invariant_generator.as_deref(), Some("e3"));
        assert!(r.ring_descriptor.unwrap().contains("T*(ell - Phi)"));
    }

    #[test]
    fn level_raise_without_assertion_has_no_descriptor() {
        let inst = level_raise_instance(11, 5, 2, 2, 1, false);
        assert_eq!(classify(&inst, TriState::No).unwrap().ring_descriptor, None);
    }

    fn all_zero_instance() -> ProblemInstance {
        // N = 11, l = 7: Steinberg at 11 (11 = 4 mod 7), vanishing at 7
        ProblemInstance {
            level: 11,
            ell: 7,
            extra_places: vec![],
            local_types: BTreeMap::from([
                (11, LocalType::Steinberg),
                (
                    7,
                    LocalType::AtEll {
                        a_ell: 2,
                        modular_degree: 1,
                        is_congruence_prime: true,
                    },
                ),
            ]),
            global_h2_vanishing_asserted: false,
        }
    }

    #[test]
    fn sha_decides_when_local_terms_vanish() {
        let inst = all_zero_instance();
        let r = classify(&inst, TriState::No).unwrap();
        assert_eq!(r.classification, Classification::Unobstructed);
        assert_eq!(r.hom_h2_dim_lower_bound, 0);
        let r = classify(&inst, TriState::Yes).unwrap();
        assert_eq!(r.classification, Classification::GloballyObstructed);
        assert_eq!(r.hom_h2_dim_lower_bound, 1);
        assert!(r.bound_is_exact);
        assert_eq!(classify(&inst, TriState::Unknown).unwrap().classification, Classification::Unknown);
    }

    #[test]
    fn malformed_instances_rejected() {
        let mut inst = all_zero_instance();
        inst.local_types.insert(13, LocalType::Supercuspidal);
        assert!(matches!(classify(&inst, TriState::No), Err(EngineError::Malformed(_))));
        let mut inst = all_zero_instance();
        inst.local_types.insert(11, LocalType::AtEll {
            a_ell: 1,
            modular_degree: 1,
            is_congruence_prime: true,
        });
        assert!(matches!(classify(&inst, TriState::No), Err(EngineError::Malformed(_))));
    }
}
