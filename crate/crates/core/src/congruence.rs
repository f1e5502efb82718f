//! Newform coefficient data and congruence-prime detection.
//!
//! Two forms are declared congruent mod `l` when `a_n(f) = a_n(g) mod l`
//! for every `n <= B` with `gcd(n, N l) = 1`, where `N` is the lcm of the
//! levels and `B` the Sturm bound at `(N, k)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::arith;
use crate::obstruction_engine;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("schema violation at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{label} has {have} coefficients mod {ell}, need {need}")]
    InsufficientCoefficients {
        label: String,
        ell: u64,
        have: usize,
        need: u64,
    },
    #[error("{0} and {1} lie in the same Galois orbit")]
    NotComparable(String, String),
    #[error("weights differ: {0} vs {1}")]
    WeightMismatch(u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Newform {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub orbit_id: String,
    /// `a_1, a_2, ...` for forms with rational coefficients.
    pub an_int: Option<Vec<i64>>,
    /// Residue columns `a_n mod lambda` keyed by the residue characteristic.
    pub an_mod: BTreeMap<u64, Vec<u64>>,
    pub modular_degree: Option<u64>,
}

impl Newform {
    /// Number of coefficients available mod `ell`.
    pub fn coverage(&self, ell: u64) -> usize {
        match (self.an_mod.get(&ell), &self.an_int) {
            (Some(col), _) => col.len(),
            (None, Some(an)) => an.len(),
            (None, None) => 0,
        }
    }

    /// `a_n mod ell` for `n >= 1`.
    pub fn coefficient(&self, n: u64, ell: u64) -> Option<u64> {
        let idx = (n as usize).checked_sub(1)?;
        match (self.an_mod.get(&ell), &self.an_int) {
            (Some(col), _) => col.get(idx).map(|&v| v % ell),
            (None, Some(an)) => an.get(idx).map(|&v| arith::reduce(v, ell)),
            (None, None) => None,
        }
    }
}

/// `floor(k [SL_2(Z) : Gamma_0(N)] / 12)`, at least 1.
pub fn sturm_bound(level: u64, weight: u32) -> Result<u64, CongruenceError> {
    if level == 0 || weight < 2 || weight % 2 == 1 {
        return Err(CongruenceError::InvalidParameters(format!(
            "need N >= 1 and even k >= 2, got N = {level}, k = {weight}"
        )));
    }
    let primes = arith::prime_divisors(level);
    let radical: u64 = primes.iter().product();
    let index = level / radical * primes.iter().map(|p| p + 1).product::<u64>();
    Ok((weight as u64 * index / 12).max(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoadedNewforms {
    pub forms: Vec<Newform>,
    pub warnings: Vec<String>,
}

fn schema(path: &str, reason: impl Into<String>) -> CongruenceError {
    CongruenceError::Schema {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn int_field(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> Result<u64, CongruenceError> {
    let p = format!("{path}.{key}");
    obj.get(key)
        .ok_or_else(|| schema(&p, "missing"))?
        .as_u64()
        .filter(|&v| v >= 1)
        .ok_or_else(|| schema(&p, "expected a positive integer"))
}

fn str_field(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> Result<String, CongruenceError> {
    let p = format!("{path}.{key}");
    obj.get(key)
        .ok_or_else(|| schema(&p, "missing"))?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| schema(&p, "expected a string"))
}

fn parse_form(v: &Value, path: &str) -> Result<Newform, CongruenceError> {
    let obj = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    let label = str_field(obj, "label", path)?;
    let level = int_field(obj, "level", path)?;
    let weight = u32::try_from(int_field(obj, "weight", path)?)
        .map_err(|_| schema(&format!("{path}.weight"), "too large"))?;
    let orbit_id = str_field(obj, "orbit_id", path)?;

    let an_int = match obj.get("an_int") {
        None | Some(Value::Null) => None,
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| x.as_i64().ok_or_else(|| schema(&format!("{path}.an_int[{i}]"), "expected an integer")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(_) => return Err(schema(&format!("{path}.an_int"), "expected an array")),
    };

    let mut an_mod = BTreeMap::new();
    match obj.get("an_mod") {
        None | Some(Value::Null) => {}
        Some(Value::Object(cols)) => {
            for (key, col) in cols {
                let p = format!("{path}.an_mod.{key}");
                let ell: u64 = key
                    .parse()
                    .ok()
                    .filter(|&l| arith::is_prime(l))
                    .ok_or_else(|| schema(&p, "key must be a prime"))?;
                let items = col.as_array().ok_or_else(|| schema(&p, "expected an array"))?;
                let residues = items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x.as_i64()
                            .map(|v| arith::reduce(v, ell))
                            .ok_or_else(|| schema(&format!("{p}[{i}]"), "expected an integer"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                an_mod.insert(ell, residues);
            }
        }
        Some(_) => return Err(schema(&format!("{path}.an_mod"), "expected an object")),
    }

    let modular_degree = match obj.get("modular_degree") {
        None | Some(Value::Null) => None,
        Some(_) => Some(int_field(obj, "modular_degree", path)?),
    };

    if an_int.is_none() && an_mod.is_empty() {
        return Err(schema(path, format!("form {label} has neither an_int nor an_mod")));
    }
    if let Some(an) = &an_int {
        if an.first() != Some(&1) {
            return Err(schema(&format!("{path}.an_int[0]"), format!("form {label} is not normalized (a_1 != 1)")));
        }
    }
    for (ell, col) in &an_mod {
        if col.first() != Some(&1) {
            return Err(schema(
                &format!("{path}.an_mod.{ell}[0]"),
                format!("form {label} is not normalized (a_1 != 1 mod {ell})"),
            ));
        }
    }
    Ok(Newform {
        label,
        level,
        weight,
        orbit_id,
        an_int,
        an_mod,
        modular_degree,
    })
}

/// Parses and validates a newform file. Forms with fewer coefficients than
/// the Sturm bound at their own level are kept, with a warning.
pub fn parse_newforms(text: &str) -> Result<LoadedNewforms, CongruenceError> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
    let forms_v = root
        .get("forms")
        .ok_or_else(|| schema("$.forms", "missing"))?
        .as_array()
        .ok_or_else(|| schema("$.forms", "expected an array"))?;
    let mut forms = Vec::with_capacity(forms_v.len());
    let mut warnings = Vec::new();
    for (i, v) in forms_v.iter().enumerate() {
        let f = parse_form(v, &format!("$.forms[{i}]"))?;
        if let Ok(b) = sturm_bound(f.level, f.weight) {
            let short: Vec<String> = std::iter::once(("int".to_string(), f.an_int.as_ref().map(Vec::len)))
                .chain(f.an_mod.iter().map(|(l, c)| (format!("mod {l}"), Some(c.len()))))
                .filter_map(|(name, len)| len.filter(|&n| (n as u64) < b).map(|n| format!("{name}: {n}")))
                .collect();
            if !short.is_empty() {
                warnings.push(format!(
                    "{}: coefficients below the Sturm bound {b} at level {} ({})",
                    f.label,
                    f.level,
                    short.join(", ")
                ));
            }
        }
        forms.push(f);
    }
    Ok(LoadedNewforms { forms, warnings })
}

pub fn load_newforms(path: &Path) -> Result<LoadedNewforms, CongruenceError> {
    let text = fs::read_to_string(path).map_err(|e| CongruenceError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_newforms(&text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub congruent: bool,
    /// First `n` where the residues differ.
    pub witness: Option<u64>,
    /// No `n > 1` survived the coprimality filter, so only `a_1 = 1` was
    /// compared; such a check is never reported as a congruence.
    pub vacuous: bool,
    pub checked_up_to: u64,
}

pub fn congruent_mod(f: &Newform, g: &Newform, ell: u64) -> Result<CongruenceCheck, CongruenceError> {
    if !arith::is_prime(ell) {
        return Err(CongruenceError::InvalidParameters(format!("l = {ell} is not prime")));
    }
    if f.orbit_id == g.orbit_id {
        return Err(CongruenceError::NotComparable(f.label.clone(), g.label.clone()));
    }
    if f.weight != g.weight {
        return Err(CongruenceError::WeightMismatch(f.weight, g.weight));
    }
    let level = arith::lcm(f.level, g.level);
    let bound = sturm_bound(level, f.weight)?;
    for form in [f, g] {
        if (form.coverage(ell) as u64) < bound {
            return Err(CongruenceError::InsufficientCoefficients {
                label: form.label.clone(),
                ell,
                have: form.coverage(ell),
                need: bound,
            });
        }
    }
    let compared: Vec<u64> = (1..=bound).filter(|&n| arith::gcd(n, level * ell) == 1).collect();
    let witness = compared
        .iter()
        .copied()
        .find(|&n| f.coefficient(n, ell) != g.coefficient(n, ell));
    let vacuous = compared.iter().all(|&n| n == 1);
    Ok(CongruenceCheck {
        congruent: witness.is_none() && !vacuous,
        witness,
        vacuous,
        checked_up_to: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CongruenceFinding {
    pub ell: u64,
    pub f_label: String,
    pub g_label: String,
    pub g_level: u64,
    pub strict: bool,
    pub checked_up_to: u64,
}

/// Every prime `l <= ell_max` and partner `g` of level dividing `N` (other
/// orbit, same weight) with `f = g mod l`. With `require_standing`, primes
/// failing the standing hypotheses at `N` are skipped.
pub fn congruence_findings(
    f: &Newform,
    pool: &[Newform],
    ell_max: u64,
    require_standing: bool,
) -> Result<Vec<CongruenceFinding>, CongruenceError> {
    let mut out = Vec::new();
    for ell in arith::primes_in(2, ell_max + 1) {
        if require_standing {
            let ok = obstruction_engine::check_standing(f.level, ell)
                .map(|s| s.ok)
                .unwrap_or(false);
            if !ok {
                continue;
            }
        }
        for g in pool {
            if g.orbit_id == f.orbit_id || g.weight != f.weight || f.level % g.level != 0 {
                continue;
            }
            let check = congruent_mod(f, g, ell)?;
            if check.congruent {
                out.push(CongruenceFinding {
                    ell,
                    f_label: f.label.clone(),
                    g_label: g.label.clone(),
                    g_level: g.level,
                    strict: g.level == f.level,
                    checked_up_to: check.checked_up_to,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The strict findings (partner at the same level).
pub fn strict_congruence_primes(
    f: &Newform,
    pool: &[Newform],
    ell_max: u64,
    require_standing: bool,
) -> Result<Vec<CongruenceFinding>, CongruenceError> {
    Ok(congruence_findings(f, pool, ell_max, require_standing)?
        .into_iter()
        .filter(|c| c.strict)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArsPrimes {
    /// Prime divisors of `N m`.
    pub all: Vec<u64>,
    /// Prime divisors of `m` alone.
    pub refined: Vec<u64>,
}

/// Candidate congruence primes of a rational newform from its modular degree.
pub fn ars_congruence_primes(level: u64, modular_degree: u64) -> Result<ArsPrimes, CongruenceError> {
    if modular_degree < 1 || level < 1 {
        return Err(CongruenceError::InvalidParameters("N and the modular degree must be >= 1".into()));
    }
    Ok(ArsPrimes {
        all: arith::prime_divisors(level * modular_degree),
        refined: arith::prime_divisors(modular_degree),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(label: &str, level: u64, orbit: &str, an: Vec<i64>) -> Newform {
        Newform {
            label: label.into(),
            level,
            weight: 2,
            orbit_id: orbit.into(),
            an_int: Some(an),
            an_mod: BTreeMap::new(),
            modular_degree: None,
        }
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_bound(11, 2).unwrap(), 2);
        assert_eq!(sturm_bound(1, 2).unwrap(), 1);
        assert_eq!(sturm_bound(26, 2).unwrap(), 7);
        assert_eq!(sturm_bound(4, 2).unwrap(), 1);
        assert!(sturm_bound(11, 3).is_err());
        assert!(sturm_bound(0, 2).is_err());
    }

    #[test]
    fn ars_examples() {
        let r = ars_congruence_primes(11, 1).unwrap();
        assert_eq!((r.all, r.refined), (vec![11], vec![]));
        let r = ars_congruence_primes(26, 6).unwrap();
        assert_eq!((r.all, r.refined), (vec![2, 3, 13], vec![2, 3]));
        assert!(ars_congruence_primes(1, 1).unwrap().all.is_empty());
        assert!(ars_congruence_primes(11, 0).is_err());
    }

    #[test]
    fn same_orbit_not_comparable() {
        let f = form("f", 11, "o", vec![1, -2, -1]);
        assert!(matches!(congruent_mod(&f, &f, 3), Err(CongruenceError::NotComparable(..))));
    }

    #[test]
    fn residue_columns_compare() {
        let mut f = form("f", 11, "a", vec![1, -2, -1]);
        f.an_int = None;
        f.an_mod.insert(3, vec![1, 1, 2]);
        let g = form("g", 11, "b", vec![1, 4, 5]);
        assert!(congruent_mod(&f, &g, 3).unwrap().congruent);
        let h = form("h", 11, "c", vec![1, 0, 5]);
        assert_eq!(congruent_mod(&f, &h, 3).unwrap().witness, Some(2));
    }

    #[test]
    fn comparison_of_a1_alone_is_vacuous() {
        let f = form("f", 11, "a", vec![1, -2, -1]);
        let g = form("g", 11, "b", vec![1, 5, 6]);
        let c = congruent_mod(&f, &g, 2).unwrap();
        assert!(c.vacuous && !c.congruent && c.witness.is_none());
        assert!(congruent_mod(&f, &g, 7).unwrap().congruent);
    }

    #[test]
    fn short_coefficient_lists_refused() {
        let f = form("f", 26, "a", vec![1, -1, 1, 1, -3]);
        let g = form("g", 26, "b", vec![1, 1, -3, 1, -1, -3, 1, 1]);
        assert!(matches!(
            congruent_mod(&f, &g, 3),
            Err(CongruenceError::InsufficientCoefficients { need: 7, .. })
        ));
    }

    #[test]
    fn parse_errors_name_the_field() {
        let text = r#"{"forms":[{"label":"x","level":11,"weight":2,"orbit_id":"o","an_int":[0,1]}]}"#;
        match parse_newforms(text) {
            Err(CongruenceError::Schema { path, reason }) => {
                assert_eq!(path, "$.forms[0].an_int[0]");
                assert!(reason.contains('x'));
            }
            other => panic!("{other:?}"),
        }
        let text = r#"{"forms":[{"label":"x","level":"11","weight":2,"orbit_id":"o","an_int":[1]}]}"#;
        assert!(matches!(parse_newforms(text), Err(CongruenceError::Schema { path, .. }) if path == "$.forms[0].level"));
    }

    #[test]
    fn short_forms_load_with_warning() {
        let text = r#"{"forms":[
            {"label":"a","level":26,"weight":2,"orbit_id":"o1","an_int":[1,-1,1,1,-3]},
            {"label":"b","level":11,"weight":2,"orbit_id":"o2","an_mod":{"7":[1,5,6]}}]}"#;
        let loaded = parse_newforms(text).unwrap();
        assert_eq!(loaded.forms.len(), 2);
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.warnings[0].starts_with("a:"));
    }
}
