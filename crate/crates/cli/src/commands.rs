use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use galdef_core::arith;
use galdef_core::brauer_recipe::{self, TripleScan};
use galdef_core::cohomology::{self, Cochain, GroupModule};
use galdef_core::congruence::{self, CongruenceError};
use galdef_core::defring::{self, MatrixOverTrunc, TruncRing};
use galdef_core::finite_group::FiniteGroup;
use galdef_core::galois_modules::{AdjointKind, GaloisModule, ResidualFrobenius};
use galdef_core::lifting::{self, DiagonalResidual, DualNumberRep, LiftOutcome};
use galdef_core::obstruction_engine::{self, EllInvariant, ProblemInstance, TriState};
use galdef_core::tame_group::TameGroup;

use crate::error::CliError;
use crate::report::Report;
use crate::{
    ArsArgs, ClassifyArgs, CocycleArgs, CohomologyArgs, CongruenceArgs, CriteriaKind, DefringArgs, Globals,
    InvariantsArgs, LiftArgs, ModuleKind, RecipeArgs, ShaArg,
};

/// Tables with more entries than this are left out of reports.
const TABLE_LIMIT: usize = 10_000;
/// Exhaustive triple scans up to this group order unless `--exhaustive`.
const EXHAUSTIVE_ORDER: usize = 300;

fn params(g: Globals, mut v: Value) -> Value {
    v["seed"] = json!(g.seed);
    v["exhaustive"] = json!(g.exhaustive);
    v
}

fn scan(g: Globals, order: usize, samples: usize) -> TripleScan {
    if g.exhaustive {
        TripleScan::Exhaustive
    } else {
        TripleScan::for_order(order, EXHAUSTIVE_ORDER, samples, g.seed)
    }
}

fn scan_json(scan: TripleScan, checked: usize, failure: Option<[usize; 3]>, group: &TameGroup) -> Value {
    let mode = match scan {
        TripleScan::Exhaustive => "exhaustive",
        TripleScan::Sampled { .. } => "sampled",
    };
    json!({
        "mode": mode,
        "triples_checked": checked,
        "first_failure": failure.map(|t| t.map(|i| group.element_at(i).to_string())),
    })
}

pub fn invariants(a: &InvariantsArgs, g: Globals) -> Result<Report, CliError> {
    let alpha = a.alpha.unwrap_or(a.q * a.beta);
    let mut r = Report::new(
        "invariants",
        &params(g, json!({"ell": a.ell, "q": a.q, "alpha": alpha, "beta": a.beta})),
        "level-raising local invariant line",
    );
    let inv = obstruction_engine::levelraise_h0(a.ell, a.q, alpha, a.beta)?;
    let ell = a.ell;
    let q = arith::reduce(a.q, ell);
    let q2 = q * q % ell;
    let expected = [q, q2, 1].iter().filter(|&&s| s == 1).count();
    r.check(
        "dimension_count",
        inv.dim == expected,
        format!("dim {} against #{{s in (q, q^2, 1) : s = 1 mod l}} = {expected}", inv.dim),
    );
    if q2 != 1 {
        r.check(
            "e3_generator",
            inv.dim == 1 && inv.generator_tags == ["e3"],
            format!("q^2 != 1: generator tags {:?}", inv.generator_tags),
        );
    }
    r.set_result(&inv);
    Ok(r)
}

pub fn cocycle(a: &CocycleArgs, g: Globals) -> Result<Report, CliError> {
    let mut r = Report::new(
        "cocycle",
        &params(g, json!({"ell": a.ell, "q": a.q, "samples": a.samples})),
        "explicit Brauer 2-cocycle exponent formula",
    );
    let group = TameGroup::new(a.ell, a.q)?;
    let cayley = Arc::new(group.cayley());
    let table = brauer_recipe::explicit_b_table(&group);
    let n = group.order();
    let sc = scan(g, n, a.samples);
    let (checked, failure) = brauer_recipe::twisted_cocycle_failure(&group, &cayley, &table, sc);
    r.check(
        "twisted_cocycle_identity",
        failure.is_none(),
        format!("{checked} triples checked"),
    );
    let class_nonzero = if failure.is_none() {
        let module = brauer_recipe::mu_module(&group, cayley.clone());
        let c = brauer_recipe::table_cochain(&module, &table);
        let nonzero = cohomology::is_coboundary(&module, &c)?.is_none();
        r.check(
            "not_a_coboundary",
            nonzero,
            if nonzero { "no 1-cochain bounds b" } else { "b is a coboundary" },
        );
        Some(nonzero)
    } else {
        None
    };
    r.set_result(&json!({
        "group_order": n,
        "m": group.m(),
        "cocycle_scan": scan_json(sc, checked, failure, &group),
        "class_nonzero": class_nonzero,
        "table": (n * n <= TABLE_LIMIT).then_some(&table),
    }));
    Ok(r)
}

pub fn recipe(a: &RecipeArgs, g: Globals) -> Result<Report, CliError> {
    let mut r = Report::new(
        "recipe",
        &params(g, json!({"ell": a.ell, "q": a.q, "samples": a.samples})),
        "Brauer class construction through the monomial lattice",
    );
    let trace = brauer_recipe::run_recipe(a.ell, a.q)?;
    r.check("a_coordinate_zero", true, "B = C + d(gamma) is mu_l-valued on every pair");
    let cmp = brauer_recipe::compare_trace(&trace);
    r.check(
        "uniform_lambda",
        cmp.all_pairs_agree,
        match (cmp.lambda, &cmp.first_mismatch) {
            (Some(l), _) => format!("recipe = {l} * formula on {} pairs", cmp.pairs_checked),
            (None, Some(m)) => format!("mismatch at ({}, {})", m.g1, m.g2),
            (None, None) => "formula vanishes identically".into(),
        },
    );

    let group = TameGroup::new(a.ell, a.q)?;
    let cayley = Arc::new(group.cayley());
    let n = group.order();
    let sc = scan(g, n, a.samples);
    let (checked, failure) = brauer_recipe::twisted_cocycle_failure(&group, &cayley, &trace.exponent_table, sc);
    r.check("recipe_is_cocycle", failure.is_none(), format!("{checked} triples checked"));
    if let (Some(lambda), None) = (cmp.lambda, failure) {
        let ell = a.ell;
        let formula = brauer_recipe::explicit_b_table(&group);
        let diff: Vec<u64> = trace
            .exponent_table
            .iter()
            .zip(&formula)
            .map(|(&b, &f)| (b + ell - lambda * f % ell) % ell)
            .collect();
        let module = brauer_recipe::mu_module(&group, cayley);
        let c = brauer_recipe::table_cochain(&module, &diff);
        let bounded = cohomology::is_coboundary(&module, &c)?.is_some();
        r.check("difference_is_coboundary", bounded, format!("B - {lambda} b"));
    }
    let rejected = matches!(
        brauer_recipe::run_recipe_oriented(a.ell, a.q, -1),
        Err(brauer_recipe::RecipeError::NotMuValued(..))
    );
    r.check(
        "opposite_orientation_rejected",
        rejected,
        "C - d(gamma) keeps a nonzero a-coordinate",
    );

    let mut result = json!({"trace": trace, "comparison": cmp, "cocycle_scan": scan_json(sc, checked, failure, &group)});
    if n * n > TABLE_LIMIT {
        result["trace"]["exponent_table"] = Value::Null;
        result["exponent_table_omitted"] = json!(true);
    }
    r.set_result(&result);
    Ok(r)
}

fn named_module(a: &CohomologyArgs) -> Result<(GroupModule, Option<usize>), CliError> {
    if let ModuleKind::Cyclic = a.module {
        let n = a.n.unwrap_or(a.ell as usize);
        if n == 0 || !arith::is_prime(a.ell) {
            return Err(CliError::InvalidParameters(format!("need n >= 1 and l prime, got n = {n}, l = {}", a.ell)));
        }
        let generator = usize::from(n > 1);
        return Ok((GroupModule::trivial(Arc::new(FiniteGroup::cyclic(n)), a.ell, 1), Some(generator)));
    }
    let group = TameGroup::new(a.ell, a.q)?;
    let galois = match a.module {
        ModuleKind::Trivial => GaloisModule::trivial(group, 1),
        ModuleKind::Cyclotomic => GaloisModule::cyclotomic(group),
        kind => {
            let frob = ResidualFrobenius::new(a.ell, a.q, a.alpha, a.beta)?;
            let (adj, twisted) = match kind {
                ModuleKind::Ad => (AdjointKind::Full, false),
                ModuleKind::Ad0 => (AdjointKind::TraceZero, false),
                ModuleKind::TwistedAd => (AdjointKind::Full, true),
                _ => (AdjointKind::TraceZero, true),
            };
            GaloisModule::build_adjoint(group, &frob, adj, twisted)?
        }
    };
    Ok((galois.to_group_module(), None))
}

pub fn cohomology(a: &CohomologyArgs, g: Globals) -> Result<Report, CliError> {
    let module_name = format!("{:?}", a.module).to_lowercase();
    let mut r = Report::new(
        "cohomology",
        &params(
            g,
            json!({"module": module_name, "ell": a.ell, "q": a.q, "alpha": a.alpha, "beta": a.beta,
                   "n": a.n, "degree": a.degree, "samples": a.samples}),
        ),
        "bar-resolution cohomology of the tame quotient",
    );
    if a.degree.is_some_and(|d| d > 2) {
        return Err(CliError::InvalidParameters("degree must be 0, 1 or 2".into()));
    }
    let (module, cyclic_gen) = named_module(a)?;
    let degrees: Vec<usize> = a.degree.map_or((0..=2).collect(), |d| vec![d]);
    let mut dims = Vec::new();
    for &d in &degrees {
        dims.push(cohomology::cohomology_dims(&module, d)?);
    }

    if g.exhaustive {
        for d in 0..=1 {
            let failure = cohomology::d_squared_basis_failure(&module, d)?;
            r.check(
                &format!("d_squared_zero_degree_{d}"),
                failure.is_none(),
                format!("all basis cochains of degree {d}"),
            );
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        for d in 0..=1 {
            let mut ok = true;
            for _ in 0..a.samples {
                let c = Cochain::random(&module, d, &mut rng);
                ok &= cohomology::coboundary(&module, &cohomology::coboundary(&module, &c)?)?.is_zero();
            }
            r.check(
                &format!("d_squared_zero_degree_{d}"),
                ok,
                format!("{} random cochains of degree {d}", a.samples),
            );
        }
    }

    let mut oracle = Vec::new();
    if let Some(gen) = cyclic_gen {
        for dims in &dims {
            let o = cohomology::cyclic_cohomology_dim(&module, gen, dims.degree)?;
            oracle.push(o);
            r.check(
                &format!("periodic_oracle_degree_{}", dims.degree),
                o == dims.cohomology,
                format!("bar complex {} against periodic resolution {o}", dims.cohomology),
            );
        }
    }
    r.set_result(&json!({
        "module": module.label(),
        "group_order": module.group().order(),
        "module_dim": module.dim(),
        "dims": dims,
        "h": dims.iter().map(|d| d.cohomology).collect::<Vec<_>>(),
        "periodic_oracle": (!oracle.is_empty()).then_some(oracle),
    }));
    Ok(r)
}

fn cocycle_combination(module: &GroupModule, basis: &[Cochain], rng: &mut ChaCha8Rng) -> Cochain {
    let p = module.modulus();
    basis.iter().fold(Cochain::zero(module, 1), |acc, b| {
        acc.add(&b.scale(rng.gen_range(0..p))).expect("same module")
    })
}

pub fn lift(a: &LiftArgs, g: Globals) -> Result<Report, CliError> {
    let mut r = Report::new(
        "lift",
        &params(
            g,
            json!({"ell": a.ell, "q": a.q, "alpha": a.alpha, "beta": a.beta,
                   "sections": a.sections, "cochains": a.cochains}),
        ),
        "lifting obstruction and the dual-number homomorphism criterion",
    );
    let group = TameGroup::new(a.ell, a.q)?;
    let frob = ResidualFrobenius::new(a.ell, a.q, a.alpha, a.beta)?;
    let base = DiagonalResidual::new(group, frob)?;
    let ad = base.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);

    let basis = cohomology::cocycle_basis(ad, 1)?;
    let (mut disagreements, mut homs) = (0, 0);
    for k in 0..a.cochains {
        let b = if k % 2 == 0 {
            Cochain::random(ad, 1, &mut rng)
        } else {
            cocycle_combination(ad, &basis, &mut rng)
        };
        let hom = lifting::is_homomorphism(&DualNumberRep::new(&base, b.clone())?)?.homomorphism;
        let coc = cohomology::is_cocycle(ad, &b)?;
        disagreements += usize::from(hom != coc);
        homs += usize::from(hom);
    }
    r.check(
        "dual_number_criterion",
        disagreements == 0,
        format!("{disagreements} disagreements over {} cochains ({homs} homomorphisms)", a.cochains),
    );

    let teich = lifting::teichmuller_lift(&base);
    r.check(
        "teichmuller_lift_is_homomorphism",
        lifting::lift_homomorphism_failure(&base, &teich).is_none(),
        format!("mod {}", a.ell * a.ell),
    );

    let (mut non_cocycles, mut repaired, mut unverified, mut obstructed) = (0, 0, 0, 0);
    let mut class_independent = true;
    let mut first: Option<Cochain> = None;
    for _ in 0..a.sections {
        let s = lifting::random_section(&base, &mut rng);
        let d = lifting::obstruction_cocycle(&base, &s)?;
        if !cohomology::is_cocycle(ad, &d)? {
            non_cocycles += 1;
            continue;
        }
        match lifting::adjust_lift(&base, &s)? {
            LiftOutcome::Adjusted { lift, .. } => {
                if lifting::lift_homomorphism_failure(&base, &lift).is_none() {
                    repaired += 1;
                } else {
                    unverified += 1;
                }
            }
            LiftOutcome::Obstructed { .. } => obstructed += 1,
        }
        match &first {
            Some(d0) => class_independent &= cohomology::is_coboundary(ad, &d.sub(d0)?)?.is_some(),
            None => first = Some(d),
        }
    }
    r.check(
        "obstruction_is_cocycle",
        non_cocycles == 0,
        format!("{non_cocycles} of {} sections fail the cocycle identity", a.sections),
    );
    r.check(
        "class_section_independent",
        class_independent,
        "differences of obstruction cocycles are coboundaries",
    );
    r.check(
        "repairs_verified",
        unverified == 0,
        format!("{repaired} repaired to homomorphisms, {obstructed} obstructed"),
    );
    r.set_result(&json!({
        "group_order": base.group().order(),
        "modulus": a.ell * a.ell,
        "z1_ad_dim": basis.len(),
        "cochains_tested": a.cochains,
        "homomorphisms": homs,
        "criterion_disagreements": disagreements,
        "sections_tested": a.sections,
        "repaired": repaired,
        "obstructed": obstructed,
        "class_independent": class_independent,
    }));
    Ok(r)
}

pub fn criteria(kind: &CriteriaKind, g: Globals) -> Result<Report, CliError> {
    let anchor = "local vanishing criteria";
    Ok(match *kind {
        CriteriaKind::PrincipalSeries { p, ell } => {
            let mut r = Report::new("criteria", &params(g, json!({"kind": "principal-series", "p": p, "ell": ell})), anchor);
            let nonzero = obstruction_engine::principal_series_nonzero(p, ell)?;
            let fourth = (0..4).fold(1, |acc, _| acc * (p % ell) % ell);
            r.check("residue_scan", nonzero == (fourth == 1), format!("p^4 = {fourth} mod {ell}"));
            r.set_result(&json!({"nonzero": nonzero}));
            r
        }
        CriteriaKind::Supercuspidal { p, ell } => {
            let mut r = Report::new("criteria", &params(g, json!({"kind": "supercuspidal", "p": p, "ell": ell})), anchor);
            let vanishes = obstruction_engine::supercuspidal_vanishes(p, ell)?;
            r.check("residue_scan", vanishes == (p % ell != 1), format!("p = {} mod {ell}", p % ell));
            r.set_result(&json!({"vanishes": vanishes}));
            r
        }
        CriteriaKind::Steinberg { p, ell } => {
            let mut r = Report::new("criteria", &params(g, json!({"kind": "steinberg", "p": p, "ell": ell})), anchor);
            let dim = obstruction_engine::steinberg_local_h0(p, ell)?;
            let pm = p % ell;
            r.check(
                "residue_scan",
                (dim > 0) == (pm == 1 || pm == ell - 1),
                format!("p = {pm} mod {ell}"),
            );
            r.set_result(&json!({"h0_dim": dim, "nonzero": dim > 0}));
            r
        }
        CriteriaKind::AtEll {
            a_ell,
            modular_degree,
            ell,
            congruence_prime,
        } => {
            let mut r = Report::new(
                "criteria",
                &params(
                    g,
                    json!({"kind": "at-ell", "a_ell": a_ell, "modular_degree": modular_degree,
                           "ell": ell, "congruence_prime": congruence_prime}),
                ),
                anchor,
            );
            if !arith::is_prime(ell) {
                return Err(CliError::InvalidParameters(format!("l = {ell} is not prime")));
            }
            let v = obstruction_engine::ell_invariant_vanishes(a_ell, modular_degree, ell, congruence_prime);
            r.set_result(&json!({"vanishes": v == EllInvariant::Vanishes, "outcome": v}));
            r
        }
        CriteriaKind::Standing { level, ell } => {
            let mut r = Report::new("criteria", &params(g, json!({"kind": "standing", "level": level, "ell": ell})), anchor);
            let s = obstruction_engine::check_standing(level, ell)?;
            let mut expected = Vec::new();
            let mut rest = level;
            let mut d = 2;
            while rest > 1 {
                if rest % d == 0 {
                    if d == 2 || d % ell == 1 {
                        expected.push(d);
                    }
                    while rest % d == 0 {
                        rest /= d;
                    }
                }
                d += 1;
            }
            let mut flagged = s.violating_primes();
            flagged.sort_unstable();
            r.check("trial_division", flagged == expected, format!("flagged {flagged:?}"));
            r.set_result(&json!({
                "ok": s.ok,
                "violations": s.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "violating_primes": flagged,
            }));
            r
        }
    })
}

fn tri(s: ShaArg) -> TriState {
    match s {
        ShaArg::Yes => TriState::Yes,
        ShaArg::No => TriState::No,
        ShaArg::Unknown => TriState::Unknown,
    }
}

pub fn classify(a: &ClassifyArgs, g: Globals) -> Result<Report, CliError> {
    let instance: ProblemInstance = match &a.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        }
        None => {
            let (Some(level), Some(ell), Some(q)) = (a.level, a.ell, a.q) else {
                return Err(CliError::Usage("pass --instance, or --level, --ell and --q".into()));
            };
            let alpha = a.alpha.unwrap_or(q as i64 * a.beta);
            obstruction_engine::level_raise_instance(level, ell, q, alpha, a.beta, a.assert_h2_vanishing)
        }
    };
    let sha = tri(a.sha);
    let mut r = Report::new(
        "classify",
        &params(g, json!({"instance": instance, "sha": sha})),
        "local-global obstruction classification",
    );
    let report = obstruction_engine::classify(&instance, sha)?;
    let with_sha = obstruction_engine::classify(&instance, TriState::Yes)?;
    r.check(
        "bound_monotone_in_sha",
        with_sha.hom_h2_dim_lower_bound >= report.hom_h2_dim_lower_bound,
        format!("{} with a nonzero Sha term", with_sha.hom_h2_dim_lower_bound),
    );
    r.set_result(&report);
    Ok(r)
}

fn data_file(explicit: Option<&Path>) -> Result<PathBuf, CliError> {
    let base = match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os("GALDEF_DATA_DIR")
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Data("no data file: pass --data or set GALDEF_DATA_DIR".into()))?,
    };
    Ok(if base.is_dir() { base.join("newforms.json") } else { base })
}

pub fn congruence(a: &CongruenceArgs, g: Globals) -> Result<Report, CliError> {
    let path = data_file(a.data.as_deref())?;
    let loaded = congruence::load_newforms(&path)?;
    let mut r = Report::new(
        "congruence",
        &params(
            g,
            json!({"form": a.form, "data": path.file_name().map(|s| s.to_string_lossy()),
                   "ell_max": a.ell_max, "require_standing": a.require_standing}),
        ),
        "strict congruence primes",
    );
    let f = loaded
        .forms
        .iter()
        .find(|f| f.label == a.form)
        .ok_or_else(|| CliError::Data(format!("no form labelled {} in {}", a.form, path.display())))?;
    let findings = congruence::congruence_findings(f, &loaded.forms, a.ell_max, a.require_standing)?;
    let strict: Vec<u64> = findings.iter().filter(|c| c.strict).map(|c| c.ell).collect();
    let self_excluded = matches!(congruence::congruent_mod(f, f, 7), Err(CongruenceError::NotComparable(..)));
    r.check("self_comparison_excluded", self_excluded, "a form is not compared with its own orbit");
    r.check(
        "strict_partners_share_level",
        findings.iter().all(|c| c.strict == (c.g_level == f.level)),
        format!("{} findings", findings.len()),
    );
    let mut strict_primes = strict.clone();
    strict_primes.dedup();
    r.set_result(&json!({
        "form": f.label,
        "level": f.level,
        "sturm_bound": congruence::sturm_bound(f.level, f.weight)?,
        "strict_congruence_primes": strict_primes,
        "findings": findings,
        "warnings": loaded.warnings,
    }));
    Ok(r)
}

pub fn ars(a: &ArsArgs, g: Globals) -> Result<Report, CliError> {
    let mut r = Report::new(
        "ars",
        &params(g, json!({"level": a.level, "modular_degree": a.modular_degree})),
        "modular degree and congruence primes",
    );
    let primes = congruence::ars_congruence_primes(a.level, a.modular_degree)?;
    r.check(
        "refined_within_all",
        primes.refined.iter().all(|p| primes.all.contains(p)),
        format!("{:?} within {:?}", primes.refined, primes.all),
    );
    r.set_result(&primes);
    Ok(r)
}

pub fn defring(a: &DefringArgs, g: Globals) -> Result<Report, CliError> {
    let mut r = Report::new(
        "defring",
        &params(g, json!({"ell": a.ell, "precision": a.precision, "degree": a.degree, "p": a.p})),
        "Steinberg one-relation deformation ring",
    );
    let ring = TruncRing::new(4, a.ell, a.precision, a.degree)?;
    let p = a.p;
    let auto_f = MatrixOverTrunc::new([ring.constant(p as i64), ring.var(3), ring.zero(), ring.one()])?;
    let auto_tau = MatrixOverTrunc::new([ring.one(), ring.var(1), ring.zero(), ring.one()])?;
    let auto = defring::tame_relation_ideal(&auto_f, &auto_tau, p)?;
    r.check("automatic_relation_empty", auto.is_empty(), "F = [[p, T4], [0, 1]], tau = [[1, T2], [0, 1]]");
    let target = defring::steinberg_target(&ring, p)?;
    r.check(
        "target_self_match",
        defring::unit_multiple(&target, &target).is_some(),
        target.to_string(),
    );

    let reports = defring::search_family(a.ell, a.precision, a.degree, p)?;
    let again = defring::search_family(a.ell, a.precision, a.degree, p)?;
    r.check("deterministic", reports == again, format!("{} candidates", reports.len()));
    let matched: Vec<&str> = reports.iter().filter(|m| m.matched).map(|m| m.candidate.as_str()).collect();
    let single = reports.iter().filter(|m| m.generators.len() == 1).count();
    let empty = reports.iter().filter(|m| m.generators.is_empty()).count();
    r.set_result(&json!({
        "target": target.to_string(),
        "candidates": reports.len(),
        "single_generator": single,
        "empty_ideal": empty,
        "matched": matched,
        "on_the_nose": reports.iter().filter(|m| m.on_the_nose).count(),
        "reports": reports,
    }));
    Ok(r)
}
