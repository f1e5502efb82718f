use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;

use galdef_core::arith;
use galdef_core::cohomology::{self, Cochain};
use galdef_core::congruence::{self, Newform};
use galdef_core::defring::{self, MatrixOverTrunc, TruncPoly, TruncRing, MAX_VARS};
use galdef_core::exact_linalg::{self, FpMatrix};
use galdef_core::galois_modules::{lattice_act, AdjointKind, GaloisModule, LatticePoint, ResidualFrobenius};
use galdef_core::obstruction_engine::{self, LocalType, ProblemInstance, TriState};
use galdef_core::tame_group::TameGroup;

const SMALL_PRIMES: [u64; 4] = [5, 7, 11, 13];

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(SMALL_PRIMES.to_vec())
}

fn matrix() -> impl Strategy<Value = FpMatrix> {
    (1usize..6, 1usize..6, prop::sample::select(vec![2u64, 3, 5, 7, 13])).prop_flat_map(|(r, c, p)| {
        prop::collection::vec(0..p, r * c).prop_map(move |d| FpMatrix::from_data(r, c, p, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_vectors_are_annihilated(m in matrix()) {
        let red = exact_linalg::row_reduce(&m);
        prop_assert_eq!(red.rank + red.kernel_basis.len(), m.cols());
        for k in &red.kernel_basis {
            prop_assert!(m.mul_vec(k).unwrap().iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn consistent_systems_round_trip(m in matrix(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<u64> = (0..m.cols()).map(|_| rand::Rng::gen_range(&mut rng, 0..m.modulus())).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = exact_linalg::solve_linear(&m, &b).unwrap().expect("consistent");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
    }

    #[test]
    fn tame_group_relations(ell in small_prime(), q in 1i64..40, i in 0i64..200, j in 0i64..200, k in 0i64..200) {
        prop_assume!(q % ell as i64 != 0);
        let g = TameGroup::new(ell, q).unwrap();
        let (f, t) = (g.frobenius(), g.tau());
        let conj = g.mul(&g.mul(&f, &t).unwrap(), &g.inv(&f).unwrap()).unwrap();
        prop_assert_eq!(conj, g.pow(&t, g.q()).unwrap());
        let [a, b, c] = [i, j, k].map(|x| g.element_at(x as usize % g.order()));
        let left = g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap();
        let right = g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(g.element_at(g.index_of(&a)), a.clone());
        prop_assert_eq!(g.mul(&a, &g.inv(&a).unwrap()).unwrap(), g.identity());
    }

    #[test]
    fn adjoint_actions_are_multiplicative(ell in small_prime(), q in 2i64..12, beta in 1i64..4, twisted: bool, full: bool, i in 0usize..10_000, j in 0usize..10_000) {
        prop_assume!(q % ell as i64 != 0);
        let g = TameGroup::new(ell, q).unwrap();
        let frob = ResidualFrobenius::new(ell, q, q * beta, beta).unwrap();
        let kind = if full { AdjointKind::Full } else { AdjointKind::TraceZero };
        let m = GaloisModule::build_adjoint(g.clone(), &frob, kind, twisted).unwrap();
        let (a, b) = (g.element_at(i % g.order()), g.element_at(j % g.order()));
        let ab = g.mul(&a, &b).unwrap();
        prop_assert_eq!(m.action(&ab), m.action(&a).mul(&m.action(&b)).unwrap());
        for v in m.fixed_space() {
            prop_assert_eq!(m.action(&a).mul_vec(&v).unwrap(), v.clone());
        }
    }

    #[test]
    fn levelraise_dimension_matches_eigenvalue_count(ell in prop::sample::select(vec![5u64, 7, 11, 13, 17, 19, 23]), q in 1i64..23, beta in 1i64..23) {
        prop_assume!(q % ell as i64 != 0 && beta % ell as i64 != 0);
        let alpha = q * beta;
        let inv = obstruction_engine::levelraise_h0(ell, q, alpha, beta).unwrap();
        let l = ell as i64;
        let ratio = alpha.rem_euclid(l) * (arith::inv_mod(beta.rem_euclid(l) as u64, ell).unwrap() as i64) % l;
        let ratio_inv = arith::inv_mod(ratio as u64, ell).unwrap() as i64;
        let count = [q % l, q * ratio % l, q * ratio_inv % l].iter().filter(|&&s| s == 1).count();
        prop_assert_eq!(inv.dim, count);
    }

    #[test]
    fn lattice_action_composes(q in 2i64..5, i in 0usize..100, j in 0usize..100, a in -20i64..20, c in 0u64..5) {
        let g = TameGroup::new(5, q).unwrap();
        let (x, y) = (g.element_at(i % g.order()), g.element_at(j % g.order()));
        let p = LatticePoint { a, c };
        let xy = g.mul(&x, &y).unwrap();
        prop_assert_eq!(lattice_act(&g, &x, lattice_act(&g, &y, p)), lattice_act(&g, &xy, p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coboundaries_are_recognized(seed in any::<u64>(), degree in 0usize..2, twisted: bool) {
        let g = TameGroup::new(5, 2).unwrap();
        let frob = ResidualFrobenius::new(5, 2, 2, 1).unwrap();
        let m = GaloisModule::build_adjoint(g, &frob, AdjointKind::TraceZero, twisted).unwrap().to_group_module();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Cochain::random(&m, degree, &mut rng);
        let dx = cohomology::coboundary(&m, &x).unwrap();
        let pre = cohomology::is_coboundary(&m, &dx).unwrap().expect("dx is a coboundary");
        prop_assert!(cohomology::coboundary(&m, &pre).unwrap().sub(&dx).unwrap().is_zero());
    }

    #[test]
    fn cup_trace_is_well_defined_on_classes(seed in any::<u64>()) {
        let g = TameGroup::new(5, 2).unwrap();
        let frob = ResidualFrobenius::new(5, 2, 2, 1).unwrap();
        let twisted = GaloisModule::build_adjoint(g.clone(), &frob, AdjointKind::Full, true).unwrap();
        let cayley = Arc::new(g.cayley());
        let m0_module = twisted.to_group_module_on(cayley.clone()).unwrap();
        let u_module = GaloisModule::build_adjoint(g.clone(), &frob, AdjointKind::Full, false)
            .unwrap()
            .to_group_module_on(cayley.clone())
            .unwrap();
        let mu = GaloisModule::cyclotomic(g).to_group_module_on(cayley).unwrap();
        let fixed = m0_module.fixed_space();
        prop_assert!(!fixed.is_empty());
        let m0 = Cochain::from_values(&m0_module, 0, fixed[0].clone()).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = cohomology::cocycle_basis(&u_module, 1).unwrap();
        let z = basis.iter().fold(Cochain::zero(&u_module, 1), |acc, b| {
            acc.add(&b.scale(rand::Rng::gen_range(&mut rng, 0..5))).unwrap()
        });
        let cz = cohomology::cup_trace(&m0_module, &m0, &u_module, &z).unwrap();
        prop_assert!(cohomology::is_cocycle(&mu, &cz).unwrap());

        let x = Cochain::random(&u_module, 1, &mut rng);
        let dx = cohomology::coboundary(&u_module, &x).unwrap();
        let cdx = cohomology::cup_trace(&m0_module, &m0, &u_module, &dx).unwrap();
        prop_assert!(cohomology::is_coboundary(&mu, &cdx).unwrap().is_some());
    }
}

fn local_type() -> impl Strategy<Value = LocalType> {
    prop_oneof![
        Just(LocalType::Steinberg),
        Just(LocalType::Supercuspidal),
        Just(LocalType::PrincipalSeries)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_an_obstructed_place_never_lowers_the_bound(
        picks in prop::collection::btree_map(prop::sample::select(vec![13u64, 17, 19, 23, 29, 31]), local_type(), 1..4),
        ell in prop::sample::select(vec![5u64, 7, 11]),
        q in prop::sample::select(vec![2u64, 3, 37, 41]),
        sha in prop::sample::select(vec![TriState::Yes, TriState::No, TriState::Unknown]),
    ) {
        prop_assume!(q % ell != 0 && q * q % ell != 1);
        let level: u64 = picks.keys().product();
        let base = ProblemInstance {
            level,
            ell,
            extra_places: vec![],
            local_types: picks.clone(),
            global_h2_vanishing_asserted: false,
        };
        let before = obstruction_engine::classify(&base, sha).unwrap();
        let mut bigger = base.clone();
        bigger.extra_places.push(q);
        bigger.local_types.insert(q, LocalType::LevelRaiseQ { alpha: q as i64, beta: 1 });
        let after = obstruction_engine::classify(&bigger, sha).unwrap();
        prop_assert!(after.local_h0[&q].dim_lower_bound > 0);
        prop_assert!(after.hom_h2_dim_lower_bound >= before.hom_h2_dim_lower_bound);
    }
}

fn newform(label: &str, level: u64, orbit: &str, an: Vec<i64>) -> Newform {
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

fn coefficients() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..6, 11).prop_map(|mut v| {
        v.insert(0, 1);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congruence_is_symmetric(a in coefficients(), b in coefficients(), ell in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let f = newform("f", 26, "x", a);
        let g = newform("g", 26, "y", b);
        let fg = congruence::congruent_mod(&f, &g, ell).unwrap();
        let gf = congruence::congruent_mod(&g, &f, ell).unwrap();
        prop_assert_eq!(fg.congruent, gf.congruent);
        prop_assert_eq!(fg.witness, gf.witness);
    }

    #[test]
    fn congruence_is_transitive_on_a_shared_column(a in coefficients(), s in prop::collection::vec(-3i64..3, 24), ell in prop::sample::select(vec![3u64, 5, 7])) {
        let l = ell as i64;
        let shift = |k: usize| -> Vec<i64> {
            a.iter().enumerate().map(|(n, &x)| if n == 0 { 1 } else { x + l * s[(n + k) % s.len()] }).collect()
        };
        let [f, g, h] = [("f", 0), ("g", 5), ("h", 11)].map(|(name, k)| newform(name, 26, name, shift(k)));
        prop_assert!(congruence::congruent_mod(&f, &g, ell).unwrap().congruent);
        prop_assert!(congruence::congruent_mod(&g, &h, ell).unwrap().congruent);
        prop_assert!(congruence::congruent_mod(&f, &h, ell).unwrap().congruent);
    }

    #[test]
    fn sturm_bound_grows_with_weight_and_multiples(n in 1u64..400, m in 1u64..20, k in 1u32..6) {
        let b = congruence::sturm_bound(n, 2 * k).unwrap();
        prop_assert!(congruence::sturm_bound(n, 2 * k + 2).unwrap() >= b);
        prop_assert!(congruence::sturm_bound(n * m, 2 * k).unwrap() >= b);
    }

    #[test]
    fn strict_primes_ignore_pool_order(a in coefficients(), b in coefficients(), c in coefficients(), seed in any::<u64>()) {
        let f = newform("f", 11, "f", a);
        let mut pool = vec![newform("g", 11, "g", b), newform("h", 11, "h", c), f.clone()];
        let first = congruence::strict_congruence_primes(&f, &pool, 30, false).unwrap();
        pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(first, congruence::strict_congruence_primes(&f, &pool, 30, false).unwrap());
    }
}

#[test]
fn ars_membership_is_exact() {
    for n in 1..=10_000u64 {
        for m in 1..=10_000 / n {
            let r = congruence::ars_congruence_primes(n, m).unwrap();
            let expected: Vec<u64> = arith::primes_in(2, n * m + 1)
                .into_iter()
                .filter(|p| (n * m) % p == 0)
                .collect();
            assert_eq!(r.all, expected, "N = {n}, m = {m}");
        }
    }
}

fn poly_terms() -> impl Strategy<Value = Vec<([u8; 4], i64)>> {
    prop::collection::vec((prop::array::uniform4(0u8..=2), -60i64..60), 0..6)
}

fn build(ring: &TruncRing, terms: &[([u8; 4], i64)], constant: bool) -> TruncPoly {
    let mut p = ring.zero();
    for &(e, c) in terms {
        let mut m = [0u8; MAX_VARS];
        m[..4].copy_from_slice(&e);
        if !constant && m.iter().all(|&x| x == 0) {
            continue;
        }
        p = p.add(&ring.monomial(m, c)).unwrap();
    }
    p
}

fn ring_params() -> impl Strategy<Value = TruncRing> {
    prop::sample::select(vec![(2u64, 2u32), (3, 2), (3, 3), (5, 2), (7, 2), (7, 1)])
        .prop_flat_map(|(ell, k)| (Just(ell), Just(k), 1u32..=3))
        .prop_map(|(ell, k, d)| TruncRing::new(4, ell, k, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn truncated_ring_axioms(ring in ring_params(), a in poly_terms(), b in poly_terms(), c in poly_terms()) {
        let [a, b, c] = [&a, &b, &c].map(|t| build(&ring, t, true));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        let u = ring.one().add(&build(&ring, &c_terms_without_constant(&c), false)).unwrap();
        prop_assert_eq!(u.mul(&u.invert_unit().unwrap()).unwrap(), ring.one());
    }

    #[test]
    fn steinberg_shaped_defects_have_no_constant_term(
        f_terms in prop::array::uniform4(poly_terms()),
        t_terms in prop::array::uniform4(poly_terms()),
        c1 in 0i64..25,
        c2 in 0i64..25,
        p in prop::sample::select(vec![2u64, 3, 7, 11]),
    ) {
        let ring = TruncRing::new(4, 5, 2, 2).unwrap();
        let pert = |t: &[([u8; 4], i64)]| build(&ring, t, false);
        let f = MatrixOverTrunc::new([
            ring.constant(p as i64).add(&pert(&f_terms[0])).unwrap(),
            ring.constant(c1).add(&pert(&f_terms[1])).unwrap(),
            pert(&f_terms[2]),
            ring.one().add(&pert(&f_terms[3])).unwrap(),
        ]).unwrap();
        let t = MatrixOverTrunc::new([
            ring.one().add(&pert(&t_terms[0])).unwrap(),
            ring.constant(c2).add(&pert(&t_terms[1])).unwrap(),
            pert(&t_terms[2]),
            ring.one().add(&pert(&t_terms[3])).unwrap(),
        ]).unwrap();
        prop_assert!(defring::steinberg_residual_shape(&f, &t, p));
        let defects = defring::tame_relation_ideal(&f, &t, p).unwrap();
        prop_assert!(defects.iter().all(|d| d.constant_term() == 0));
        let direct = f.mul(&t).unwrap().mul(&f.inverse().unwrap()).unwrap() == t.pow(p).unwrap();
        prop_assert_eq!(defects.is_empty(), direct);
    }
}

fn c_terms_without_constant(p: &TruncPoly) -> Vec<([u8; 4], i64)> {
    p.terms()
        .iter()
        .filter(|(m, _)| m.iter().any(|&e| e > 0))
        .map(|(m, &c)| ([m[0], m[1], m[2], m[3]], c as i64))
        .collect()
}
