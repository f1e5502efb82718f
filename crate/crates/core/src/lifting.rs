//! First-order deformations and lifting obstructions for the unramified
//! diagonal residual representation `F -> diag(alpha, beta)`, `tau -> 1`.
//!
//! Dual numbers: `rho_eps(s) = (1 + eps b(s)) rho(s)` is multiplicative iff
//! `b` is a 1-cocycle for the conjugation action on `ad`.
//!
//! Lifts to `Z/l^2`: for a set-theoretic section `s` reducing to `rho`,
//! `s(g) s(h) s(gh)^-1 = 1 + l d(g,h)` defines a 2-cocycle `d` with values
//! in `ad`. Writing `s = (1 + l a) w` with `w` a homomorphism gives
//! `d = d1(a)`, so if `d = d1(x)` then `(1 - l x) s` is a homomorphism.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cohomology::{self, Cochain, CohomologyError, GroupModule};
use crate::exact_linalg::{FpMatrix, FpScalar};
use crate::finite_group::FiniteGroup;
use crate::galois_modules::{adjoint_basis, AdjointKind, GaloisModule, ModuleError, ResidualFrobenius};
use crate::tame_group::TameGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("residual representation is not a homomorphism at ({0}, {1})")]
    BaseNotHomomorphism(usize, usize),
    #[error("section value at {0} is not invertible")]
    NotInvertible(usize),
    #[error("section does not reduce to the residual representation at {0}")]
    WrongReduction(usize),
    #[error("section is not the identity at the identity")]
    NotNormalized,
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A 2x2 matrix over `Z/n`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2 {
    pub entries: [u64; 4],
    pub modulus: u64,
}

impl Mat2 {
    pub fn new(entries: [i64; 4], modulus: u64) -> Self {
        Self {
            entries: entries.map(|x| arith::reduce(x, modulus)),
            modulus,
        }
    }

    pub fn identity(modulus: u64) -> Self {
        Self::new([1, 0, 0, 1], modulus)
    }

    pub fn diagonal(a: u64, d: u64, modulus: u64) -> Self {
        Self {
            entries: [a % modulus, 0, 0, d % modulus],
            modulus,
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let n = self.modulus;
        let [a, b, c, d] = self.entries;
        let [e, f, g, h] = o.entries;
        let m = |x: u64, y: u64| arith::mul_mod(x, y, n);
        Mat2 {
            entries: [
                (m(a, e) + m(b, g)) % n,
                (m(a, f) + m(b, h)) % n,
                (m(c, e) + m(d, g)) % n,
                (m(c, f) + m(d, h)) % n,
            ],
            modulus: n,
        }
    }

    pub fn det(&self) -> u64 {
        let n = self.modulus;
        let [a, b, c, d] = self.entries;
        (arith::mul_mod(a, d, n) + n - arith::mul_mod(b, c, n)) % n
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let n = self.modulus;
        let di = arith::inv_mod(self.det(), n)?;
        let [a, b, c, d] = self.entries;
        let neg = |x: u64| (n - x) % n;
        Some(Mat2 {
            entries: [d, neg(b), neg(c), a].map(|x| arith::mul_mod(x, di, n)),
            modulus: n,
        })
    }

    pub fn reduce(&self, modulus: u64) -> Mat2 {
        Mat2 {
            entries: self.entries.map(|x| x % modulus),
            modulus,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity(self.modulus)
    }

    fn to_fp(self) -> FpMatrix {
        FpMatrix::from_data(2, 2, self.modulus, self.entries.to_vec()).expect("2x2")
    }
}

/// `rho(F^i tau^j) = diag(alpha^i, beta^i)` on the tame quotient.
#[derive(Clone, Debug)]
pub struct DiagonalResidual {
    group: TameGroup,
    cayley: Arc<FiniteGroup>,
    frob: ResidualFrobenius,
    images: Vec<Mat2>,
    ad: GroupModule,
}

impl DiagonalResidual {
    /// Requires `alpha^m = beta^m = 1` so that `F^m = 1` is respected.
    pub fn new(group: TameGroup, frob: ResidualFrobenius) -> Result<Self, LiftError> {
        let ell = group.ell();
        let (a, b) = (frob.alpha.value(), frob.beta.value());
        for (name, x) in [("alpha", a), ("beta", b)] {
            if arith::pow_mod(x, group.m(), ell) != 1 {
                return Err(LiftError::InvalidParameters(format!(
                    "{name} = {x} has order not dividing m = {}",
                    group.m()
                )));
            }
        }
        let cayley = Arc::new(group.cayley());
        let images = group
            .enumerate()
            .iter()
            .map(|g| {
                let i = g.frobenius_exponent();
                Mat2::diagonal(arith::pow_mod(a, i, ell), arith::pow_mod(b, i, ell), ell)
            })
            .collect();
        let ad = GaloisModule::build_adjoint(group.clone(), &frob, AdjointKind::Full, false)?
            .to_group_module_on(cayley.clone())?;
        Ok(Self {
            group,
            cayley,
            frob,
            images,
            ad,
        })
    }

    pub fn group(&self) -> &TameGroup {
        &self.group
    }

    pub fn cayley(&self) -> &Arc<FiniteGroup> {
        &self.cayley
    }

    pub fn frobenius(&self) -> &ResidualFrobenius {
        &self.frob
    }

    pub fn image(&self, g: usize) -> Mat2 {
        self.images[g]
    }

    /// `ad` (full, untwisted) over the Cayley table.
    pub fn adjoint(&self) -> &GroupModule {
        &self.ad
    }

    /// First pair where `rho(gh) != rho(g) rho(h)`.
    pub fn homomorphism_failure(&self) -> Option<(usize, usize)> {
        multiplicative_failure(&self.cayley, &self.images)
    }
}

fn multiplicative_failure(cayley: &FiniteGroup, images: &[Mat2]) -> Option<(usize, usize)> {
    let n = cayley.order();
    (0..n)
        .flat_map(|g| (0..n).map(move |h| (g, h)))
        .find(|&(g, h)| images[cayley.mul(g, h)] != images[g].mul(&images[h]))
}

/// Matrix `sum_k v_k B_k` for coordinates in the full adjoint basis.
fn ad_matrix(coords: &[u64], ell: u64) -> FpMatrix {
    let basis = adjoint_basis(AdjointKind::Full, ell);
    basis
        .iter()
        .zip(coords)
        .fold(FpMatrix::zeros(2, 2, ell), |acc, (b, &c)| acc.add(&b.scale(c)).expect("2x2"))
}

fn ad_coords(m: &FpMatrix) -> Vec<u64> {
    crate::galois_modules::adjoint_coordinates(m, AdjointKind::Full).expect("full basis")
}

/// `s -> (1 + eps b(s)) rho(s)` over `F_l[eps]/(eps^2)`.
#[derive(Clone, Debug)]
pub struct DualNumberRep<'a> {
    pub base: &'a DiagonalResidual,
    pub perturbation: Cochain,
}

impl<'a> DualNumberRep<'a> {
    pub fn new(base: &'a DiagonalResidual, perturbation: Cochain) -> Result<Self, LiftError> {
        if perturbation.degree() != 1 || perturbation.dim() != 4 {
            return Err(LiftError::InvalidParameters("perturbation must be an ad-valued 1-cochain".into()));
        }
        Ok(Self { base, perturbation })
    }

    /// `(rho(s), b(s) rho(s))`: the constant and `eps` parts.
    pub fn evaluate(&self, g: usize) -> (FpMatrix, FpMatrix) {
        let ell = self.base.group.ell();
        let r = self.base.image(g).to_fp();
        let b = ad_matrix(self.perturbation.value(&[g]), ell);
        let eps = b.mul(&r).expect("2x2");
        (r, eps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismCheck {
    pub homomorphism: bool,
    pub first_failure: Option<(usize, usize)>,
}

/// Direct multiplicative check `rho_eps(gh) = rho_eps(g) rho_eps(h)` over
/// all pairs.
pub fn is_homomorphism(rep: &DualNumberRep<'_>) -> Result<HomomorphismCheck, LiftError> {
    if let Some((g, h)) = rep.base.homomorphism_failure() {
        return Err(LiftError::BaseNotHomomorphism(g, h));
    }
    let cay = &rep.base.cayley;
    let n = cay.order();
    let values: Vec<(FpMatrix, FpMatrix)> = (0..n).map(|g| rep.evaluate(g)).collect();
    for g in 0..n {
        for h in 0..n {
            let (a0, a1) = &values[g];
            let (b0, b1) = &values[h];
            let eps = a0.mul(b1).and_then(|x| x.add(&a1.mul(b0)?)).expect("2x2");
            let (c0, c1) = &values[cay.mul(g, h)];
            if *c0 != a0.mul(b0).expect("2x2") || *c1 != eps {
                return Ok(HomomorphismCheck {
                    homomorphism: false,
                    first_failure: Some((g, h)),
                });
            }
        }
    }
    Ok(HomomorphismCheck {
        homomorphism: true,
        first_failure: None,
    })
}

/// Conjugates `rho_eps` by `1 + eps X`; the perturbation changes by `-d0(X)`.
pub fn conjugate_dual(rep: &DualNumberRep<'_>, x: &[u64]) -> Result<Cochain, LiftError> {
    let ell = rep.base.group.ell();
    let xm = ad_matrix(x, ell);
    let n = rep.base.cayley.order();
    let mut values = Vec::with_capacity(n * 4);
    for g in 0..n {
        let (r, eps) = rep.evaluate(g);
        // (1 + eps X)(r + eps E)(1 - eps X) = r + eps (E + X r - r X)
        let new_eps = eps.add(&xm.mul(&r).expect("2x2")).and_then(|m| m.sub(&r.mul(&xm)?)).expect("2x2");
        let b = new_eps.mul(&r.inverse().expect("invertible")).expect("2x2");
        values.extend(ad_coords(&b));
    }
    Ok(Cochain::from_values(rep.base.adjoint(), 1, values)?)
}

/// A section `Gamma -> GL_2(Z/l^2)` reducing to the residual representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetLift {
    ell: u64,
    values: Vec<Mat2>,
}

impl SetLift {
    pub fn new(base: &DiagonalResidual, values: Vec<Mat2>) -> Result<Self, LiftError> {
        let ell = base.group.ell();
        let modulus = ell * ell;
        if values.len() != base.cayley.order() {
            return Err(LiftError::InvalidParameters("section must cover the group".into()));
        }
        for (g, v) in values.iter().enumerate() {
            if v.modulus != modulus || v.reduce(ell) != base.image(g) {
                return Err(LiftError::WrongReduction(g));
            }
            if v.inverse().is_none() {
                return Err(LiftError::NotInvertible(g));
            }
        }
        if !values[base.cayley.identity()].is_identity() {
            return Err(LiftError::NotNormalized);
        }
        Ok(Self { ell, values })
    }

    pub fn value(&self, g: usize) -> Mat2 {
        self.values[g]
    }

    pub fn values(&self) -> &[Mat2] {
        &self.values
    }
}

/// `w(a) = a^l mod l^2`, the Teichmuller representative.
pub fn teichmuller(a: u64, ell: u64) -> u64 {
    arith::pow_mod(a, ell, ell * ell)
}

/// The diagonal homomorphic lift built from Teichmuller representatives.
pub fn teichmuller_lift(base: &DiagonalResidual) -> SetLift {
    let ell = base.group.ell();
    let n2 = ell * ell;
    let (wa, wb) = (
        teichmuller(base.frob.alpha.value(), ell),
        teichmuller(base.frob.beta.value(), ell),
    );
    let values = base
        .group
        .enumerate()
        .iter()
        .map(|g| {
            let i = g.frobenius_exponent();
            Mat2::diagonal(arith::pow_mod(wa, i, n2), arith::pow_mod(wb, i, n2), n2)
        })
        .collect();
    SetLift::new(base, values).expect("Teichmuller lift reduces correctly")
}

/// `g -> (1 + l X(g)) s(g)` for an ad-valued 1-cochain `x` (its value at
/// the identity is ignored so the section stays normalized).
pub fn perturb(base: &DiagonalResidual, lift: &SetLift, x: &Cochain) -> Result<SetLift, LiftError> {
    let ell = base.group.ell();
    let n2 = ell * ell;
    let id = base.cayley.identity();
    let values = (0..base.cayley.order())
        .map(|g| {
            if g == id {
                return lift.values[g];
            }
            let xm = ad_matrix(x.value(&[g]), ell);
            let e = xm.data();
            let l = ell as i64;
            let factor = Mat2::new(
                [1 + l * e[0] as i64, l * e[1] as i64, l * e[2] as i64, 1 + l * e[3] as i64],
                n2,
            );
            factor.mul(&lift.values[g])
        })
        .collect();
    SetLift::new(base, values)
}

/// A random section: the Teichmuller lift perturbed by a random cochain.
pub fn random_section<R: Rng>(base: &DiagonalResidual, rng: &mut R) -> SetLift {
    let x = Cochain::random(base.adjoint(), 1, rng);
    perturb(base, &teichmuller_lift(base), &x).expect("perturbation of a valid section")
}

/// `d` with `s(g) s(h) s(gh)^-1 = 1 + l d(g,h)`, as an ad-valued 2-cochain.
pub fn obstruction_cocycle(base: &DiagonalResidual, lift: &SetLift) -> Result<Cochain, LiftError> {
    let ell = lift.ell;
    let cay = &base.cayley;
    let inverses: Vec<Mat2> = lift
        .values
        .iter()
        .enumerate()
        .map(|(g, v)| v.inverse().ok_or(LiftError::NotInvertible(g)))
        .collect::<Result<_, _>>()?;
    Ok(Cochain::from_fn(base.adjoint(), 2, |args| {
        let (g, h) = (args[0], args[1]);
        let c = lift.values[g].mul(&lift.values[h]).mul(&inverses[cay.mul(g, h)]);
        let id = Mat2::identity(ell * ell);
        let d: Vec<u64> = c
            .entries
            .iter()
            .zip(id.entries)
            .map(|(&x, i)| ((x + ell * ell - i) % (ell * ell)) / ell)
            .collect();
        let dm = FpMatrix::from_data(2, 2, ell, d).expect("2x2");
        ad_coords(&dm)
    }))
}

/// First pair where the section fails to be multiplicative mod `l^2`.
pub fn lift_homomorphism_failure(base: &DiagonalResidual, lift: &SetLift) -> Option<(usize, usize)> {
    multiplicative_failure(&base.cayley, &lift.values)
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    /// A homomorphic lift together with the 1-cochain that was divided out.
    Adjusted { lift: SetLift, correction: Cochain },
    /// The obstruction cocycle, whose class is nonzero.
    Obstructed { class: Cochain },
}

/// Repairs a section into a homomorphism when its obstruction class vanishes.
pub fn adjust_lift(base: &DiagonalResidual, lift: &SetLift) -> Result<LiftOutcome, LiftError> {
    let d = obstruction_cocycle(base, lift)?;
    let ad = base.adjoint();
    if d.is_zero() {
        return Ok(LiftOutcome::Adjusted {
            lift: lift.clone(),
            correction: Cochain::zero(ad, 1),
        });
    }
    match cohomology::is_coboundary(ad, &d)? {
        None => Ok(LiftOutcome::Obstructed { class: d }),
        Some(x) => {
            let neg = x.scale(base.group.ell() - 1);
            let repaired = perturb(base, lift, &neg)?;
            Ok(LiftOutcome::Adjusted {
                lift: repaired,
                correction: x,
            })
        }
    }
}

/// `FpScalar` view of an ad coordinate vector, for reports.
pub fn ad_vector(coords: &[u64], ell: u64) -> Vec<FpScalar> {
    coords.iter().map(|&c| FpScalar::new(c as i64, ell).expect("prime")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn base() -> DiagonalResidual {
        let g = TameGroup::new(5, 2).unwrap();
        DiagonalResidual::new(g, ResidualFrobenius::new(5, 2, 2, 1).unwrap()).unwrap()
    }

    #[test]
    fn zero_perturbation_is_a_homomorphism() {
        let b = base();
        let rep = DualNumberRep::new(&b, Cochain::zero(b.adjoint(), 1)).unwrap();
        assert!(is_homomorphism(&rep).unwrap().homomorphism);
    }

    #[test]
    fn coboundary_perturbation_conjugates_to_trivial() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Cochain::random(b.adjoint(), 0, &mut rng);
        let dx = cohomology::coboundary(b.adjoint(), &x).unwrap();
        let rep = DualNumberRep::new(&b, dx).unwrap();
        assert!(is_homomorphism(&rep).unwrap().homomorphism);
        assert!(conjugate_dual(&rep, x.value(&[])).unwrap().is_zero());
    }

    #[test]
    fn random_perturbation_fails_with_witness() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = Cochain::random(b.adjoint(), 1, &mut rng);
        let rep = DualNumberRep::new(&b, c).unwrap();
        let check = is_homomorphism(&rep).unwrap();
        assert!(!check.homomorphism);
        assert!(check.first_failure.is_some());
    }

    #[test]
    fn teichmuller_lift_is_unobstructed() {
        let b = base();
        let lift = teichmuller_lift(&b);
        assert_eq!(lift_homomorphism_failure(&b, &lift), None);
        assert!(obstruction_cocycle(&b, &lift).unwrap().is_zero());
        match adjust_lift(&b, &lift).unwrap() {
            LiftOutcome::Adjusted { lift: out, correction } => {
                assert_eq!(out, lift);
                assert!(correction.is_zero());
            }
            LiftOutcome::Obstructed { .. } => panic!("homomorphic input reported obstructed"),
        }
    }

    #[test]
    fn perturbed_lift_is_repaired() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lift = random_section(&b, &mut rng);
        assert!(lift_homomorphism_failure(&b, &lift).is_some());
        let d = obstruction_cocycle(&b, &lift).unwrap();
        assert!(cohomology::is_cocycle(b.adjoint(), &d).unwrap());
        match adjust_lift(&b, &lift).unwrap() {
            LiftOutcome::Adjusted { lift: out, .. } => assert_eq!(lift_homomorphism_failure(&b, &out), None),
            LiftOutcome::Obstructed { .. } => panic!("section over an unobstructed base"),
        }
    }

    #[test]
    fn reversed_product_order_is_not_a_cocycle() {
        // s(gh) s(g)^-1 s(h)^-1 instead of s(g) s(h) s(gh)^-1
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lift = random_section(&b, &mut rng);
        let cay = b.cayley().clone();
        let ell = 5;
        let other = Cochain::from_fn(b.adjoint(), 2, |args| {
            let (g, h) = (args[0], args[1]);
            let c = lift
                .value(cay.mul(g, h))
                .mul(&lift.value(g).inverse().unwrap())
                .mul(&lift.value(h).inverse().unwrap());
            let d: Vec<u64> = c
                .entries
                .iter()
                .zip([1, 0, 0, 1])
                .map(|(&x, i)| ((x + 25 - i) % 25) / ell)
                .collect();
            ad_coords(&FpMatrix::from_data(2, 2, ell, d).unwrap())
        });
        assert!(!cohomology::is_cocycle(b.adjoint(), &other).unwrap());
    }

    #[test]
    fn bad_sections_rejected() {
        let b = base();
        let mut values = teichmuller_lift(&b).values().to_vec();
        values[7] = Mat2::identity(25);
        assert_eq!(SetLift::new(&b, values), Err(LiftError::WrongReduction(7)));
        let mut values = teichmuller_lift(&b).values().to_vec();
        values[0] = Mat2::new([6, 0, 0, 1], 25);
        assert_eq!(SetLift::new(&b, values), Err(LiftError::NotNormalized));
    }

    #[test]
    fn eigenvalue_order_must_divide_m() {
        // m = 7 * 3 = 21 for q = 2 mod 7; alpha = 3 has order 6
        let g = TameGroup::new(7, 2).unwrap();
        let frob = ResidualFrobenius::new(7, 2, 3, 1).unwrap();
        assert!(matches!(DiagonalResidual::new(g, frob), Err(LiftError::InvalidParameters(_))));
    }
}
