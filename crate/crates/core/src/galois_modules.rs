//! Finite modules for the tame quotient over F_l: adjoint representations
//! (full and trace-zero, optionally twisted by the mod-l cyclotomic
//! character), mu_l, trivial modules, and the rank-two monomial lattice of
//! `q^(a/l) zeta^c`.
//!
//! A module is stored by the matrices of `F` and `tau`; every other element
//! acts by `A(F^i tau^j) = A_F^i A_tau^j`, which is well defined once the
//! defining relations of the group hold for the two matrices.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cohomology::{CohomologyError, GroupModule};
use crate::exact_linalg::{self, FpMatrix, FpScalar, LinalgError};
use crate::finite_group::FiniteGroup;
use crate::tame_group::{TameElement, TameGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("Frobenius eigenvalue {0} is zero mod l")]
    ZeroEigenvalue(&'static str),
    #[error("modulus mismatch: module over F_{module}, group over F_{group}")]
    ModulusMismatch { module: u64, group: u64 },
    #[error("generator matrices violate the group relation {0}")]
    RelationFails(&'static str),
    #[error("generator matrices must be square of equal size")]
    BadShape,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Frobenius eigenvalues of an unramified residual representation,
/// `rho(F) = diag(alpha, beta)`, together with `q mod l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualFrobenius {
    pub alpha: FpScalar,
    pub beta: FpScalar,
    pub q: FpScalar,
}

impl ResidualFrobenius {
    pub fn new(ell: u64, q: i64, alpha: i64, beta: i64) -> Result<Self, ModuleError> {
        let alpha = FpScalar::new(alpha, ell)?;
        let beta = FpScalar::new(beta, ell)?;
        if alpha.is_zero() {
            return Err(ModuleError::ZeroEigenvalue("alpha"));
        }
        if beta.is_zero() {
            return Err(ModuleError::ZeroEigenvalue("beta"));
        }
        Ok(Self {
            alpha,
            beta,
            q: FpScalar::new(q, ell)?,
        })
    }

    pub fn ell(&self) -> u64 {
        self.alpha.modulus()
    }

    /// `alpha / beta`.
    pub fn ratio(&self) -> FpScalar {
        self.alpha * self.beta.inv().expect("beta is nonzero")
    }

    /// Whether `alpha / beta = q`, the level-raising shape.
    pub fn is_level_raising(&self) -> bool {
        self.ratio() == self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdjointKind {
    /// All 2x2 matrices, basis `(id, e1, e2, e3)`.
    Full,
    /// Trace-zero matrices, basis `(e1, e2, e3)`.
    TraceZero,
}

/// `e1 = diag(1,-1)`, `e2 = [[0,1],[0,0]]`, `e3 = [[0,0],[1,0]]`, with the
/// identity prepended for the full adjoint.
pub fn adjoint_basis(kind: AdjointKind, ell: u64) -> Vec<FpMatrix> {
    let m = |r: [[i64; 2]; 2]| FpMatrix::from_rows(&[r[0].to_vec(), r[1].to_vec()], ell).expect("2x2");
    let mut basis = vec![m([[1, 0], [0, -1]]), m([[0, 1], [0, 0]]), m([[0, 0], [1, 0]])];
    if kind == AdjointKind::Full {
        basis.insert(0, FpMatrix::identity(2, ell));
    }
    basis
}

/// Coordinates of a 2x2 matrix in [`adjoint_basis`]; `None` if a trace-zero
/// coordinate vector is requested for a matrix with nonzero trace.
pub fn adjoint_coordinates(x: &FpMatrix, kind: AdjointKind) -> Option<Vec<u64>> {
    let p = x.modulus();
    let half = arith::inv_mod(2, p).expect("l is odd");
    let (a, b, c, d) = (x.get(0, 0), x.get(0, 1), x.get(1, 0), x.get(1, 1));
    let t = (a + d) % p * half % p;
    let s = (a + p - d) % p * half % p;
    match kind {
        AdjointKind::Full => Some(vec![t, s, b, c]),
        AdjointKind::TraceZero => (t == 0).then(|| vec![s, b, c]),
    }
}

/// A module for the tame quotient given by the actions of `F` and `tau`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisModule {
    group: TameGroup,
    dim: usize,
    frobenius_action: FpMatrix,
    tau_action: FpMatrix,
    label: String,
    matrix_basis: Option<Vec<FpMatrix>>,
}

impl GaloisModule {
    /// Checks `A_tau^l = 1`, `A_F^m = 1` and `A_F A_tau A_F^-1 = A_tau^q`.
    pub fn new(
        group: TameGroup,
        frobenius_action: FpMatrix,
        tau_action: FpMatrix,
        label: impl Into<String>,
    ) -> Result<Self, ModuleError> {
        let ell = group.ell();
        for a in [&frobenius_action, &tau_action] {
            if a.modulus() != ell {
                return Err(ModuleError::ModulusMismatch {
                    module: a.modulus(),
                    group: ell,
                });
            }
        }
        let dim = frobenius_action.rows();
        if frobenius_action.cols() != dim || tau_action.rows() != dim || tau_action.cols() != dim {
            return Err(ModuleError::BadShape);
        }
        if !tau_action.pow(ell)?.is_identity() {
            return Err(ModuleError::RelationFails("tau^l = 1"));
        }
        if !frobenius_action.pow(group.m())?.is_identity() {
            return Err(ModuleError::RelationFails("F^m = 1"));
        }
        let conj = frobenius_action.mul(&tau_action)?.mul(&frobenius_action.inverse()?)?;
        if conj != tau_action.pow(group.q())? {
            return Err(ModuleError::RelationFails("F tau F^-1 = tau^q"));
        }
        Ok(Self {
            group,
            dim,
            frobenius_action,
            tau_action,
            label: label.into(),
            matrix_basis: None,
        })
    }

    pub fn trivial(group: TameGroup, dim: usize) -> Self {
        let id = FpMatrix::identity(dim, group.ell());
        Self::new(group, id.clone(), id, format!("trivial^{dim}")).expect("trivial action")
    }

    /// `mu_l`: `F` acts by `q`, `tau` trivially.
    pub fn cyclotomic(group: TameGroup) -> Self {
        let ell = group.ell();
        let f = FpMatrix::diagonal(&[group.q()], ell);
        Self::new(group, f, FpMatrix::identity(1, ell), "mu_l").expect("cyclotomic character")
    }

    /// Adjoint action `X -> eps(g)^t rho(g) X rho(g)^-1` for arbitrary images
    /// of `F` and `tau` in `GL_2(F_l)`, with `t = 1` when `twisted`.
    pub fn adjoint_from_images(
        group: TameGroup,
        rho_f: &FpMatrix,
        rho_tau: &FpMatrix,
        kind: AdjointKind,
        twisted: bool,
    ) -> Result<Self, ModuleError> {
        let ell = group.ell();
        let basis = adjoint_basis(kind, ell);
        let conj_matrix = |r: &FpMatrix, scalar: u64| -> Result<FpMatrix, ModuleError> {
            let r_inv = r.inverse()?;
            let mut out = FpMatrix::zeros(basis.len(), basis.len(), ell);
            for (j, b) in basis.iter().enumerate() {
                let image = r.mul(b)?.mul(&r_inv)?.scale(scalar);
                let coords = adjoint_coordinates(&image, kind).expect("conjugation preserves trace");
                for (i, v) in coords.into_iter().enumerate() {
                    out.set(i, j, v);
                }
            }
            Ok(out)
        };
        let twist = if twisted { group.q() } else { 1 };
        let f = conj_matrix(rho_f, twist)?;
        let t = conj_matrix(rho_tau, 1)?;
        let label = format!(
            "{}ad{}",
            if twisted { "eps (x) " } else { "" },
            if kind == AdjointKind::TraceZero { "0" } else { "" }
        );
        let mut module = Self::new(group, f, t, label)?;
        module.matrix_basis = Some(basis);
        Ok(module)
    }

    /// The adjoint of the unramified residual `F -> diag(alpha, beta)`, `tau -> 1`.
    pub fn build_adjoint(
        group: TameGroup,
        frob: &ResidualFrobenius,
        kind: AdjointKind,
        twisted: bool,
    ) -> Result<Self, ModuleError> {
        let ell = group.ell();
        if frob.ell() != ell {
            return Err(ModuleError::ModulusMismatch {
                module: frob.ell(),
                group: ell,
            });
        }
        let rho_f = FpMatrix::diagonal(&[frob.alpha.value(), frob.beta.value()], ell);
        Self::adjoint_from_images(group, &rho_f, &FpMatrix::identity(2, ell), kind, twisted)
    }

    pub fn group(&self) -> &TameGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn frobenius_action(&self) -> &FpMatrix {
        &self.frobenius_action
    }

    pub fn tau_action(&self) -> &FpMatrix {
        &self.tau_action
    }

    pub fn matrix_basis(&self) -> Option<&[FpMatrix]> {
        self.matrix_basis.as_deref()
    }

    pub fn action(&self, g: &TameElement) -> FpMatrix {
        let f = self.frobenius_action.pow(g.frobenius_exponent()).expect("square");
        let t = self.tau_action.pow(g.inertia_exponent()).expect("square");
        f.mul(&t).expect("square")
    }

    /// Basis of the vectors fixed by `F` and `tau`.
    pub fn fixed_space(&self) -> Vec<Vec<u64>> {
        let ell = self.group.ell();
        let id = FpMatrix::identity(self.dim, ell);
        let a = self.frobenius_action.sub(&id).expect("square");
        let b = self.tau_action.sub(&id).expect("square");
        exact_linalg::row_reduce(&FpMatrix::vstack(&[&a, &b]).expect("same width")).kernel_basis
    }

    /// The same module over the Cayley-table form of the group.
    pub fn to_group_module(&self) -> GroupModule {
        self.to_group_module_on(Arc::new(self.group.cayley()))
            .expect("Cayley table built from this group")
    }

    /// As [`GaloisModule::to_group_module`], reusing an existing Cayley table
    /// of the same group (indexed as in [`TameGroup::enumerate`]).
    pub fn to_group_module_on(&self, cayley: Arc<FiniteGroup>) -> Result<GroupModule, CohomologyError> {
        let ell = self.group.ell();
        let l = ell as usize;
        let tau_powers: Vec<FpMatrix> = std::iter::successors(Some(FpMatrix::identity(self.dim, ell)), |x| {
            Some(x.mul(&self.tau_action).expect("square"))
        })
        .take(l)
        .collect();
        let mut actions = Vec::with_capacity(self.group.order());
        let mut f_power = FpMatrix::identity(self.dim, ell);
        for _ in 0..self.group.m() {
            for t in &tau_powers {
                actions.push(f_power.mul(t).expect("square"));
            }
            f_power = f_power.mul(&self.frobenius_action).expect("square");
        }
        let module = GroupModule::new(cayley, ell, actions, self.label.clone())?;
        match &self.matrix_basis {
            Some(b) => module.with_matrix_basis(b.clone()),
            None => Ok(module),
        }
    }
}

/// `(a, c)` standing for `q^(a/l) zeta_l^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticePoint {
    pub a: i64,
    pub c: u64,
}

/// The additive lattice of `q^(a/l) zeta^c` with its action by the tame quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialLattice {
    group: TameGroup,
}

impl MonomialLattice {
    pub fn new(group: TameGroup) -> Self {
        Self { group }
    }

    pub fn group(&self) -> &TameGroup {
        &self.group
    }

    pub fn point(&self, a: i64, c: i64) -> LatticePoint {
        LatticePoint {
            a,
            c: arith::reduce(c, self.group.ell()),
        }
    }

    pub fn zero(&self) -> LatticePoint {
        self.point(0, 0)
    }

    pub fn add(&self, x: LatticePoint, y: LatticePoint) -> LatticePoint {
        LatticePoint {
            a: x.a + y.a,
            c: (x.c + y.c) % self.group.ell(),
        }
    }

    pub fn neg(&self, x: LatticePoint) -> LatticePoint {
        self.point(-x.a, -(x.c as i64))
    }

    pub fn sub(&self, x: LatticePoint, y: LatticePoint) -> LatticePoint {
        self.add(x, self.neg(y))
    }

    /// `F^i tau^j` sends `(a, c)` to `(a, q^i (c + j a))`.
    pub fn act(&self, g: &TameElement, x: LatticePoint) -> LatticePoint {
        let ell = self.group.ell();
        let shifted = (x.c + g.inertia_exponent() * arith::reduce(x.a, ell)) % ell;
        LatticePoint {
            a: x.a,
            c: shifted * self.group.cyclotomic(g) % ell,
        }
    }
}

/// Free-function form of [`MonomialLattice::act`].
pub fn lattice_act(group: &TameGroup, g: &TameElement, x: LatticePoint) -> LatticePoint {
    MonomialLattice::new(group.clone()).act(g, x)
}
