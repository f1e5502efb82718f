//! Inhomogeneous bar-resolution cohomology of a finite group with
//! coefficients in a finite-dimensional F_l-module, in degrees 0, 1 and 2.
//!
//! Cochains are stored densely: an n-cochain is a table over `G^n` of
//! module vectors. The differentials are
//!
//! ```text
//! (d0 m)(g)       = g.m - m
//! (d1 b)(g,h)     = g.b(h) - b(gh) + b(g)
//! (d2 u)(g,h,k)   = g.u(h,k) - u(gh,k) + u(g,hk) - u(g,h)
//! ```
//!
//! Linear systems use only the rows whose first group argument is one of
//! the group's generators. An n-cocycle (n >= 1) that vanishes whenever its
//! first argument is a generator vanishes identically, because the cocycle
//! identity with first argument `s` gives `u(s h, ...) = s.u(h, ...)`. Hence
//! `dx = 0` iff the generator rows of `dx` vanish, and for a cocycle `c`,
//! `dx = c` iff the generator rows agree. This shrinks the degree-2 systems
//! from `|G|^2` to `|S| |G|` rows without changing any kernel or solution set.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact_linalg::{self, FpMatrix, LinalgError};
use crate::finite_group::FiniteGroup;

/// Dense systems larger than this many entries are refused.
pub const DENSE_ENTRY_LIMIT: usize = 40_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("cochain does not match module: {0}")]
    Incompatible(String),
    #[error("degree {0} is out of range")]
    DegreeOverflow(usize),
    #[error("input is not a cocycle (first failure at {0:?})")]
    NotACocycle(Vec<usize>),
    #[error("degree-0 class is not invariant")]
    NotInvariant,
    #[error("module {0} has no 2x2 matrix basis")]
    MissingMatrixBasis(String),
    #[error("dense system of {rows}x{cols} exceeds the desk-scale limit")]
    TooLarge { rows: usize, cols: usize },
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite group acting linearly on `F_l^dim`.
#[derive(Clone, Debug)]
pub struct GroupModule {
    group: Arc<FiniteGroup>,
    modulus: u64,
    dim: usize,
    actions: Vec<FpMatrix>,
    label: String,
    matrix_basis: Option<Vec<FpMatrix>>,
}

impl GroupModule {
    /// `actions[g]` is the matrix of `g`. The homomorphism property is
    /// checked on `generator * anything`, which implies it everywhere.
    pub fn new(
        group: Arc<FiniteGroup>,
        modulus: u64,
        actions: Vec<FpMatrix>,
        label: impl Into<String>,
    ) -> Result<Self, CohomologyError> {
        let label = label.into();
        if actions.len() != group.order() {
            return Err(CohomologyError::InvalidModule(format!(
                "{label}: {} action matrices for a group of order {}",
                actions.len(),
                group.order()
            )));
        }
        let dim = actions.first().map_or(0, FpMatrix::rows);
        if actions.iter().any(|a| a.rows() != dim || a.cols() != dim || a.modulus() != modulus) {
            return Err(CohomologyError::InvalidModule(format!("{label}: inconsistent action matrices")));
        }
        if !actions[group.identity()].is_identity() {
            return Err(CohomologyError::InvalidModule(format!("{label}: identity acts nontrivially")));
        }
        for &s in group.generators() {
            for h in 0..group.order() {
                if actions[group.mul(s, h)] != actions[s].mul(&actions[h])? {
                    return Err(CohomologyError::InvalidModule(format!(
                        "{label}: action is not multiplicative at ({s}, {h})"
                    )));
                }
            }
        }
        Ok(Self {
            group,
            modulus,
            dim,
            actions,
            label,
            matrix_basis: None,
        })
    }

    pub fn trivial(group: Arc<FiniteGroup>, modulus: u64, dim: usize) -> Self {
        let actions = vec![FpMatrix::identity(dim, modulus); group.order()];
        Self {
            group,
            modulus,
            dim,
            actions,
            label: format!("trivial F_{modulus}^{dim}"),
            matrix_basis: None,
        }
    }

    /// Declares the basis vectors to be the given 2x2 matrices, enabling the
    /// trace pairing.
    pub fn with_matrix_basis(mut self, basis: Vec<FpMatrix>) -> Result<Self, CohomologyError> {
        if basis.len() != self.dim || basis.iter().any(|b| b.rows() != 2 || b.cols() != 2) {
            return Err(CohomologyError::InvalidModule(format!(
                "{}: matrix basis must have {} entries of size 2x2",
                self.label, self.dim
            )));
        }
        self.matrix_basis = Some(basis);
        Ok(self)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn action(&self, g: usize) -> &FpMatrix {
        &self.actions[g]
    }

    pub fn matrix_basis(&self) -> Option<&[FpMatrix]> {
        self.matrix_basis.as_deref()
    }

    pub fn act(&self, g: usize, v: &[u64]) -> Vec<u64> {
        let a = &self.actions[g];
        let p = self.modulus;
        (0..self.dim)
            .map(|r| a.row(r).iter().zip(v).fold(0, |acc, (&x, &y)| (acc + x * y) % p))
            .collect()
    }

    /// The restriction to a subgroup given by its embedding `sub index -> self index`.
    pub fn restrict(&self, sub: Arc<FiniteGroup>, embedding: &[usize]) -> Result<Self, CohomologyError> {
        let actions = embedding.iter().map(|&g| self.actions[g].clone()).collect();
        let mut m = GroupModule::new(sub, self.modulus, actions, format!("{} (restricted)", self.label))?;
        m.matrix_basis = self.matrix_basis.clone();
        Ok(m)
    }

    /// Basis of the invariants `M^G`.
    pub fn fixed_space(&self) -> Vec<Vec<u64>> {
        exact_linalg::row_reduce(&restricted_coboundary_matrix(self, 0)).kernel_basis
    }
}

/// A function `G^degree -> M`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cochain {
    degree: usize,
    dim: usize,
    group_order: usize,
    modulus: u64,
    values: Vec<u64>,
}

impl Cochain {
    pub fn zero(module: &GroupModule, degree: usize) -> Self {
        let n = module.group.order();
        Self {
            degree,
            dim: module.dim,
            group_order: n,
            modulus: module.modulus,
            values: vec![0; n.pow(degree as u32) * module.dim],
        }
    }

    pub fn from_values(module: &GroupModule, degree: usize, values: Vec<u64>) -> Result<Self, CohomologyError> {
        let mut c = Self::zero(module, degree);
        if values.len() != c.values.len() {
            return Err(CohomologyError::Incompatible(format!(
                "{} values for a degree-{degree} cochain of size {}",
                values.len(),
                c.values.len()
            )));
        }
        c.values = values.into_iter().map(|v| v % module.modulus).collect();
        Ok(c)
    }

    /// Builds a cochain from `f(args)`, with `args` of length `degree`.
    pub fn from_fn(module: &GroupModule, degree: usize, mut f: impl FnMut(&[usize]) -> Vec<u64>) -> Self {
        let mut c = Self::zero(module, degree);
        let n = c.group_order;
        let mut args = vec![0usize; degree];
        for slot in 0..n.pow(degree as u32) {
            let mut rest = slot;
            for a in args.iter_mut().rev() {
                *a = rest % n;
                rest /= n;
            }
            let v = f(&args);
            debug_assert_eq!(v.len(), c.dim);
            for (k, x) in v.into_iter().enumerate() {
                c.values[slot * c.dim + k] = x % c.modulus;
            }
        }
        c
    }

    pub fn random<R: Rng>(module: &GroupModule, degree: usize, rng: &mut R) -> Self {
        let mut c = Self::zero(module, degree);
        for v in &mut c.values {
            *v = rng.gen_range(0..module.modulus);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    fn slot(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.group_order + a)
    }

    pub fn value(&self, args: &[usize]) -> &[u64] {
        debug_assert_eq!(args.len(), self.degree);
        let s = self.slot(args) * self.dim;
        &self.values[s..s + self.dim]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, CohomologyError> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, CohomologyError> {
        self.combine(other, self.modulus - 1)
    }

    /// `self + coeff * other`.
    fn combine(&self, other: &Cochain, coeff: u64) -> Result<Cochain, CohomologyError> {
        if (self.degree, self.dim, self.group_order, self.modulus)
            != (other.degree, other.dim, other.group_order, other.modulus)
        {
            return Err(CohomologyError::Incompatible("cochain shapes differ".into()));
        }
        let p = self.modulus;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a + coeff * b) % p)
            .collect();
        Ok(Cochain { values, ..self.clone() })
    }

    pub fn scale(&self, s: u64) -> Cochain {
        let p = self.modulus;
        Cochain {
            values: self.values.iter().map(|&v| v * (s % p) % p).collect(),
            ..self.clone()
        }
    }

    fn check(&self, module: &GroupModule) -> Result<(), CohomologyError> {
        if self.dim != module.dim || self.group_order != module.group.order() || self.modulus != module.modulus {
            return Err(CohomologyError::Incompatible(format!(
                "cochain (dim {}, |G| {}, p {}) vs module {} (dim {}, |G| {}, p {})",
                self.dim,
                self.group_order,
                self.modulus,
                module.label,
                module.dim,
                module.group.order(),
                module.modulus
            )));
        }
        Ok(())
    }
}

/// `(d c)(args)` for a single argument tuple of length `degree + 1`.
pub fn coboundary_at(module: &GroupModule, c: &Cochain, args: &[usize]) -> Vec<u64> {
    let g = &module.group;
    let p = module.modulus;
    let dim = module.dim;
    let mut out = module.act(args[0], c.value(&args[1..]));
    let mut acc = |v: &[u64], sign_plus: bool| {
        for k in 0..dim {
            out[k] = if sign_plus { (out[k] + v[k]) % p } else { (out[k] + p - v[k]) % p };
        }
    };
    match c.degree {
        0 => acc(c.value(&[]), false),
        1 => {
            acc(c.value(&[g.mul(args[0], args[1])]), false);
            acc(c.value(&[args[0]]), true);
        }
        2 => {
            acc(c.value(&[g.mul(args[0], args[1]), args[2]]), false);
            acc(c.value(&[args[0], g.mul(args[1], args[2])]), true);
            acc(c.value(&[args[0], args[1]]), false);
        }
        _ => unreachable!("degree checked by callers"),
    }
    out
}

pub fn coboundary(module: &GroupModule, c: &Cochain) -> Result<Cochain, CohomologyError> {
    c.check(module)?;
    if c.degree > 2 {
        return Err(CohomologyError::DegreeOverflow(c.degree));
    }
    let size = module.group.order().pow(c.degree as u32 + 1) * module.dim;
    if size > DENSE_ENTRY_LIMIT {
        return Err(CohomologyError::TooLarge { rows: size, cols: 1 });
    }
    Ok(Cochain::from_fn(module, c.degree + 1, |args| coboundary_at(module, c, args)))
}

/// First argument tuple (with generator first entry) where `d c` is nonzero.
pub fn first_cocycle_failure(module: &GroupModule, c: &Cochain) -> Result<Option<Vec<usize>>, CohomologyError> {
    c.check(module)?;
    if c.degree > 2 {
        return Err(CohomologyError::DegreeOverflow(c.degree));
    }
    let n = module.group.order();
    let tails = n.pow(c.degree as u32);
    let mut args = vec![0usize; c.degree + 1];
    for &s in module.group.generators() {
        for t in 0..tails {
            args[0] = s;
            let mut rest = t;
            for a in args[1..].iter_mut().rev() {
                *a = rest % n;
                rest /= n;
            }
            if coboundary_at(module, c, &args).iter().any(|&v| v != 0) {
                return Ok(Some(args));
            }
        }
    }
    Ok(None)
}

pub fn is_cocycle(module: &GroupModule, c: &Cochain) -> Result<bool, CohomologyError> {
    Ok(first_cocycle_failure(module, c)?.is_none())
}

/// Checks `d(d e) = 0` on every standard basis cochain `e` of degree 0 or 1,
/// returning the index of the first failure.
pub fn d_squared_basis_failure(module: &GroupModule, degree: usize) -> Result<Option<usize>, CohomologyError> {
    if degree > 1 {
        return Err(CohomologyError::DegreeOverflow(degree));
    }
    let n = module.group.order();
    let size = n.pow(degree as u32) * module.dim;
    check_size(size, n.pow(degree as u32 + 2) * module.dim)?;
    let mut values = vec![0; size];
    for k in 0..size {
        values[k] = 1;
        let e = Cochain::from_values(module, degree, values.clone())?;
        values[k] = 0;
        if !coboundary(module, &coboundary(module, &e)?)?.is_zero() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn check_size(rows: usize, cols: usize) -> Result<(), CohomologyError> {
    if rows.saturating_mul(cols) > DENSE_ENTRY_LIMIT {
        return Err(CohomologyError::TooLarge { rows, cols });
    }
    Ok(())
}

/// Matrix of `d^degree` restricted to rows whose first argument is a
/// generator. Rows are ordered `(generator, tail..., component)`, columns
/// `(args..., component)`.
pub fn restricted_coboundary_matrix(module: &GroupModule, degree: usize) -> FpMatrix {
    let g = &module.group;
    let n = g.order();
    let dim = module.dim;
    let p = module.modulus;
    let gens = g.generators();
    let cols = n.pow(degree as u32) * dim;
    let tails = n.pow(degree as u32);
    let rows = gens.len() * tails * dim;
    let mut data = vec![0u64; rows * cols];
    let mut row = 0;
    let mut tail = vec![0usize; degree];
    for &s in gens {
        let a = &module.actions[s];
        for t in 0..tails {
            let mut rest = t;
            for x in tail.iter_mut().rev() {
                *x = rest % n;
                rest /= n;
            }
            let col_of = |args: &[usize]| args.iter().fold(0, |acc, &x| acc * n + x) * dim;
            for r in 0..dim {
                let line = &mut data[row * cols..(row + 1) * cols];
                let mut bump = |col: usize, v: u64| line[col] = (line[col] + v) % p;
                // s . x(tail)
                let base = col_of(&tail);
                for k in 0..dim {
                    bump(base + k, a.get(r, k));
                }
                match degree {
                    0 => bump(r, p - 1),
                    1 => {
                        bump(col_of(&[g.mul(s, tail[0])]) + r, p - 1);
                        bump(col_of(&[s]) + r, 1);
                    }
                    2 => {
                        bump(col_of(&[g.mul(s, tail[0]), tail[1]]) + r, p - 1);
                        bump(col_of(&[s, g.mul(tail[0], tail[1])]) + r, 1);
                        bump(col_of(&[s, tail[0]]) + r, p - 1);
                    }
                    _ => unreachable!("degree <= 2"),
                }
                row += 1;
            }
        }
    }
    FpMatrix::from_data(rows, cols, p, data).expect("sized above")
}

/// Dimensions of cochains, cocycles, coboundaries and cohomology in one degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyDims {
    pub degree: usize,
    pub cochains: usize,
    pub cocycles: usize,
    pub coboundaries: usize,
    pub cohomology: usize,
}

fn cocycle_dim(module: &GroupModule, degree: usize) -> Result<usize, CohomologyError> {
    let n = module.group.order();
    let cols = n.pow(degree as u32) * module.dim;
    let rows = module.group.generators().len() * cols;
    check_size(rows, cols)?;
    if module.group.generators().is_empty() {
        // trivial group: every cochain of positive degree is d of something
        // only through the identity, and all cochains are cocycles
        return Ok(cols);
    }
    Ok(cols - exact_linalg::rank(&restricted_coboundary_matrix(module, degree)))
}

pub fn cohomology_dims(module: &GroupModule, degree: usize) -> Result<CohomologyDims, CohomologyError> {
    if degree > 2 {
        return Err(CohomologyError::DegreeOverflow(degree));
    }
    let n = module.group.order();
    let cochains = n.pow(degree as u32) * module.dim;
    let cocycles = cocycle_dim(module, degree)?;
    let coboundaries = if degree == 0 {
        0
    } else {
        let prev = n.pow(degree as u32 - 1) * module.dim;
        prev - cocycle_dim(module, degree - 1)?
    };
    Ok(CohomologyDims {
        degree,
        cochains,
        cocycles,
        coboundaries,
        cohomology: cocycles - coboundaries,
    })
}

pub fn cohomology_dim(module: &GroupModule, degree: usize) -> Result<usize, CohomologyError> {
    Ok(cohomology_dims(module, degree)?.cohomology)
}

/// `H^degree` of a cyclic group generated by `generator`, from the periodic
/// resolution: `ker T` in degree 0, `ker N / im T` in odd degrees and
/// `ker T / im N` in positive even degrees, with `T = g - 1` and
/// `N = 1 + g + ... + g^(n-1)`. Independent of the bar complex.
pub fn cyclic_cohomology_dim(module: &GroupModule, generator: usize, degree: usize) -> Result<usize, CohomologyError> {
    let group = &module.group;
    if group.closure(&[generator]).len() != group.order() {
        return Err(CohomologyError::InvalidModule(format!(
            "element {generator} does not generate the group"
        )));
    }
    let p = module.modulus;
    let dim = module.dim;
    let id = FpMatrix::identity(dim, p);
    let t = module.action(generator).sub(&id)?;
    let mut norm = FpMatrix::zeros(dim, dim, p);
    let mut power = id;
    for _ in 0..group.order() {
        norm = norm.add(&power)?;
        power = power.mul(module.action(generator))?;
    }
    let (rt, rn) = (exact_linalg::rank(&t), exact_linalg::rank(&norm));
    Ok(match degree {
        0 => dim - rt,
        // both quotients have dimension dim - rank T - rank N
        _ => dim - rt - rn,
    })
}

/// Basis of the `degree`-cocycles.
pub fn cocycle_basis(module: &GroupModule, degree: usize) -> Result<Vec<Cochain>, CohomologyError> {
    if degree > 2 {
        return Err(CohomologyError::DegreeOverflow(degree));
    }
    let cols = module.group.order().pow(degree as u32) * module.dim;
    check_size(module.group.generators().len() * cols, cols)?;
    exact_linalg::row_reduce(&restricted_coboundary_matrix(module, degree))
        .kernel_basis
        .into_iter()
        .map(|v| Cochain::from_values(module, degree, v))
        .collect()
}

/// For a cocycle `c` of degree 1 or 2, a cochain `x` with `d x = c`, or
/// `None` when the class of `c` is nonzero.
pub fn is_coboundary(module: &GroupModule, c: &Cochain) -> Result<Option<Cochain>, CohomologyError> {
    c.check(module)?;
    if c.degree == 0 || c.degree > 2 {
        return Err(CohomologyError::DegreeOverflow(c.degree));
    }
    if let Some(args) = first_cocycle_failure(module, c)? {
        return Err(CohomologyError::NotACocycle(args));
    }
    let d = c.degree - 1;
    let n = module.group.order();
    let cols = n.pow(d as u32) * module.dim;
    let rows = module.group.generators().len() * cols;
    check_size(rows, cols)?;
    let a = restricted_coboundary_matrix(module, d);
    let mut rhs = Vec::with_capacity(rows);
    for &s in module.group.generators() {
        let start = s * cols;
        rhs.extend_from_slice(&c.values[start..start + cols]);
    }
    let Some(x) = exact_linalg::solve_linear(&a, &rhs)? else {
        return Ok(None);
    };
    let pre = Cochain::from_values(module, d, x)?;
    debug_assert_eq!(coboundary(module, &pre).ok().as_ref(), Some(c));
    Ok(Some(pre))
}

/// `Sum_{a,b} x_a y_b tr(B_a B_b)` as a bilinear form table.
fn trace_form(left: &[FpMatrix], right: &[FpMatrix]) -> Result<Vec<Vec<u64>>, CohomologyError> {
    left.iter()
        .map(|a| {
            right
                .iter()
                .map(|b| {
                    let ab = a.mul(b)?;
                    Ok((ab.get(0, 0) + ab.get(1, 1)) % ab.modulus())
                })
                .collect()
        })
        .collect()
}

/// Cup product of an invariant 0-cochain `m0` with `u`, followed by the
/// trace pairing `(X, Y) -> tr(XY)`. The output is a scalar cochain of the
/// same degree as `u`.
pub fn cup_trace(
    m0_module: &GroupModule,
    m0: &Cochain,
    u_module: &GroupModule,
    u: &Cochain,
) -> Result<Cochain, CohomologyError> {
    m0.check(m0_module)?;
    u.check(u_module)?;
    if m0.degree != 0 {
        return Err(CohomologyError::DegreeOverflow(m0.degree));
    }
    if !is_cocycle(m0_module, m0)? {
        return Err(CohomologyError::NotInvariant);
    }
    let lb = m0_module
        .matrix_basis()
        .ok_or_else(|| CohomologyError::MissingMatrixBasis(m0_module.label.clone()))?;
    let rb = u_module
        .matrix_basis()
        .ok_or_else(|| CohomologyError::MissingMatrixBasis(u_module.label.clone()))?;
    let form = trace_form(lb, rb)?;
    let p = u_module.modulus;
    let m = m0.value(&[]);
    let weights: Vec<u64> = (0..rb.len())
        .map(|b| (0..lb.len()).fold(0, |acc, a| (acc + m[a] * form[a][b]) % p))
        .collect();
    let slots = u.values.len() / u.dim;
    let values = (0..slots)
        .map(|s| {
            u.values[s * u.dim..(s + 1) * u.dim]
                .iter()
                .zip(&weights)
                .fold(0, |acc, (&x, &w)| (acc + x * w) % p)
        })
        .collect();
    Ok(Cochain {
        degree: u.degree,
        dim: 1,
        group_order: u.group_order,
        modulus: p,
        values,
    })
}

/// Finds a 2-cocycle `u` in `u_module` with `cup_trace(m0, u)` cohomologous
/// to `target` (a 2-cocycle in the one-dimensional `target_module`).
///
/// First looks for a vector `v` with `tr(m0 v) = 1` spanning a copy of
/// `target_module` inside `u_module`; then `u = target * v` works on the
/// nose. Otherwise solves the full system `d u = 0`,
/// `cup_trace(m0, u) - d x = target` when it fits in memory.
pub fn solve_dual_class(
    m0_module: &GroupModule,
    m0: &Cochain,
    u_module: &GroupModule,
    target_module: &GroupModule,
    target: &Cochain,
) -> Result<Option<Cochain>, CohomologyError> {
    target.check(target_module)?;
    if target_module.dim != 1 || target.degree != 2 {
        return Err(CohomologyError::Incompatible("target must be a scalar 2-cochain".into()));
    }
    if let Some(args) = first_cocycle_failure(target_module, target)? {
        return Err(CohomologyError::NotACocycle(args));
    }
    // weights w_b with cup_trace(m0, u)(g,h) = sum_b w_b u_b(g,h)
    let probe = Cochain::from_fn(u_module, 0, |_| vec![0; u_module.dim]);
    let dim = u_module.dim;
    let p = u_module.modulus;
    let weights: Vec<u64> = (0..dim)
        .map(|b| {
            let mut e = probe.clone();
            e.values[b] = 1;
            cup_trace(m0_module, m0, u_module, &e).map(|c| c.values[0])
        })
        .collect::<Result<_, _>>()?;

    // v with weights . v = 1 and (A_s - chi(s)) v = 0 for generators s
    let gens = u_module.group.generators();
    let mut rows = vec![weights.iter().map(|&w| w as i64).collect::<Vec<_>>()];
    let mut rhs = vec![1u64];
    for &s in gens {
        let chi = target_module.action(s).get(0, 0);
        let a = u_module.action(s);
        for r in 0..dim {
            rows.push(
                (0..dim)
                    .map(|k| {
                        let v = a.get(r, k) + if r == k { p - chi } else { 0 };
                        (v % p) as i64
                    })
                    .collect(),
            );
            rhs.push(0);
        }
    }
    let system = FpMatrix::from_rows(&rows, p)?;
    if let Some(v) = exact_linalg::solve_linear(&system, &rhs)? {
        let slots = target.values.len();
        let mut values = Vec::with_capacity(slots * dim);
        for &t in &target.values {
            values.extend(v.iter().map(|&x| x * t % p));
        }
        return Ok(Some(Cochain::from_values(u_module, 2, values)?));
    }

    // general route: unknowns (u in C^2(M), x in C^1(target))
    let n = u_module.group.order();
    let cu = n * n * dim;
    let cx = n;
    let d2 = restricted_coboundary_matrix(u_module, 2);
    let total_rows = d2.rows() + n * n;
    check_size(total_rows, cu + cx)?;
    let mut data = vec![0u64; total_rows * (cu + cx)];
    let width = cu + cx;
    for r in 0..d2.rows() {
        data[r * width..r * width + cu].copy_from_slice(d2.row(r));
    }
    let d1 = restricted_full_d1(target_module);
    let mut b = vec![0u64; total_rows];
    for slot in 0..n * n {
        let r = d2.rows() + slot;
        for k in 0..dim {
            data[r * width + slot * dim + k] = weights[k];
        }
        for &(j, v) in &d1[slot] {
            data[r * width + cu + j] = (p - v) % p;
        }
        b[r] = target.values[slot];
    }
    let a = FpMatrix::from_data(total_rows, width, p, data)?;
    Ok(exact_linalg::solve_linear(&a, &b)?
        .map(|sol| Cochain::from_values(u_module, 2, sol[..cu].to_vec()))
        .transpose()?)
}

/// Sparse rows of the full `d1` on a one-dimensional module, indexed by `(g,h)`.
fn restricted_full_d1(module: &GroupModule) -> Vec<Vec<(usize, u64)>> {
    let g = &module.group;
    let n = g.order();
    let p = module.modulus;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let chi = module.action(a).get(0, 0);
        for b in 0..n {
            let mut row: Vec<(usize, u64)> = Vec::new();
            let mut push = |j: usize, v: u64| match row.iter_mut().find(|(k, _)| *k == j) {
                Some((_, w)) => *w = (*w + v) % p,
                None => row.push((j, v % p)),
            };
            push(b, chi);
            push(g.mul(a, b), p - 1);
            push(a, 1);
            out.push(row);
        }
    }
    out
}
