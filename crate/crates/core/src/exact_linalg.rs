//! Exact arithmetic over the prime field F_l and the residue ring Z/l^K.
//!
//! Matrices are dense and row-major. Every routine is total on well-formed
//! input and never allocates more than a copy of its argument.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, MAX_MODULUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("modulus {0} is not a prime below 2^31")]
    BadPrime(u64),
    #[error("invalid residue ring Z/{ell}^{k}")]
    BadPrecision { ell: u64, k: u32 },
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
}

/// An element of F_l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u64,
    modulus: u64,
}

impl FpScalar {
    pub fn new(value: i64, modulus: u64) -> Result<Self, LinalgError> {
        if !arith::is_prime(modulus) || modulus >= MAX_MODULUS {
            return Err(LinalgError::BadPrime(modulus));
        }
        Ok(Self {
            value: arith::reduce(value, modulus),
            modulus,
        })
    }

    /// Skips the primality check; `modulus` must already be a validated prime.
    pub(crate) fn from_raw(value: u64, modulus: u64) -> Self {
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self, LinalgError> {
        arith::inv_mod(self.value, self.modulus)
            .map(|v| Self::from_raw(v, self.modulus))
            .ok_or(LinalgError::NotAUnit {
                value: self.value,
                modulus: self.modulus,
            })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self::from_raw(arith::pow_mod(self.value, exp, self.modulus), self.modulus)
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_raw(self.value + rhs.value, self.modulus)
    }
}

impl Sub for FpScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_raw(self.value + self.modulus - rhs.value, self.modulus)
    }
}

impl Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_raw(self.value * rhs.value, self.modulus)
    }
}

impl Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_raw(self.modulus - self.value, self.modulus)
    }
}

/// An element of Z/l^K, the finite-precision model of the l-adic integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZmodScalar {
    value: u64,
    ell: u64,
    precision: u32,
    modulus: u64,
}

impl ZmodScalar {
    pub fn new(value: i64, ell: u64, precision: u32) -> Result<Self, LinalgError> {
        let modulus = zmod_modulus(ell, precision)?;
        Ok(Self {
            value: arith::reduce(value, modulus),
            ell,
            precision,
            modulus,
        })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn ell(self) -> u64 {
        self.ell
    }

    pub fn precision(self) -> u32 {
        self.precision
    }

    pub fn is_unit(self) -> bool {
        self.value % self.ell != 0
    }
}

/// `l^K`, checking that `l` is prime, `K >= 1` and the result fits.
pub fn zmod_modulus(ell: u64, precision: u32) -> Result<u64, LinalgError> {
    if !arith::is_prime(ell) || precision == 0 {
        return Err(LinalgError::BadPrecision { ell, k: precision });
    }
    let m = ell
        .checked_pow(precision)
        .filter(|&m| m < MAX_MODULUS)
        .ok_or(LinalgError::BadPrecision { ell, k: precision })?;
    Ok(m)
}

/// Multiplicative inverse in Z/l^K.
pub fn invert_unit(u: ZmodScalar) -> Result<ZmodScalar, LinalgError> {
    if !u.is_unit() {
        return Err(LinalgError::NotAUnit {
            value: u.value,
            modulus: u.modulus,
        });
    }
    let inv = arith::inv_mod(u.value, u.modulus).expect("unit has an inverse");
    Ok(ZmodScalar { value: inv, ..u })
}

/// Dense row-major matrix over F_l.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        Self {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    pub fn diagonal(entries: &[u64], modulus: u64) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n, modulus);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e % modulus;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], modulus: u64) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| arith::reduce(x, modulus)))
            .collect();
        Ok(Self {
            modulus,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, modulus: u64, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % modulus);
            }
        }
        Self {
            modulus,
            rows,
            cols,
            data,
        }
    }

    /// Takes ownership of raw row-major data; entries are reduced.
    pub fn from_data(rows: usize, cols: usize, modulus: u64, mut data: Vec<u64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for x in &mut data {
            *x %= modulus;
        }
        Ok(Self {
            modulus,
            rows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows, self.modulus)
    }

    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if self.modulus != rhs.modulus {
            return Err(LinalgError::ModulusMismatch(self.modulus, rhs.modulus));
        }
        let p = self.modulus;
        let mut out = FpMatrix::zeros(self.rows, rhs.cols, p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = (out.data[idx] + a * rhs.data[k * rhs.cols + j]) % p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let p = self.modulus;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &x)| (acc + a * (x % p)) % p)
            })
            .collect())
    }

    pub fn add(&self, rhs: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.zip_with(rhs, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, rhs: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.zip_with(rhs, |a, b, p| (a + p - b) % p)
    }

    fn zip_with(&self, rhs: &FpMatrix, f: impl Fn(u64, u64, u64) -> u64) -> Result<FpMatrix, LinalgError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(LinalgError::DimensionMismatch("shapes differ".into()));
        }
        if self.modulus != rhs.modulus {
            return Err(LinalgError::ModulusMismatch(self.modulus, rhs.modulus));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b, self.modulus))
            .collect();
        Ok(FpMatrix { data, ..self.clone() })
    }

    pub fn scale(&self, s: u64) -> FpMatrix {
        let p = self.modulus;
        let s = s % p;
        FpMatrix {
            data: self.data.iter().map(|&a| a * s % p).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> FpMatrix {
        FpMatrix::from_fn(self.cols, self.rows, self.modulus, |i, j| self.get(j, i))
    }

    pub fn pow(&self, mut exp: u64) -> Result<FpMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut result = FpMatrix::identity(self.rows, self.modulus);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base)?;
            }
            base = base.mul(&base)?;
            exp >>= 1;
        }
        Ok(result)
    }

    /// Stacks `blocks` vertically.
    pub fn vstack(blocks: &[&FpMatrix]) -> Result<FpMatrix, LinalgError> {
        let first = blocks
            .first()
            .ok_or_else(|| LinalgError::DimensionMismatch("empty stack".into()))?;
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::DimensionMismatch("column counts differ".into()));
            }
            if b.modulus != first.modulus {
                return Err(LinalgError::ModulusMismatch(first.modulus, b.modulus));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(FpMatrix {
            modulus: first.modulus,
            rows,
            cols,
            data,
        })
    }

    /// Inverse of a square matrix, or `NotAUnit` when singular.
    pub fn inverse(&self) -> Result<FpMatrix, LinalgError> {
        let n = self.rows;
        if n != self.cols {
            return Err(LinalgError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let mut aug = FpMatrix::zeros(n, 2 * n, self.modulus);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let pivots = rref_in_place(&mut aug.data, n, 2 * n, self.modulus, n);
        if pivots.len() < n {
            return Err(LinalgError::NotAUnit {
                value: 0,
                modulus: self.modulus,
            });
        }
        Ok(FpMatrix::from_fn(n, n, self.modulus, |i, j| aug.data[i * 2 * n + n + j]))
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    /// Pivot column of each nonzero row of `echelon`, increasing.
    pub pivot_cols: Vec<usize>,
    /// Basis of the right kernel `{v : m v = 0}`, one vector per free column.
    pub kernel_basis: Vec<Vec<u64>>,
    /// Reduced row echelon form.
    pub echelon: FpMatrix,
}

pub fn row_reduce(m: &FpMatrix) -> RowReduction {
    let mut echelon = m.clone();
    let pivot_cols = rref_in_place(&mut echelon.data, m.rows, m.cols, m.modulus, m.cols);
    let kernel_basis = kernel_from_rref(&echelon, &pivot_cols);
    RowReduction {
        rank: pivot_cols.len(),
        pivot_cols,
        kernel_basis,
        echelon,
    }
}

pub fn rank(m: &FpMatrix) -> usize {
    let mut data = m.data.clone();
    rref_in_place(&mut data, m.rows, m.cols, m.modulus, m.cols).len()
}

/// Solves `a x = b`. `Ok(None)` means `b` lies outside the column span of `a`.
pub fn solve_linear(a: &FpMatrix, b: &[u64]) -> Result<Option<Vec<u64>>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let p = a.modulus;
    let w = a.cols + 1;
    let mut aug = Vec::with_capacity(a.rows * w);
    for i in 0..a.rows {
        aug.extend_from_slice(a.row(i));
        aug.push(b[i] % p);
    }
    let pivots = rref_in_place(&mut aug, a.rows, w, p, a.cols);
    if (pivots.len()..a.rows).any(|i| aug[i * w + a.cols] != 0) {
        return Ok(None);
    }
    let mut x = vec![0; a.cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i * w + a.cols];
    }
    Ok(Some(x))
}

fn kernel_from_rref(echelon: &FpMatrix, pivot_cols: &[usize]) -> Vec<Vec<u64>> {
    let p = echelon.modulus;
    let mut is_pivot = vec![false; echelon.cols];
    for &c in pivot_cols {
        is_pivot[c] = true;
    }
    (0..echelon.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0; echelon.cols];
            v[f] = 1 % p;
            for (i, &c) in pivot_cols.iter().enumerate() {
                v[c] = (p - echelon.get(i, f)) % p;
            }
            v
        })
        .collect()
}

/// Gauss-Jordan elimination in place, choosing pivots only among the first
/// `pivot_limit` columns. Returns the pivot columns; rows beyond their count
/// are zero on those columns.
pub(crate) fn rref_in_place(data: &mut [u64], rows: usize, cols: usize, p: u64, pivot_limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut pivot_row: Vec<(usize, u64)> = Vec::new();
    for c in 0..pivot_limit {
        if r == rows {
            break;
        }
        let Some(found) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if found != r {
            for j in c..cols {
                data.swap(found * cols + j, r * cols + j);
            }
        }
        let inv = arith::inv_mod(data[r * cols + c], p).expect("nonzero entry of a prime field");
        pivot_row.clear();
        for j in c..cols {
            let v = &mut data[r * cols + j];
            if *v != 0 {
                *v = *v * inv % p;
                pivot_row.push((j, *v));
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = data[i * cols + c];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            let row = &mut data[i * cols..(i + 1) * cols];
            for &(j, v) in &pivot_row {
                row[j] = (row[j] + neg * v) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: u64) -> FpMatrix {
        FpMatrix::from_fn(rows, cols, p, |_, _| rng.gen_range(0..p))
    }

    /// Independent rank: fraction-free forward elimination (no pivot
    /// normalisation, no back substitution), counting nonzero rows.
    fn naive_rank(m: &FpMatrix) -> usize {
        let p = m.modulus() as i64;
        let mut a: Vec<Vec<i64>> = (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x as i64).collect()).collect();
        let mut row = 0;
        for col in 0..m.cols() {
            let Some(piv) = (row..a.len()).find(|&i| a[i][col] != 0) else { continue };
            a.swap(row, piv);
            for i in row + 1..a.len() {
                let (x, y) = (a[row][col], a[i][col]);
                for j in 0..m.cols() {
                    a[i][j] = (x * a[i][j] - y * a[row][j]).rem_euclid(p);
                }
            }
            row += 1;
        }
        a.iter().filter(|r| r.iter().any(|&x| x != 0)).count()
    }

    #[test]
    fn identity_has_full_rank() {
        let r = row_reduce(&FpMatrix::identity(3, 5));
        assert_eq!(r.rank, 3);
        assert!(r.kernel_basis.is_empty());
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let r = row_reduce(&FpMatrix::zeros(2, 2, 5));
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_basis.len(), 2);
    }

    #[test]
    fn random_rank_matches_fraction_free_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            // sparse-ish entries so that rank deficiency actually occurs
            let m = FpMatrix::from_fn(4, 6, 7, |_, _| if rng.gen_bool(0.3) { rng.gen_range(0..7) } else { 0 });
            let r = row_reduce(&m);
            assert_eq!(r.rank, naive_rank(&m));
            assert_eq!(r.rank + r.kernel_basis.len(), 6);
            for k in &r.kernel_basis {
                assert!(m.mul_vec(k).unwrap().iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = vec![1, 4, 2];
        assert_eq!(solve_linear(&FpMatrix::identity(3, 5), &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_zero_matrix_nonzero_rhs_has_no_solution() {
        assert_eq!(solve_linear(&FpMatrix::zeros(2, 3, 5), &[0, 1]).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        assert!(matches!(
            solve_linear(&FpMatrix::zeros(2, 3, 5), &[0, 1, 1]),
            Err(LinalgError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn solve_consistent_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = random_matrix(&mut rng, 5, 7, 5);
            let w: Vec<u64> = (0..7).map(|_| rng.gen_range(0..5)).collect();
            let b = a.mul_vec(&w).unwrap();
            let v = solve_linear(&a, &b).unwrap().expect("consistent by construction");
            assert_eq!(a.mul_vec(&v).unwrap(), b);
        }
    }

    #[test]
    fn invert_unit_examples() {
        let one = ZmodScalar::new(1, 5, 2).unwrap();
        assert_eq!(invert_unit(one).unwrap().value(), 1);
        let two = ZmodScalar::new(2, 5, 2).unwrap();
        assert_eq!(invert_unit(two).unwrap().value(), 13);
        let five = ZmodScalar::new(5, 5, 2).unwrap();
        assert!(matches!(invert_unit(five), Err(LinalgError::NotAUnit { .. })));
    }

    #[test]
    fn invert_unit_exhaustive_small_moduli() {
        for (ell, k) in [(5u64, 2u32), (7, 2), (3, 5), (11, 3), (97, 2)] {
            let m = ell.pow(k);
            for v in 0..m {
                let u = ZmodScalar::new(v as i64, ell, k).unwrap();
                match invert_unit(u) {
                    Ok(inv) => assert_eq!(v * inv.value() % m, 1),
                    Err(_) => assert_eq!(v % ell, 0),
                }
            }
        }
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 4, 4, 11);
            match a.inverse() {
                Ok(inv) => assert!(a.mul(&inv).unwrap().is_identity()),
                Err(_) => assert!(rank(&a) < 4),
            }
        }
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(FpScalar::new(1, 9).is_err());
        assert!(ZmodScalar::new(1, 6, 2).is_err());
        assert!(ZmodScalar::new(1, 5, 0).is_err());
    }
}
