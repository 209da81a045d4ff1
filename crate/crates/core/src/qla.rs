//! Dense complex linear algebra for small operators.
//!
//! Thin newtypes over `nalgebra` dynamic matrices with the handful of
//! spectral routines the rest of the crate needs: Hermitian
//! eigendecomposition, operator norm, PSD square root and POVM validation.
//! Dimensions stay small (d ≤ 16 in practice), so everything is dense.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Default tolerance for every validation predicate in the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("iterative solver did not converge")]
    NoConvergence,

    #[error("matrix data has {len} entries, which is not a square of a positive integer")]
    NotSquare { len: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

/// Complex column vector.
#[derive(Clone, PartialEq)]
pub struct CVector(DVector<Complex64>);

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_row_major(entries: &[Complex64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(LinalgError::NotSquare { len: entries.len() });
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        let m = Self::from_row_major(&entries)?;
        if rows.iter().any(|r| r.len() != m.dim()) {
            return Err(LinalgError::NotSquare { len: entries.len() });
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn column(&self, col: usize) -> CVector {
        CVector(self.0.column(col).into_owned())
    }

    pub fn row_conj(&self, row: usize) -> CVector {
        CVector(self.0.row(row).transpose().map(|z| z.conj()))
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = CMatrix(self.0.adjoint() * &self.0);
        prod.max_abs_diff(&CMatrix::identity(self.dim())) <= tol
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match eig_hermitian_with_tol(self, tol) {
            Ok(e) => e.values.last().is_none_or(|&min| min >= -tol),
            Err(_) => false,
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{}", self.0)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;
    fn mul(self, rhs: &CVector) -> CVector {
        CVector(&self.0 * &rhs.0)
    }
}

impl CVector {
    pub fn from_vec(entries: Vec<Complex64>) -> Self {
        Self(DVector::from_vec(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::from_vec(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|k⟩` (0-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.0[k]
    }

    pub fn entries(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| Self(self.0.map(|z| z / n)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Rank-1 operator `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        CMatrix(&self.0 * self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CVector{:?}", self.0.as_slice())
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        CVector(&self.0 + &rhs.0)
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl HermitianEigen {
    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let dim = self.vectors.first().map_or(0, CVector::dim);
        let mut acc = CMatrix::zeros(dim);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            acc = &acc + &v.projector().scale(f(lambda));
        }
        acc
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with_tol(m, DEFAULT_TOL)
}

fn eig_hermitian_with_tol(m: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(LinalgError::NotHermitian { deviation });
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (&m.0 + m.0.adjoint()).map(|z| z * 0.5);
    let eig =
        SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS).ok_or(LinalgError::NoConvergence)?;

    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| CVector(eig.eigenvectors.column(k).into_owned()))
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    let svd =
        m.0.clone()
            .try_svd(false, false, f64::EPSILON, MAX_SWEEPS)
            .ok_or(LinalgError::NoConvergence)?;
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}

/// Principal square root of a PSD matrix.
///
/// Eigenvalues in `(-DEFAULT_TOL, 0)` are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = eig_hermitian(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -DEFAULT_TOL {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// True iff every operator is PSD within `tol` and they sum to identity within `tol`.
pub fn validate_povm(ops: &[CMatrix], tol: f64) -> Result<bool> {
    let Some(first) = ops.first() else {
        return Ok(false);
    };
    let dim = first.dim();
    if let Some(bad) = ops.iter().find(|op| op.dim() != dim) {
        return Err(LinalgError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    if !ops.iter().all(|op| op.is_psd(tol)) {
        return Ok(false);
    }
    let sum = ops.iter().fold(CMatrix::zeros(dim), |acc, op| &acc + op);
    Ok(sum.max_abs_diff(&CMatrix::identity(dim)) <= tol)
}


#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&CMatrix::identity(4)).unwrap();
        assert_eq!(e.values.len(), 4);
        for l in e.values {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_spectrum_and_vectors() {
        let m = CMatrix::diagonal(&[1.0, 3.0, -2.0]);
        let e = eig_hermitian(&m).unwrap();
        let expected = [3.0, 1.0, -2.0];
        let basis_index = [1, 0, 2];
        for k in 0..3 {
            assert!((e.values[k] - expected[k]).abs() < 1e-14);
            let overlap = e.vectors[k]
                .inner(&CVector::basis(3, basis_index[k]))
                .norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for (dim, seed) in [(2, 1), (4, 2), (7, 3), (16, 4)] {
            let h = random_hermitian(dim, seed);
            let e = eig_hermitian(&h).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let back = e.reconstruct_with(|l| l);
            assert!(back.max_abs_diff(&h) < 1e-10, "dim {dim}");
            for a in 0..dim {
                for b in 0..dim {
                    let ip = e.vectors[a].inner(&e.vectors[b]).norm();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            eig_hermitian(&m),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn norms_of_simple_operators() {
        assert!((operator_norm(&CMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-14);
        let v = CVector::from_real(&[0.6, 0.0, 0.8]);
        assert!((operator_norm(&v.projector()).unwrap() - 1.0).abs() < 1e-14);
        // non-normal matrix: singular value, not eigenvalue
        let m = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm(&m).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_cases() {
        let s = psd_sqrt(&CMatrix::identity(3)).unwrap();
        assert!(s.max_abs_diff(&CMatrix::identity(3)) < 1e-14);
        let s = psd_sqrt(&CMatrix::diagonal(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&CMatrix::diagonal(&[2.0, 3.0])) < 1e-14);
        let p = CVector::from_real(&[0.5, 0.5, 0.5, 0.5]).projector();
        assert!(psd_sqrt(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let s = psd_sqrt(&CMatrix::diagonal(&[1.0, -1e-12])).unwrap();
        assert!(s.max_abs_diff(&CMatrix::diagonal(&[1.0, 0.0])) < 1e-14);
        assert!(matches!(
            psd_sqrt(&CMatrix::diagonal(&[1.0, -1e-3])),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn povm_checks() {
        let half = CMatrix::identity(2).scale(0.5);
        assert!(validate_povm(&[half.clone(), half.clone()], DEFAULT_TOL).unwrap());
        let id = CMatrix::identity(2);
        assert!(!validate_povm(&[id.clone(), id.clone()], DEFAULT_TOL).unwrap());
        let not_psd = CMatrix::diagonal(&[1.5, 1.0]);
        let rest = CMatrix::diagonal(&[-0.5, 0.0]);
        assert!(!validate_povm(&[not_psd, rest], DEFAULT_TOL).unwrap());
        assert!(matches!(
            validate_povm(&[half, CMatrix::identity(3)], DEFAULT_TOL),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unitarity_predicate() {
        let u = random_unitary(4, 11);
        assert!(u.is_unitary(1e-10));
        assert!(!CMatrix::diagonal(&[1.0, 2.0]).is_unitary(1e-10));
        let h = CMatrix::from_fn(2, |r, _| if r == 0 { c(1.0) } else { c(0.0) });
        assert!(!h.is_unitary(1e-10));
    }
}
