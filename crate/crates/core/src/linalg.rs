//! Dense complex matrices.
//!
//! `ComplexMatrix` wraps a column-major `nalgebra::DMatrix<Complex64>` and
//! adds the handful of operations the rest of the crate needs: Kronecker
//! products, Frobenius distances, unitarity/Hermiticity checks and the
//! exponential of a Hermitian generator.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance used by `is_unitary` / `is_hermitian`.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Self(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { diag[r] } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.0[(r, c)] = v;
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols(), v.len());
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square()
            && (self.adjoint() * self.clone())
                .distance(&Self::identity(self.rows()))
                .is_ok_and(|d| d < STRUCTURE_TOL)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.distance(&self.adjoint()).is_ok_and(|d| d < STRUCTURE_TOL)
    }

    /// Frobenius distance to `other`; see [`frobenius_distance`].
    pub fn distance(&self, other: &Self) -> Result<f64> {
        frobenius_distance(self, other)
    }

    /// `exp(-i * t * self)` for Hermitian `self`, computed through its
    /// eigendecomposition `V diag(λ) V†`.
    pub fn hermitian_exp(&self, t: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                found: self.cols(),
            });
        }
        if !t.is_finite() || self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix exponential input".into()));
        }
        let eig = self.0.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("eigenvalues".into()));
        }
        let v = &eig.eigenvectors;
        let phases = eig.eigenvalues.map(|l| (-I * l * t).exp());
        let mut scaled = v.clone();
        for (c, p) in phases.iter().enumerate() {
            scaled.column_mut(c).iter_mut().for_each(|z| *z *= *p);
        }
        Ok(Self(scaled * v.adjoint()))
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

/// √Σ|A−B|² over all entries.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.rows() * a.cols(),
            found: b.rows() * b.cols(),
        });
    }
    Ok(a.0
        .iter()
        .zip(b.0.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Places a 2×2 operator on `qubit` of an `n`-qubit register (qubit 0 is the
/// most significant bit).
pub fn embed_single(op: &ComplexMatrix, qubit: usize, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for q in 0..n {
        out = if q == qubit {
            out.kron(op)
        } else {
            out.kron(&ComplexMatrix::identity(2))
        };
    }
    out
}
