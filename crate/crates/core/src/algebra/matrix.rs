//! Dense matrices over a [`Scalar`] ring.
//!
//! Dimensions in this crate stay small (at most a few hundred), so storage is
//! a flat row-major `Vec` and products skip zero entries rather than using any
//! sparse format. Exact inversion uses fraction-free (Bareiss-style)
//! Gauss-Jordan elimination over big integers so intermediate values stay
//! bounded by minors of the input.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("singular matrix: rank deficiency detected at pivot row {pivot_row}")]
pub struct SingularMatrix {
    pub pivot_row: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("eigenvalue iteration did not converge within {max_iterations} iterations")]
pub struct SpectralFailure {
    pub max_iterations: usize,
}

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, factor: &S) -> Self {
        self.map(|x| x.clone() * factor.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out[(i, j)].clone();
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    /// Tensor product under concatenated-index ordering:
    /// `(A ⊗ B)[(r1·rb + r2), (c1·cb + c2)] = A[r1,c1]·B[r2,c2]`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out: Matrix<S> = Matrix::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = &self[(r1, c1)];
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = &other[(r2, c2)];
                        if b.is_zero() {
                            continue;
                        }
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] =
                            a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect_one = i == j;
                if expect_one != self[(i, j)].is_one() && (expect_one || !self[(i, j)].is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    /// Submatrix on the given row/column index set, re-indexed densely.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), indices.len(), |i, j| {
            self[(indices[i], indices[j])].clone()
        })
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn apply(&self, vector: &[S]) -> Vec<S> {
        assert_eq!(self.cols, vector.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    if self[(i, j)].is_zero() || vector[j].is_zero() {
                        continue;
                    }
                    acc = acc + self[(i, j)].clone() * vector[j].clone();
                }
                acc
            })
            .collect()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix<Rational> {
    /// Exact inverse by fraction-free Gauss-Jordan elimination.
    ///
    /// Rows are first scaled to integers; elimination then works entirely in
    /// `BigInt` with exact divisions by the previous pivot, which keeps entry
    /// growth bounded. Returns the pivot row at which rank deficiency was
    /// detected when the matrix is singular.
    pub fn exact_inverse(&self) -> Result<Self, SingularMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }

        // Row scaling: A = diag(1/d_i) · M with integer M, so inverting A
        // amounts to solving M · X = diag(d_i). The scaling lands in the
        // augmented block and elimination stays entirely over integers.
        let mut work: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut d = BigInt::one();
            for j in 0..n {
                d = d.lcm(self[(i, j)].denom());
            }
            let mut row: Vec<BigInt> = Vec::with_capacity(2 * n);
            for j in 0..n {
                let x = &self[(i, j)];
                row.push(x.numer() * (&d / x.denom()));
            }
            for j in 0..n {
                row.push(if i == j { d.clone() } else { BigInt::zero() });
            }
            work.push(row);
        }

        // Fraction-free Gauss-Jordan: after step k every entry is an integer
        // minor of the scaled input, and the division by the previous pivot
        // is exact.
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot_row = (k..n).find(|&r| !work[r][k].is_zero());
            let Some(r) = pivot_row else {
                return Err(SingularMatrix { pivot_row: k });
            };
            work.swap(k, r);
            let pivot_row = work[k].clone();
            let pivot = pivot_row[k].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i == k {
                    continue;
                }
                let factor = row[k].clone();
                for (slot, pivot_entry) in row.iter_mut().zip(&pivot_row) {
                    let value = &pivot * &*slot - &factor * pivot_entry;
                    let (q, rem) = value.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "fraction-free division must be exact");
                    *slot = q;
                }
            }
            prev = pivot;
        }

        // Left block is now diagonal; each inverse row is the right block
        // divided by its diagonal entry.
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            let diag = work[i][i].clone();
            debug_assert!(!diag.is_zero());
            for j in 0..n {
                if work[i][n + j].is_zero() {
                    continue;
                }
                inv[(i, j)] = Rational::new(work[i][n + j].clone(), diag.clone());
            }
        }
        Ok(inv)
    }
}

impl Matrix<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse with partial pivoting. Pivots below a
    /// scale-relative threshold are reported as singular.
    pub fn float_inverse(&self) -> Result<Self, SingularMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let threshold = 1e-12 * self.max_abs().max(1.0);
        let mut work = vec![vec![0.0f64; 2 * n]; n];
        for i in 0..n {
            for j in 0..n {
                work[i][j] = self[(i, j)];
            }
            work[i][n + i] = 1.0;
        }
        for k in 0..n {
            let (r, pivot) = (k..n)
                .map(|r| (r, work[r][k].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pivot <= threshold {
                return Err(SingularMatrix { pivot_row: k });
            }
            work.swap(k, r);
            let inv_pivot = 1.0 / work[k][k];
            for entry in &mut work[k] {
                *entry *= inv_pivot;
            }
            let pivot_row = work[k].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i == k || row[k] == 0.0 {
                    continue;
                }
                let factor = row[k];
                for (slot, pivot_entry) in row.iter_mut().zip(&pivot_row) {
                    *slot -= factor * pivot_entry;
                }
            }
        }
        Ok(Self::from_fn(n, n, |i, j| work[i][n + j]))
    }

    /// Largest eigenvalue modulus, computed from the full (real Schur)
    /// eigendecomposition rather than power iteration so that complex and
    /// repeated peripheral spectra are handled uniformly.
    ///
    /// The decomposition runs on `A + c·I` and the shift is subtracted from
    /// every eigenvalue afterwards: the QR deflation test is relative to the
    /// diagonal, which for the nilpotent operators showing up here is zero,
    /// and the shift keeps it well scaled.
    pub fn spectral_radius(&self) -> Result<f64, SpectralFailure> {
        assert!(self.is_square());
        if self.rows == 0 {
            return Ok(0.0);
        }
        const MAX_ITERATIONS: usize = 50_000;
        let shift = self.norm_inf() + 1.0;
        let m = nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] + if i == j { shift } else { 0.0 }
        });
        let schur = [1e-13, 1e-11]
            .iter()
            .find_map(|&eps| nalgebra::linalg::Schur::try_new(m.clone(), eps, MAX_ITERATIONS))
            .ok_or(SpectralFailure {
                max_iterations: MAX_ITERATIONS,
            })?;
        Ok(schur
            .complex_eigenvalues()
            .iter()
            .map(|z| nalgebra::Complex::new(z.re - shift, z.im).norm())
            .fold(0.0, f64::max))
    }
}

/// Scalar rings that support matrix inversion, used by code generic over the
/// exact and float modes.
pub trait MatrixInverse: Scalar {
    fn inverse(matrix: &Matrix<Self>) -> Result<Matrix<Self>, SingularMatrix>;
}

impl MatrixInverse for Rational {
    fn inverse(matrix: &Matrix<Self>) -> Result<Matrix<Self>, SingularMatrix> {
        matrix.exact_inverse()
    }
}

impl MatrixInverse for f64 {
    fn inverse(matrix: &Matrix<Self>) -> Result<Matrix<Self>, SingularMatrix> {
        matrix.float_inverse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;
    use proptest::prelude::*;

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn small_matrix(dim: usize) -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec(small_rational(), dim * dim).prop_map(move |data| {
            let mut m = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] = data[i * dim + j].clone();
                }
            }
            m
        })
    }

    #[test]
    fn kron_identities() {
        let i2 = Matrix::<Rational>::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));
        let a = Matrix::<Rational>::zeros(4, 4);
        let b = Matrix::<Rational>::zeros(2, 2);
        assert_eq!(a.kron(&b).rows(), 8);
        let mut e00 = Matrix::<Rational>::zeros(2, 2);
        e00[(0, 0)] = rat(1, 1);
        let k = e00.kron(&e00);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (0, 0) { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(k[(i, j)], expect);
            }
        }
    }

    #[test]
    fn exact_inverse_simple_cases() {
        let i = Matrix::<Rational>::identity(3);
        assert_eq!(i.exact_inverse().unwrap(), i);
        let two_i = i.scale(&rat(2, 1));
        assert_eq!(two_i.exact_inverse().unwrap(), i.scale(&rat(1, 2)));
        // dim-1 case: inverse of 1 - 1/4.
        let m = Matrix::from_rows(vec![vec![rat(3, 4)]]);
        assert_eq!(m.exact_inverse().unwrap()[(0, 0)], rat(4, 3));
    }

    #[test]
    fn exact_inverse_reports_pivot_row() {
        let mut m = Matrix::<Rational>::zeros(3, 3);
        m[(0, 0)] = rat(1, 1);
        m[(1, 1)] = rat(1, 1);
        // third row/column identically zero
        let err = m.exact_inverse().unwrap_err();
        assert_eq!(err.pivot_row, 2);
    }

    #[test]
    fn float_inverse_roundtrip() {
        let m = Matrix::<f64>::from_rows(vec![
            vec![2.0, 1.0, 0.0],
            vec![0.5, -1.0, 3.0],
            vec![0.0, 4.0, 1.0],
        ]);
        let inv = m.float_inverse().unwrap();
        let prod = m.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_radius_basics() {
        assert!((Matrix::<f64>::identity(5).spectral_radius().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(Matrix::<f64>::zeros(4, 4).spectral_radius().unwrap(), 0.0);
        // rotation block has complex eigenvalues of modulus 1
        let rot = Matrix::<f64>::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        assert!((rot.spectral_radius().unwrap() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn kron_is_associative(a in small_matrix(2), b in small_matrix(2), c in small_matrix(2)) {
            prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        }

        #[test]
        fn kron_entries_factor(a in small_matrix(2), b in small_matrix(3)) {
            let k = a.kron(&b);
            for r1 in 0..2 { for c1 in 0..2 { for r2 in 0..3 { for c2 in 0..3 {
                let expect = a[(r1, c1)].clone() * b[(r2, c2)].clone();
                prop_assert_eq!(&k[(r1 * 3 + r2, c1 * 3 + c2)], &expect);
            }}}}
        }

        #[test]
        fn exact_inverse_roundtrips(m in small_matrix(4)) {
            match m.exact_inverse() {
                Ok(inv) => {
                    prop_assert!(m.mul(&inv).is_identity());
                    prop_assert!(inv.mul(&m).is_identity());
                }
                Err(_) => {
                    // singular matrices stay singular under transposition
                    prop_assert!(m.transpose().exact_inverse().is_err());
                }
            }
        }

        #[test]
        fn spectral_radius_matches_diagonal(entries in proptest::collection::vec(-10.0f64..10.0, 5)) {
            let mut m = Matrix::<f64>::zeros(5, 5);
            let mut expect = 0.0f64;
            for (i, &x) in entries.iter().enumerate() {
                m[(i, i)] = x;
                expect = expect.max(x.abs());
            }
            let rho = m.spectral_radius().unwrap();
            prop_assert!((rho - expect).abs() < 1e-10);
        }
    }
}
