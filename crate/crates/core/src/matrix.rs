//! Small dense complex matrices: products, inverses, determinants and the
//! matrix exponential.

use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{GwtError, Result};
use crate::math;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Largest dimension the dense routines accept.
pub const DENSE_LIMIT: usize = 2000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: alloc::vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != c) {
            return Err(GwtError::DimensionMismatch(r.len(), c));
        }
        Ok(Self::from_fn(n, c, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|x| Complex64::new(*x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
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

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn real_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| Complex64::new(self[(i, j)].re, 0.0))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_same_shape(&self, other: &CMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(GwtError::DimensionMismatch(self.rows * self.cols, other.rows * other.cols));
        }
        Ok(())
    }

    /// Product skipping zero entries of the left factor; cheap whenever the
    /// left operand is sparse.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(GwtError::DimensionMismatch(self.cols, other.rows));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        let oc = other.cols;
        for i in 0..self.rows {
            let row = &mut out.data[i * oc..(i + 1) * oc];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * oc..(k + 1) * oc];
                for (r, b) in row.iter_mut().zip(brow) {
                    if *b != ZERO {
                        *r += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// LU decomposition with partial pivoting; returns `(lu, perm, sign)`.
    fn lu(&self) -> Result<(CMatrix, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(GwtError::DimensionMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
                .expect("non-empty range");
            if a[(p, k)].norm() == 0.0 {
                return Err(GwtError::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
            }
        }
        Ok((a, perm, sign))
    }

    pub fn det(&self) -> Result<Complex64> {
        match self.lu() {
            Ok((lu, _, sign)) => Ok((0..self.rows).fold(Complex64::new(sign, 0.0), |acc, i| acc * lu[(i, i)])),
            Err(GwtError::Singular) => Ok(ZERO),
            Err(e) => Err(e),
        }
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        let (lu, perm, _) = self.lu()?;
        let n = self.rows;
        let mut inv = CMatrix::zeros(n, n);
        for col in 0..n {
            let mut x: Vec<Complex64> = (0..n).map(|i| if perm[i] == col { ONE } else { ZERO }).collect();
            for i in 0..n {
                for k in 0..i {
                    let l = lu[(i, k)];
                    x[i] = x[i] - l * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let u = lu[(i, k)];
                    x[i] = x[i] - u * x[k];
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Ok(inv)
    }

    /// Whether the Hermitian part is positive definite (Cholesky succeeds).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let h = CMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = h[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let d = math::sqrt(d);
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = h[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        true
    }
}

/// `e^M` by Taylor scaling and squaring.
///
/// The matrix is scaled by `2^-s` until its 1-norm is at most ½, the Taylor
/// series is summed until the terms drop below machine precision relative to
/// the partial sum, and the result is squared `s` times.
pub fn matexp(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(GwtError::DimensionMismatch(m.rows, m.cols));
    }
    if m.rows > DENSE_LIMIT {
        return Err(GwtError::DimensionTooLarge(m.rows));
    }
    let norm = m.norm1();
    let mut s = 0u32;
    while norm / f64::from(1u32 << s.min(30)) > 0.5 && s < 60 {
        s += 1;
    }
    let scaled = m.scale(Complex64::new(math::powi(0.5, s as i32), 0.0));
    let mut sum = CMatrix::identity(m.rows);
    let mut term = CMatrix::identity(m.rows);
    for k in 1..=60u32 {
        term = scaled.matmul(&term)?.scale(Complex64::new(1.0 / f64::from(k), 0.0));
        sum = &sum + &term;
        if term.max_abs() <= 1e-18 * sum.max_abs().max(1.0) {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        assert_eq!(matexp(&CMatrix::zeros(3, 3)).unwrap(), CMatrix::identity(3));
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)]);
        let e = matexp(&d).unwrap();
        let want = CMatrix::diagonal(&[c(1.0f64.exp(), 0.0), c((-2.0f64).exp(), 0.0), c(0.0, 3.0).exp()]);
        assert!(e.max_abs_diff(&want).unwrap() < 1e-13);
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t = 7.5;
        let m = CMatrix::from_rows(&[alloc::vec![c(0.0, 0.0), c(-t, 0.0)], alloc::vec![c(t, 0.0), c(0.0, 0.0)]]).unwrap();
        let e = matexp(&m).unwrap();
        let want = CMatrix::from_rows(&[
            alloc::vec![c(t.cos(), 0.0), c(-t.sin(), 0.0)],
            alloc::vec![c(t.sin(), 0.0), c(t.cos(), 0.0)],
        ])
        .unwrap();
        assert!(e.max_abs_diff(&want).unwrap() < 1e-13);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = CMatrix::from_rows(&[
            alloc::vec![c(2.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)],
            alloc::vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)],
            alloc::vec![c(1.0, 0.0), c(3.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&CMatrix::identity(3)).unwrap() < 1e-14);
        // expanded by hand along the first row
        let want = c(2.0, 1.0) * (c(0.0, 0.0) - c(0.0, -3.0)) + c(1.0, 0.0) * (c(0.0, 0.0) - c(1.0, 0.0));
        assert!((m.det().unwrap() - want).norm() < 1e-14);
        assert_eq!(CMatrix::zeros(2, 2).det().unwrap(), ZERO);
        assert_eq!(CMatrix::zeros(2, 2).inverse(), Err(GwtError::Singular));
    }

    #[test]
    fn definiteness() {
        let p = CMatrix::from_real_rows(&[alloc::vec![2.0, 1.0], alloc::vec![1.0, 2.0]]).unwrap();
        assert!(p.is_positive_definite());
        assert!(!p.scale(c(-1.0, 0.0)).is_positive_definite());
        let indefinite = CMatrix::from_real_rows(&[alloc::vec![1.0, 0.0], alloc::vec![0.0, -1.0]]).unwrap();
        assert!(!indefinite.is_positive_definite());
    }

    #[test]
    fn too_large_is_rejected() {
        assert_eq!(matexp(&CMatrix::zeros(DENSE_LIMIT + 1, DENSE_LIMIT + 1)), Err(GwtError::DimensionTooLarge(2001)));
    }
}
