//! Small dense linear algebra: just enough for kernel determinants and
//! spectra of the antisymmetric matrices produced by this crate.

use crate::error::{Error, Result};
use crate::rng::NoiseStream;
use crate::scalar::{cast, Real};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    /// Zero matrix of the given shape. Panics on a zero dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share one length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::invalid("matrix must have at least one row and column"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("rows have inconsistent lengths"));
        }
        Ok(Mat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
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

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product. Panics on a shape mismatch.
    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Leading principal `m x m` submatrix. Panics if `m` is out of range.
    pub fn leading_minor(&self, m: usize) -> Mat<T> {
        assert!(m >= 1 && m <= self.rows.min(self.cols), "minor order out of range");
        Mat::from_fn(m, m, |i, j| self[(i, j)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T> core::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> core::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by LU factorization with partial pivoting.
///
/// An exactly singular matrix yields 0. Panics if the matrix is not square
/// (shape is a programming error, not a data condition).
pub fn det_lu<T: Real>(m: &Mat<T>) -> T {
    assert!(m.is_square(), "determinant requires a square matrix");
    let n = m.rows();
    let mut a = m.data.clone();
    let mut det = T::one();
    for k in 0..n {
        // Partial pivot: largest magnitude in column k at or below the diagonal.
        let mut piv = k;
        let mut piv_abs = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > piv_abs {
                piv = i;
                piv_abs = v;
            }
        }
        if piv_abs == T::zero() {
            return T::zero();
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            if factor == T::zero() {
                continue;
            }
            for j in (k + 1)..n {
                let upd = a[k * n + j] * factor;
                a[i * n + j] -= upd;
            }
        }
    }
    det
}

/// Singular values by one-sided Jacobi orthogonalization, sorted descending.
///
/// Works on any matrix with `rows >= cols`; this crate only needs small
/// square inputs. Errors on non-finite entries.
pub fn jacobi_singular_values<T: Real>(m: &Mat<T>) -> Result<Vec<T>> {
    if !m.all_finite() {
        return Err(Error::numeric("singular values of a matrix with non-finite entries"));
    }
    if m.rows() < m.cols() {
        return Err(Error::invalid("one-sided Jacobi needs rows >= cols"));
    }
    let rows = m.rows();
    let n = m.cols();
    let mut a = m.clone();
    let tol = T::epsilon() * cast::<T>(8.0);
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = T::zero();
                for i in 0..rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() || app == T::zero() || aqq == T::zero() {
                    continue;
                }
                rotated = true;
                // Rutishauser rotation annihilating the (p, q) column inner product.
                let zeta = (aqq - app) / (cast::<T>(2.0) * apq);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = c * x - s * y;
                    a[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<T> = (0..n)
        .map(|j| {
            let mut sum = T::zero();
            for i in 0..rows {
                sum += a[(i, j)] * a[(i, j)];
            }
            sum.sqrt()
        })
        .collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    Ok(sigma)
}

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix with
/// the positive-diagonal sign convention, via modified Gram-Schmidt).
pub fn haar_orthogonal(dim: usize, stream: &mut NoiseStream) -> Mat<f64> {
    assert!(dim > 0, "dimension must be positive");
    loop {
        let g = Mat::from_fn(dim, dim, |_, _| stream.gaussian());
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
        // Resample on numerical rank deficiency (probability zero in theory).
    }
}

fn gram_schmidt(g: &Mat<f64>) -> Option<Mat<f64>> {
    let n = g.rows();
    let mut q = g.clone();
    for j in 0..n {
        // Two orthogonalization passes for stability.
        for _ in 0..2 {
            for prev in 0..j {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += q[(i, prev)] * q[(i, j)];
                }
                for i in 0..n {
                    let upd = dot * q[(i, prev)];
                    q[(i, j)] -= upd;
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += q[(i, j)] * q[(i, j)];
        }
        let norm = norm.sqrt();
        if norm < 1e-12 {
            return None;
        }
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Exact rational 3x3 determinant by cofactor expansion, used as an
    /// independent oracle for `det_lu`.
    fn det3_rational(num: [[i128; 3]; 3], den: [[i128; 3]; 3]) -> (i128, i128) {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        fn mul(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
            norm((a.0 * b.0, a.1 * b.1))
        }
        fn sub(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
            norm((a.0 * b.1 - b.0 * a.1, a.1 * b.1))
        }
        fn norm(a: (i128, i128)) -> (i128, i128) {
            let g = gcd(a.0, a.1).max(1);
            let s = if a.1 < 0 { -1 } else { 1 };
            (s * a.0 / g, s * a.1 / g)
        }
        let e = |i: usize, j: usize| norm((num[i][j], den[i][j]));
        let m = |i: usize, j: usize, k: usize, l: usize| sub(mul(e(i, j), e(k, l)), mul(e(i, l), e(k, j)));
        let t1 = mul(e(0, 0), m(1, 1, 2, 2));
        let t2 = mul(e(0, 1), m(1, 0, 2, 2));
        let t3 = mul(e(0, 2), m(1, 0, 2, 1));
        sub(sub(t1, t2), sub((0, 1), t3))
    }

    #[test]
    fn det_of_identity_and_2x2() {
        assert_eq!(det_lu(&Mat::<f64>::identity(4)), 1.0);
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_abs_diff_eq!(det_lu(&m), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn det_singular_is_zero() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_abs_diff_eq!(det_lu(&m), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn det_hilbert_3_matches_exact_rational_oracle() {
        // Hilbert entries 1/(i+j-1); the oracle works in exact fractions.
        let num = [[1, 1, 1], [1, 1, 1], [1, 1, 1]];
        let den = [[1, 2, 3], [2, 3, 4], [3, 4, 5]];
        let (p, q) = det3_rational(num, den);
        assert_eq!((p, q), (1, 2160));
        let h = Mat::from_fn(3, 3, |i, j| 1.0 / ((i + j + 1) as f64));
        assert_abs_diff_eq!(det_lu(&h), 1.0 / 2160.0, epsilon = 1e-15);
    }

    #[test]
    fn det_permutation_sign() {
        // Row swap of the identity flips the sign.
        let m = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(det_lu(&m), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_known_singular_values() {
        // A = [[3, 0], [4, 5]]: A^T A has eigenvalues 45 and 5.
        let a = Mat::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let s = jacobi_singular_values(&a).unwrap();
        assert_abs_diff_eq!(s[0], 45.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 5.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn jacobi_rotation_generator() {
        let j = Mat::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let s = jacobi_singular_values(&j).unwrap();
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_rank_deficient() {
        let a = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let s = jacobi_singular_values(&a).unwrap();
        assert_abs_diff_eq!(s[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_rejects_non_finite() {
        let a = Mat::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(jacobi_singular_values(&a).is_err());
    }

    #[test]
    fn jacobi_f32_works() {
        let a = Mat::from_rows(&[vec![3.0f32, 0.0], vec![4.0, 5.0]]).unwrap();
        let s = jacobi_singular_values(&a).unwrap();
        assert!((s[0] - 45.0f32.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn haar_matrix_is_orthogonal() {
        let mut stream = crate::rng::NoiseStream::new(11, 0);
        for dim in [2usize, 3, 5] {
            let q = haar_orthogonal(dim, &mut stream);
            let qtq = q.transpose().matmul(&q);
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(qtq[(i, j)], expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn matmul_and_minor() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let i2 = Mat::identity(2);
        assert_eq!(a.matmul(&i2), a);
        let m = Mat::from_fn(3, 3, |i, j| (3 * i + j) as f64);
        let top = m.leading_minor(2);
        assert_eq!(top[(1, 1)], 4.0);
    }
}
