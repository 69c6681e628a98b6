//! Sums of rank-two antisymmetric Gaussian increments and their spectra.
//!
//! One increment is `A = Y J Y^T` where `Y` is a `(dim x 2)` standard
//! Gaussian matrix and `J = [[0, 1], [-1, 0]]`, i.e.
//! `A[a][b] = y1[a] y2[b] - y2[a] y1[b]`. The process is the running sum of
//! independent increments. An antisymmetric real matrix has purely
//! imaginary eigenvalue pairs `+-(i sigma_j)`; the ordered positive parts
//! `sigma_1 >= sigma_2 >= ... >= 0` are the spectral observable, extracted
//! here from singular values (each `sigma_j` shows up twice, plus one zero
//! when the dimension is odd).
//!
//! Leading principal minors of an antisymmetric matrix are antisymmetric,
//! and their top spectral values are nondecreasing in the minor size by
//! eigenvalue interlacing; [`AntisymMatrix::minor_top_eigenvalues`]
//! exposes that observable.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_singular_values, Mat};
use crate::rng::NoiseStream;
use crate::scalar::{cast, Real};

/// Antisymmetric square matrix, storing the strict upper triangle row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymMatrix<T> {
    dim: usize,
    upper: Vec<T>,
}

impl<T: Real> AntisymMatrix<T> {
    /// Zero matrix of side `dim >= 2`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 2, "antisymmetric matrices here have dim >= 2");
        Self { dim, upper: vec![T::zero(); dim * (dim - 1) / 2] }
    }

    /// Builds from the strict upper triangle, row-major
    /// (`(0,1), (0,2), ..., (0,d-1), (1,2), ...`).
    pub fn from_upper(dim: usize, upper: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("antisymmetric matrices here have dim >= 2"));
        }
        if upper.len() != dim * (dim - 1) / 2 {
            return Err(Error::invalid(format!(
                "dim {dim} needs {} upper entries, got {}",
                dim * (dim - 1) / 2,
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self { dim, upper })
    }

    /// Matrix side length.
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.dim);
        i * self.dim - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Entry `(i, j)`, reconstructing the sign from the upper triangle.
    pub fn get(&self, i: usize, j: usize) -> T {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        use core::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => T::zero(),
            Less => self.upper[self.upper_index(i, j)],
            Greater => -self.upper[self.upper_index(j, i)],
        }
    }

    /// Dense copy.
    pub fn to_dense(&self) -> Mat<T> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Adds another matrix of the same dimension in place.
    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.upper.iter_mut().zip(rhs.upper.iter()) {
            *a += *b;
        }
    }

    /// Frobenius norm (`sqrt(2 sum upper^2)`).
    pub fn frobenius_norm(&self) -> T {
        let two = cast::<T>(2.0);
        (two * self.upper.iter().map(|x| *x * *x).sum::<T>()).sqrt()
    }

    /// Leading principal `m x m` minor (`2 <= m <= dim`).
    pub fn leading_minor(&self, m: usize) -> Self {
        assert!((2..=self.dim).contains(&m), "minor size out of range");
        let mut upper = Vec::with_capacity(m * (m - 1) / 2);
        for i in 0..m {
            for j in (i + 1)..m {
                upper.push(self.upper[self.upper_index(i, j)]);
            }
        }
        Self { dim: m, upper }
    }

    /// All singular values, nonincreasing. For an antisymmetric matrix they
    /// come in equal pairs, plus a zero when `dim` is odd.
    pub fn singular_values(&self) -> Result<Vec<T>> {
        jacobi_singular_values(&self.to_dense())
    }

    /// The ordered positive spectral parts `sigma_1 >= ... >= sigma_p >= 0`,
    /// `p = floor(dim / 2)`: every other singular value.
    pub fn positive_eigenvalues(&self) -> Result<SpectralPoint<T>> {
        let s = self.singular_values()?;
        let coords = (0..self.dim / 2).map(|j| s[2 * j]).collect();
        SpectralPoint::new(coords)
    }

    /// Full eigenvalue list of `i * A` in nonincreasing order:
    /// `sigma_1, ..., sigma_p, (0 if dim odd,) -sigma_p, ..., -sigma_1`.
    pub fn spectrum(&self) -> Result<Vec<T>> {
        let pos = self.positive_eigenvalues()?;
        let mut out: Vec<T> = pos.coords().to_vec();
        if self.dim % 2 == 1 {
            out.push(T::zero());
        }
        for j in (0..self.dim / 2).rev() {
            out.push(-pos.coords()[j]);
        }
        Ok(out)
    }

    /// Top spectral value of each leading principal minor, for minor sizes
    /// `2, 3, ..., dim`. Nondecreasing by eigenvalue interlacing.
    pub fn minor_top_eigenvalues(&self) -> Result<Vec<T>> {
        (2..=self.dim)
            .map(|m| Ok(self.leading_minor(m).singular_values()?[0]))
            .collect()
    }

    /// Canonical antisymmetric matrix with prescribed positive spectral
    /// parts: `2 x 2` blocks `[[0, s], [-s, 0]]` down the diagonal, plus a
    /// zero row/column when `dim` is odd. `sigma` must be nonincreasing and
    /// nonnegative with `floor(dim / 2)` entries.
    pub fn from_spectrum(dim: usize, sigma: &[T]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("antisymmetric matrices here have dim >= 2"));
        }
        if sigma.len() != dim / 2 {
            return Err(Error::invalid(format!(
                "dim {dim} needs {} spectral parts, got {}",
                dim / 2,
                sigma.len()
            )));
        }
        if sigma.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::domain("spectral parts must be finite and >= 0"));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("spectral parts must be nonincreasing"));
        }
        let mut out = Self::zeros(dim);
        for (j, s) in sigma.iter().enumerate() {
            let idx = out.upper_index(2 * j, 2 * j + 1);
            out.upper[idx] = *s;
        }
        Ok(out)
    }

    /// Orthogonal conjugation `Q A Q^T`, re-antisymmetrized to absorb
    /// floating-point asymmetry. `q` must be `dim x dim`.
    pub fn conjugate(&self, q: &Mat<T>) -> Result<Self> {
        if q.rows() != self.dim || q.cols() != self.dim {
            return Err(Error::invalid("conjugation needs a dim x dim matrix"));
        }
        let b = q.matmul(&self.to_dense()).matmul(&q.transpose());
        let half = cast::<T>(0.5);
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                upper.push(half * (b[(i, j)] - b[(j, i)]));
            }
        }
        Ok(Self { dim: self.dim, upper })
    }
}

/// Nonincreasing nonnegative spectral coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint<T> {
    coords: Vec<T>,
}

impl<T: Real> SpectralPoint<T> {
    /// Wraps coordinates, validating order and nonnegativity.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a spectral point needs at least one coordinate"));
        }
        if coords.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::domain("spectral coordinates must be finite and >= 0"));
        }
        if coords.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("spectral coordinates must be nonincreasing"));
        }
        Ok(Self { coords })
    }

    /// Coordinates, largest first.
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    /// Always false; spectral points are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Consumes into the coordinate vector.
    pub fn into_inner(self) -> Vec<T> {
        self.coords
    }
}

/// Rank-two antisymmetric matrix `A[a][b] = y1[a] y2[b] - y2[a] y1[b]`
/// built from two column vectors of equal length `>= 2`.
pub fn increment_from_columns<T: Real>(y1: &[T], y2: &[T]) -> Result<AntisymMatrix<T>> {
    if y1.len() != y2.len() || y1.len() < 2 {
        return Err(Error::invalid("increment needs two equal-length columns of dim >= 2"));
    }
    if y1.iter().chain(y2.iter()).any(|x| !x.is_finite()) {
        return Err(Error::domain("column entries must be finite"));
    }
    let dim = y1.len();
    let mut upper = Vec::with_capacity(dim * (dim - 1) / 2);
    for a in 0..dim {
        for b in (a + 1)..dim {
            upper.push(y1[a] * y2[b] - y2[a] * y1[b]);
        }
    }
    Ok(AntisymMatrix { dim, upper })
}

/// Samples one Gaussian rank-two increment of side `dim`, drawing the two
/// column entries row by row (`y1[0], y2[0], y1[1], y2[1], ...`).
pub fn sample_increment(dim: usize, stream: &mut NoiseStream) -> AntisymMatrix<f64> {
    assert!(dim >= 2, "antisymmetric matrices here have dim >= 2");
    let mut y1 = Vec::with_capacity(dim);
    let mut y2 = Vec::with_capacity(dim);
    for _ in 0..dim {
        y1.push(stream.gaussian());
        y2.push(stream.gaussian());
    }
    increment_from_columns(&y1, &y2).expect("sampled columns are valid")
}

/// Runs the cumulative-increment process for `k` particles (matrices of
/// side `k + 1`) over `n` steps, returning the `n + 1` partial sums
/// starting from the zero matrix. Deterministic in the stream.
pub fn run_process(k: usize, n: usize, stream: &NoiseStream) -> Vec<AntisymMatrix<f64>> {
    assert!(k >= 1, "particle count k must be >= 1");
    let mut local = stream.clone();
    let dim = k + 1;
    let mut states = Vec::with_capacity(n + 1);
    states.push(AntisymMatrix::<f64>::zeros(dim));
    for _ in 0..n {
        let mut next = states.last().expect("nonempty").clone();
        next.add_assign(&sample_increment(dim, &mut local));
        states.push(next);
    }
    states
}

/// Slow reference computation of the distinct positive spectral parts via
/// the characteristic polynomial of `B = -A^2` (symmetric positive
/// semidefinite with each `sigma_j^2` a double eigenvalue): Newton's
/// identities on the halved power sums `tr(B^m) / 2` give the monic
/// polynomial with simple roots `sigma_j^2`, which is then root-isolated by
/// scanning and bisection. Completely independent of the Jacobi
/// singular-value path; used to cross-check it. Requires the positive
/// parts to be distinct (almost sure for random matrices).
pub fn reference_positive_eigenvalues(a: &AntisymMatrix<f64>) -> Result<Vec<f64>> {
    let dim = a.dim();
    let p = dim / 2;
    let dense = a.to_dense();
    let mut b = dense.matmul(&dense);
    for i in 0..dim {
        for j in 0..dim {
            b[(i, j)] = -b[(i, j)];
        }
    }
    // Halved power sums q_m = tr(B^m) / 2 = sum_j (sigma_j^2)^m.
    let mut q = Vec::with_capacity(p);
    let mut power = b.clone();
    for _ in 0..p {
        let tr: f64 = (0..dim).map(|i| power[(i, i)]).sum();
        q.push(tr / 2.0);
        power = power.matmul(&b);
    }
    // Newton's identities: e_m = (1/m) sum_{i=1..m} (-1)^(i-1) e_(m-i) q_i.
    let mut e = vec![0.0f64; p + 1];
    e[0] = 1.0;
    for m in 1..=p {
        let mut acc = 0.0;
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[m - i] * q[i - 1];
        }
        e[m] = acc / m as f64;
    }
    // S(w) = sum_{i=0..p} (-1)^i e_i w^(p-i), monic with roots sigma_j^2,
    // evaluated by Horner from the highest power down.
    let s_poly = move |w: f64| -> f64 {
        let mut acc = 0.0;
        for (i, ei) in e.iter().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc * w + sign * ei;
        }
        acc
    };
    // All roots lie in [0, q_1] (the top root touches q_1 when p = 1, so
    // pad the scan window on both sides); bisect each sign change.
    let hi = q[0].max(0.0) * 1.000001 + 1e-12;
    let n_scan = 4000usize;
    let mut roots = Vec::with_capacity(p);
    let lo_pad = -(1e-12_f64.max(1e-14 * hi));
    let step = (hi - lo_pad) / n_scan as f64;
    let mut prev_w = lo_pad;
    let mut prev_v = s_poly(prev_w);
    for i in 1..=n_scan {
        let w = lo_pad + step * i as f64;
        let v = s_poly(w);
        if prev_v == 0.0 {
            roots.push(prev_w);
        } else if prev_v * v < 0.0 {
            let (mut a_lo, mut a_hi) = (prev_w, w);
            let mut f_lo = prev_v;
            for _ in 0..100 {
                let mid = 0.5 * (a_lo + a_hi);
                let f_mid = s_poly(mid);
                if f_lo * f_mid <= 0.0 {
                    a_hi = mid;
                } else {
                    a_lo = mid;
                    f_lo = f_mid;
                }
            }
            roots.push(0.5 * (a_lo + a_hi));
        }
        prev_w = w;
        prev_v = v;
    }
    if roots.len() != p {
        return Err(Error::numeric(format!(
            "root isolation found {} of {p} spectral parts (degenerate spectrum?)",
            roots.len()
        )));
    }
    let mut sig: Vec<f64> = roots.into_iter().map(|w| w.max(0.0).sqrt()).collect();
    sig.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(sig)
}
