//! Interlaced triangular arrays over the positive spectral chamber, and
//! samplers for the uniform distribution on the interlacing polytope.
//!
//! A pattern for `k` particles is a stack of rows `x^(2), ..., x^(k+1)`
//! where row `m` has `floor(m / 2)` nonincreasing nonnegative entries and
//! consecutive rows interlace:
//!
//! ```text
//! x^(m+1)_j  >=  x^(m)_j  >=  x^(m+1)_(j+1)   (last term when it exists)
//! ```
//!
//! This is exactly the constraint satisfied by the positive spectral parts
//! of the nested leading minors of an antisymmetric matrix. For a fixed top
//! row the patterns form a convex polytope whose Euclidean volume equals
//! the weight [`crate::kernels::d_func`] of the top row; the uniform
//! distribution on that polytope is the dispersal kernel that links the
//! spectral process to the particle process (project a uniform pattern to
//! its row maxima and you get a particle configuration).

use crate::error::{Error, Result};
use crate::kernels::d_func;
use crate::rng::NoiseStream;
use crate::scalar::Real;

/// Interlaced triangular array; `rows[i]` is row `m = i + 2`, the last row
/// is the (fixed) top row.
#[derive(Debug, Clone, PartialEq)]
pub struct GtPattern<T> {
    rows: Vec<Vec<T>>,
}

/// Expected length of pattern row `m` (2-based).
#[inline]
fn row_len(m: usize) -> usize {
    m / 2
}

impl<T: Real> GtPattern<T> {
    /// Wraps a row stack, validating shapes, signs, and interlacing.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("a pattern needs at least one row"));
        }
        for (i, row) in rows.iter().enumerate() {
            let m = i + 2;
            if row.len() != row_len(m) {
                return Err(Error::invalid(format!(
                    "row {m} needs {} entries, got {}",
                    row_len(m),
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite() || *x < T::zero()) {
                return Err(Error::domain("pattern entries must be finite and >= 0"));
            }
        }
        let top = rows.last().expect("nonempty");
        if top.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("top row must be nonincreasing"));
        }
        let pattern = Self { rows };
        if !pattern.is_interlaced() {
            return Err(Error::domain("rows must interlace"));
        }
        Ok(pattern)
    }

    /// Number of particles `k` (also the number of rows).
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// All rows, bottom (`x^(2)`) first.
    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Row `x^(m)` for `2 <= m <= k + 1`.
    pub fn row(&self, m: usize) -> &[T] {
        assert!((2..=self.k() + 1).contains(&m), "row index out of range");
        &self.rows[m - 2]
    }

    /// The fixed top row `x^(k+1)`.
    pub fn top(&self) -> &[T] {
        self.rows.last().expect("nonempty")
    }

    /// Checks the nonstrict interlacing constraints between all consecutive
    /// rows (within-row ordering follows from them).
    pub fn is_interlaced(&self) -> bool {
        for w in self.rows.windows(2) {
            let (v, u) = (&w[0], &w[1]);
            for j in 0..v.len() {
                if v[j] > u[j] {
                    return false;
                }
                if j + 1 < u.len() && v[j] < u[j + 1] {
                    return false;
                }
            }
        }
        true
    }

    /// Projects to a particle configuration: the largest entry of each row,
    /// bottom row first. Nondecreasing by interlacing.
    pub fn project(&self) -> Vec<T> {
        self.rows.iter().map(|r| r[0]).collect()
    }
}

fn validate_strict_top<T: Real>(k: usize, lambda: &[T]) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("particle count k must be >= 1"));
    }
    let p = row_len(k + 1);
    if lambda.len() != p {
        return Err(Error::invalid(format!(
            "top row for k={k} needs {p} entries, got {}",
            lambda.len()
        )));
    }
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("top row entries must be finite"));
    }
    for w in lambda.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::domain("top row must be strictly decreasing"));
        }
    }
    if lambda[p - 1] <= T::zero() {
        return Err(Error::domain("top row entries must be strictly positive"));
    }
    Ok(())
}

/// Midpoint-filled strictly interlaced pattern under the given top row.
fn midpoint_init(k: usize, lambda: &[f64]) -> GtPattern<f64> {
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); k];
    rows[k - 1] = lambda.to_vec();
    for r in (0..k.saturating_sub(1)).rev() {
        let m = r + 2;
        let above = rows[r + 1].clone();
        let row: Vec<f64> = (0..row_len(m))
            .map(|j| {
                let lo = if j + 1 < above.len() { above[j + 1] } else { 0.0 };
                0.5 * (above[j] + lo)
            })
            .collect();
        rows[r] = row;
    }
    GtPattern { rows }
}

/// Gibbs bounds for coordinate `j` of row `m`: the interval cut out by the
/// row above (always present) and the row below (absent for `m = 2`).
fn coordinate_bounds(rows: &[Vec<f64>], m: usize, j: usize) -> (f64, f64) {
    let above = &rows[m - 1]; // row m + 1
    let below = if m >= 3 { Some(&rows[m - 3]) } else { None }; // row m - 1
    let mut hi = above[j];
    let mut lo = 0.0f64;
    if j + 1 < above.len() {
        lo = lo.max(above[j + 1]);
    }
    if let Some(b) = below {
        if j >= 1 && j - 1 < b.len() {
            hi = hi.min(b[j - 1]);
        }
        if j < b.len() {
            lo = lo.max(b[j]);
        }
    }
    (lo, hi)
}

/// Samples the uniform distribution on the interlacing polytope with fixed
/// strictly-decreasing positive top row, by systematic-scan Gibbs sampling
/// from a midpoint initialization. `sweeps` full passes are performed; each
/// pass resamples every free coordinate once, bottom row first.
pub fn sample_uniform(
    k: usize,
    lambda: &[f64],
    sweeps: usize,
    stream: &mut NoiseStream,
) -> Result<GtPattern<f64>> {
    validate_strict_top(k, lambda)?;
    let mut pattern = midpoint_init(k, lambda);
    for _ in 0..sweeps {
        for m in 2..=k {
            for j in 0..row_len(m) {
                let (lo, hi) = coordinate_bounds(&pattern.rows, m, j);
                let u = stream.uniform();
                pattern.rows[m - 2][j] = lo + (hi - lo) * u;
            }
        }
    }
    Ok(pattern)
}

/// Samples the dispersal kernel at a spectral point: uniform on the
/// interlacing polytope, with the boundary case of an all-zero top row
/// mapped to the single all-zero pattern (the polytope degenerates to a
/// point there).
pub fn sample_l_kernel(
    k: usize,
    lambda: &[f64],
    sweeps: usize,
    stream: &mut NoiseStream,
) -> Result<GtPattern<f64>> {
    if k == 0 {
        return Err(Error::invalid("particle count k must be >= 1"));
    }
    let p = row_len(k + 1);
    if lambda.len() == p && lambda.iter().all(|x| *x == 0.0) {
        let rows = (0..k).map(|r| vec![0.0; row_len(r + 2)]).collect();
        return Ok(GtPattern { rows });
    }
    sample_uniform(k, lambda, sweeps, stream)
}

/// Density of the dispersal kernel at a pattern: `1 / d(top)` if the
/// pattern interlaces under the given top row, relying on the polytope
/// volume being the top-row weight.
pub fn l_density<T: Real>(pattern: &GtPattern<T>, lambda: &[T]) -> Result<T> {
    if pattern.top() != lambda {
        return Err(Error::invalid("pattern top row does not match the given spectral point"));
    }
    validate_strict_top(pattern.k(), lambda)?;
    Ok(T::one() / d_func(pattern.k(), lambda)?)
}

/// Hit-or-miss Monte Carlo estimate of the interlacing-polytope volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    /// Estimated Euclidean volume.
    pub estimate: f64,
    /// One-sigma standard error of the estimate.
    pub std_err: f64,
    /// Number of box samples drawn.
    pub n_samples: usize,
    /// Number of samples that landed inside the polytope.
    pub n_accepted: usize,
}

/// Estimates the polytope volume under a strict top row by rejection from
/// the product box `prod [0, lambda_j]` over all free coordinates. The
/// estimate converges to the top-row weight `d(lambda)`.
pub fn volume_mc(
    k: usize,
    lambda: &[f64],
    n_samples: usize,
    stream: &mut NoiseStream,
) -> Result<VolumeEstimate> {
    validate_strict_top(k, lambda)?;
    if n_samples == 0 {
        return Err(Error::invalid("volume_mc needs at least one sample"));
    }
    if k == 1 {
        // No free coordinates: the polytope is the single point `lambda`.
        return Ok(VolumeEstimate { estimate: 1.0, std_err: 0.0, n_samples, n_accepted: n_samples });
    }
    let mut box_volume = 1.0f64;
    for m in 2..=k {
        for &l in lambda.iter().take(row_len(m)) {
            box_volume *= l;
        }
    }
    let mut rows: Vec<Vec<f64>> = (0..k).map(|r| vec![0.0; row_len(r + 2)]).collect();
    rows[k - 1] = lambda.to_vec();
    let mut accepted = 0usize;
    let mut scratch = GtPattern { rows };
    for _ in 0..n_samples {
        for m in 2..=k {
            for (dst, &l) in scratch.rows[m - 2].iter_mut().zip(lambda) {
                *dst = l * stream.uniform();
            }
        }
        if scratch.is_interlaced() {
            accepted += 1;
        }
    }
    let p_hat = accepted as f64 / n_samples as f64;
    Ok(VolumeEstimate {
        estimate: box_volume * p_hat,
        std_err: box_volume * (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
        n_samples,
        n_accepted: accepted,
    })
}
