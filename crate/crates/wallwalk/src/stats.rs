//! Distributional test statistics used by the verification harness:
//! one- and two-sample Kolmogorov–Smirnov tests, a permutation energy
//! distance test for multivariate equality in law, and an even-degree
//! chi-squared tail function.

use crate::error::{Error, Result};
use crate::rng::NoiseStream;

/// Result of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, PartialEq)]
pub struct KsReport {
    /// Supremum distance between the compared distribution functions.
    pub statistic: f64,
    /// Asymptotic p-value (small-sample corrected).
    pub p_value: f64,
    /// Effective sample size entering the asymptotic distribution.
    pub n_effective: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `P(sup |B(F(x))| > t)` for a Brownian bridge `B`.
///
/// Uses the theta-series form below `t = 1.18` and the alternating
/// exponential series above; the two agree to machine precision at the
/// crossover.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.18 {
        let factor = (core::f64::consts::TAU).sqrt() / t;
        let q = core::f64::consts::PI * core::f64::consts::PI / (8.0 * t * t);
        let mut cdf = 0.0;
        let mut j = 1u32;
        loop {
            let term = (-(2.0 * j as f64 - 1.0).powi(2) * q).exp();
            cdf += term;
            if term < 1e-18 || j > 64 {
                break;
            }
            j += 1;
        }
        (1.0 - factor * cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        let mut j = 1u32;
        loop {
            let term = (-2.0 * (j as f64 * t).powi(2)).exp();
            sf += if j % 2 == 1 { term } else { -term };
            if term < 1e-18 || j > 64 {
                break;
            }
            j += 1;
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

fn ks_p_value(d: f64, n_effective: f64) -> f64 {
    let sq = n_effective.sqrt();
    kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
}

/// One-sample KS test of `xs` against a continuous CDF. Sorts `xs` in place.
pub fn ks1<F: Fn(f64) -> f64>(xs: &mut [f64], cdf: F) -> KsReport {
    assert!(!xs.is_empty(), "ks1 needs at least one observation");
    xs.sort_by(|a, b| a.partial_cmp(b).expect("observations must not be NaN"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KsReport { statistic: d, p_value: ks_p_value(d, n), n_effective: n }
}

/// Two-sample KS test. Sorts both samples in place.
pub fn ks2(a: &mut [f64], b: &mut [f64]) -> KsReport {
    assert!(!a.is_empty() && !b.is_empty(), "ks2 needs nonempty samples");
    let cmp = |x: &f64, y: &f64| x.partial_cmp(y).expect("observations must not be NaN");
    a.sort_by(cmp);
    b.sort_by(cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // Advance past all observations at the current point on both sides
        // so ties are handled symmetrically.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_effective = na * nb / (na + nb);
    KsReport { statistic: d, p_value: ks_p_value(d, n_effective), n_effective }
}

/// Upper tail of the chi-squared distribution with even degrees of freedom:
/// `sf(x) = e^(-x/2) sum_{i < dof/2} (x/2)^i / i!`.
pub fn chi2_sf_even_dof(x: f64, dof: usize) -> f64 {
    assert!(dof >= 2 && dof.is_multiple_of(2), "dof must be even and >= 2");
    assert!(x >= 0.0, "chi-squared support is x >= 0");
    let half = x / 2.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for i in 1..(dof / 2) {
        term *= half / i as f64;
        sum += term;
    }
    ((-half).exp() * sum).clamp(0.0, 1.0)
}

/// Result of a permutation energy distance test.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// Scaled energy statistic `na nb / (na + nb) * E` of the observed split.
    pub statistic: f64,
    /// Permutation p-value `(1 + #{E_perm >= E_obs}) / (n_perm + 1)`.
    pub p_value: f64,
    /// Number of label permutations drawn.
    pub n_perm: usize,
}

#[inline]
fn packed_idx(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

/// Sums of within-group pairwise distances for one labeling, where `members`
/// lists the pooled indices of group A (the rest are group B).
fn within_sums(dist: &[f64], m: usize, a_members: &[usize], b_members: &[usize]) -> (f64, f64) {
    let mut saa = 0.0;
    for (s, &i) in a_members.iter().enumerate() {
        for &j in &a_members[s + 1..] {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            saa += dist[packed_idx(m, lo, hi)];
        }
    }
    let mut sbb = 0.0;
    for (s, &i) in b_members.iter().enumerate() {
        for &j in &b_members[s + 1..] {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            sbb += dist[packed_idx(m, lo, hi)];
        }
    }
    (saa, sbb)
}

/// Two-sample energy distance test for equality of multivariate laws, with
/// a label-permutation null. Deterministic in the stream.
///
/// The permutation p-value cannot fall below `1 / (n_perm + 1)`, so the
/// permutation count bounds the achievable significance; counts below 100
/// are rejected.
pub fn energy_test(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    n_perm: usize,
    stream: &mut NoiseStream,
) -> Result<EnergyReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("energy_test needs two nonempty samples"));
    }
    if n_perm < 100 {
        return Err(Error::invalid("energy_test needs at least 100 permutations"));
    }
    let dim = a[0].len();
    if dim == 0 {
        return Err(Error::invalid("energy_test needs at least one coordinate"));
    }
    let (na, nb) = (a.len(), b.len());
    let m = na + nb;
    let mut pool: Vec<&[f64]> = Vec::with_capacity(m);
    for row in a.iter().chain(b.iter()) {
        if row.len() != dim {
            return Err(Error::invalid("energy_test rows must share one dimension"));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("energy_test rows must be finite"));
        }
        pool.push(row.as_slice());
    }
    let mut dist = vec![0.0f64; m * (m - 1) / 2];
    let mut total = 0.0f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let d: f64 = pool[i]
                .iter()
                .zip(pool[j])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            dist[packed_idx(m, i, j)] = d;
            total += d;
        }
    }
    let scale = (na * nb) as f64 / m as f64;
    let e_of_split = |a_members: &[usize], b_members: &[usize]| -> f64 {
        let (saa, sbb) = within_sums(&dist, m, a_members, b_members);
        let sab = total - saa - sbb;
        let e = 2.0 * sab / (na * nb) as f64
            - 2.0 * saa / (na * na) as f64
            - 2.0 * sbb / (nb * nb) as f64;
        scale * e
    };
    let identity: Vec<usize> = (0..m).collect();
    let e_obs = e_of_split(&identity[..na], &identity[na..]);
    let mut perm: Vec<usize> = identity;
    let mut count_ge = 0usize;
    for _ in 0..n_perm {
        // Fisher–Yates; modulo bias is negligible for m << 2^64.
        for i in (1..m).rev() {
            let j = (stream.next_bits() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        if e_of_split(&perm[..na], &perm[na..]) >= e_obs {
            count_ge += 1;
        }
    }
    Ok(EnergyReport {
        statistic: e_obs,
        p_value: (1 + count_ge) as f64 / (n_perm + 1) as f64,
        n_perm,
    })
}
