//! Parallel Monte Carlo sampling helpers.
//!
//! Every replicate runs on its own derived substream (`root.derive(rep)`),
//! so results are identical regardless of thread count or scheduling, and
//! the outputs are collected in replicate order.

use rayon::prelude::*;

use crate::dynamics;
use crate::matrixmodel::{sample_increment, AntisymMatrix};
use crate::rng::NoiseStream;

/// Maps `f` over `n` derived substreams in parallel, preserving order.
pub fn par_map_replicates<T, F>(root: &NoiseStream, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(NoiseStream) -> T + Sync,
{
    par_map_indexed(root, n, |_, s| f(s))
}

/// Like [`par_map_replicates`], but also hands the closure its replicate
/// index, for workloads that cycle parameters across replicates.
pub fn par_map_indexed<T, F>(root: &NoiseStream, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, NoiseStream) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|rep| f(rep, root.derive(rep as u64)))
        .collect()
}

/// Rightmost-particle positions after `n_steps` steps, one per replicate.
pub fn particle_last_samples(k: usize, n_steps: usize, n_rep: usize, root: &NoiseStream) -> Vec<f64> {
    par_map_replicates(root, n_rep, |s| dynamics::simulate_final(k, n_steps, &s).last())
}

/// Full particle configurations after `n_steps` steps.
pub fn particle_vector_samples(
    k: usize,
    n_steps: usize,
    n_rep: usize,
    root: &NoiseStream,
) -> Vec<Vec<f64>> {
    par_map_replicates(root, n_rep, |s| {
        dynamics::simulate_final(k, n_steps, &s).positions().to_vec()
    })
}

/// Rightmost-particle positions observed at several times along one
/// trajectory, one row per replicate.
pub fn particle_last_at_times(
    k: usize,
    times: &[usize],
    n_rep: usize,
    root: &NoiseStream,
) -> Vec<Vec<f64>> {
    let horizon = times.iter().copied().max().unwrap_or(0);
    par_map_replicates(root, n_rep, move |s| {
        let states = dynamics::simulate(k, horizon, &s);
        times.iter().map(|&t| states[t].last()).collect()
    })
}

/// Sum of `n_steps` Gaussian rank-two increments of side `k + 1`.
pub fn matrix_state(k: usize, n_steps: usize, stream: &mut NoiseStream) -> AntisymMatrix<f64> {
    let mut a = AntisymMatrix::<f64>::zeros(k + 1);
    for _ in 0..n_steps {
        a.add_assign(&sample_increment(k + 1, stream));
    }
    a
}

/// Top spectral parts `sigma_1` of the matrix process at time `n_steps`.
pub fn matrix_top_samples(k: usize, n_steps: usize, n_rep: usize, root: &NoiseStream) -> Vec<f64> {
    par_map_replicates(root, n_rep, |mut s| {
        let a = matrix_state(k, n_steps, &mut s);
        a.positive_eigenvalues().expect("finite Gaussian matrices")
            .coords()[0]
    })
}

/// Top spectral parts observed at several times along one matrix
/// trajectory, one row per replicate.
pub fn matrix_top_at_times(
    k: usize,
    times: &[usize],
    n_rep: usize,
    root: &NoiseStream,
) -> Vec<Vec<f64>> {
    let horizon = times.iter().copied().max().unwrap_or(0);
    par_map_replicates(root, n_rep, move |mut s| {
        let mut a = AntisymMatrix::<f64>::zeros(k + 1);
        let mut tops = vec![0.0f64; times.len()];
        for step in 1..=horizon {
            a.add_assign(&sample_increment(k + 1, &mut s));
            for (slot, &t) in times.iter().enumerate() {
                if t == step {
                    tops[slot] = a
                        .positive_eigenvalues()
                        .expect("finite Gaussian matrices")
                        .coords()[0];
                }
            }
        }
        tops
    })
}

/// Vectors of top spectral parts of the nested leading minors
/// (sizes `2..=k+1`) of the matrix state at time `n_steps`.
pub fn matrix_minor_vector_samples(
    k: usize,
    n_steps: usize,
    n_rep: usize,
    root: &NoiseStream,
) -> Vec<Vec<f64>> {
    par_map_replicates(root, n_rep, |mut s| {
        matrix_state(k, n_steps, &mut s)
            .minor_top_eigenvalues()
            .expect("finite Gaussian matrices")
    })
}

/// Positive spectral parts of the matrix state at time `n_steps`.
pub fn matrix_spectrum_samples(
    k: usize,
    n_steps: usize,
    n_rep: usize,
    root: &NoiseStream,
) -> Vec<Vec<f64>> {
    par_map_replicates(root, n_rep, |mut s| {
        matrix_state(k, n_steps, &mut s)
            .positive_eigenvalues()
            .expect("finite Gaussian matrices")
            .into_inner()
    })
}

/// Caps a sample at `max` rows. Replicates are exchangeable by
/// construction, so truncation is an unbiased subsample.
pub fn subsample(rows: Vec<Vec<f64>>, max: usize) -> Vec<Vec<f64>> {
    let mut rows = rows;
    rows.truncate(max);
    rows
}
