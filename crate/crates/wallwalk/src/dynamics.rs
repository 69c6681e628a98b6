//! Wall-interacting particle dynamics with blocking and pushing.
//!
//! A configuration is an ordered vector `0 <= x_1 <= ... <= x_k`. One time
//! step has two phases, driven by independent unit-exponential jump sizes:
//!
//! 1. **Left phase (blocking).** Every particle tries to jump left by
//!    `xi_minus[i]` but is blocked by where its left neighbor *was*:
//!    `x_i <- max(prev x_(i-1), prev x_i - xi_minus[i])`, with a hard wall
//!    `x_0 = 0` blocking the first particle.
//! 2. **Right phase (pushing).** Particles update in order `1..k`; each
//!    jumps right by `xi_plus[i]` after being pushed to at least the *new*
//!    position of its left neighbor:
//!    `x_i <- max(new x_(i-1), x_i) + xi_plus[i]`.
//!
//! [`step_onepass`] fuses both phases into a single sweep; it is exactly
//! (bitwise) equivalent to [`ParticleState::half_step`] followed by the
//! push phase, because the fused update evaluates the same max tree.

use crate::error::{Error, Result};
use crate::rng::NoiseStream;
use crate::scalar::Real;

/// Ordered particle configuration `0 <= x_1 <= ... <= x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState<T> {
    positions: Vec<T>,
}

impl<T: Real> ParticleState<T> {
    /// Wraps a configuration, validating order and nonnegativity.
    pub fn new(positions: Vec<T>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("a particle state needs at least one particle"));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("particle positions must be finite"));
        }
        if positions[0] < T::zero() {
            return Err(Error::domain("particle positions must be >= 0"));
        }
        if positions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("particle positions must be nondecreasing"));
        }
        Ok(Self { positions })
    }

    /// All `k` particles at the wall.
    pub fn origin(k: usize) -> Self {
        assert!(k >= 1, "particle count k must be >= 1");
        Self { positions: vec![T::zero(); k] }
    }

    /// Number of particles.
    pub fn k(&self) -> usize {
        self.positions.len()
    }

    /// Ordered positions.
    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    /// Rightmost particle.
    pub fn last(&self) -> T {
        *self.positions.last().expect("states are nonempty")
    }

    /// Left phase only: blocked left jumps against the *previous* neighbor
    /// positions, with the wall blocking particle 1.
    pub fn half_step(&self, xi_minus: &[T]) -> Result<Self> {
        validate_jumps("xi_minus", self.k(), xi_minus)?;
        let mut out = Vec::with_capacity(self.k());
        for (i, &xm) in xi_minus.iter().enumerate() {
            let left_old = if i == 0 { T::zero() } else { self.positions[i - 1] };
            out.push((self.positions[i] - xm).max(left_old));
        }
        Ok(Self { positions: out })
    }

    /// Full step: left phase with `xi_minus`, then ordered right phase with
    /// `xi_plus` (each particle pushed by the *new* neighbor position).
    pub fn step(&self, xi_minus: &[T], xi_plus: &[T]) -> Result<Self> {
        let mut half = self.half_step(xi_minus)?;
        validate_jumps("xi_plus", self.k(), xi_plus)?;
        for (i, &xp) in xi_plus.iter().enumerate() {
            let left_new = if i == 0 { T::zero() } else { half.positions[i - 1] };
            half.positions[i] = half.positions[i].max(left_new) + xp;
        }
        Ok(half)
    }
}

fn validate_jumps<T: Real>(name: &str, k: usize, xi: &[T]) -> Result<()> {
    if xi.len() != k {
        return Err(Error::invalid(format!("{name} needs {k} entries, got {}", xi.len())));
    }
    if xi.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err(Error::domain(format!("{name} entries must be finite and >= 0")));
    }
    Ok(())
}

/// Single-sweep update equivalent to [`ParticleState::step`]:
/// `x_i <- max(new x_(i-1), max(prev x_(i-1), prev x_i - xi_minus[i])) + xi_plus[i]`.
///
/// Produces bitwise-identical positions to the two-phase step.
pub fn step_onepass<T: Real>(
    prev: &ParticleState<T>,
    xi_minus: &[T],
    xi_plus: &[T],
) -> Result<ParticleState<T>> {
    let k = prev.k();
    validate_jumps("xi_minus", k, xi_minus)?;
    validate_jumps("xi_plus", k, xi_plus)?;
    let mut out: Vec<T> = Vec::with_capacity(k);
    for i in 0..k {
        let left_old = if i == 0 { T::zero() } else { prev.positions[i - 1] };
        let left_new = if i == 0 { T::zero() } else { out[i - 1] };
        // Same max tree as half_step followed by the push phase.
        let half = (prev.positions[i] - xi_minus[i]).max(left_old);
        out.push(half.max(left_new) + xi_plus[i]);
    }
    Ok(ParticleState { positions: out })
}

/// Draws one step's worth of jump vectors from the two derived substreams.
fn draw_jumps(k: usize, minus: &mut NoiseStream, plus: &mut NoiseStream) -> (Vec<f64>, Vec<f64>) {
    let xi_minus: Vec<f64> = (0..k).map(|_| minus.exponential()).collect();
    let xi_plus: Vec<f64> = (0..k).map(|_| plus.exponential()).collect();
    (xi_minus, xi_plus)
}

/// Runs `n` steps of `k` particles from the origin, recording every state
/// (the returned vector has `n + 1` entries, starting at the origin).
///
/// Left and right jumps are drawn from substreams `stream.derive(0)` and
/// `stream.derive(1)`, so trajectories are a pure function of the stream.
pub fn simulate(k: usize, n: usize, stream: &NoiseStream) -> Vec<ParticleState<f64>> {
    let mut minus = stream.derive(0);
    let mut plus = stream.derive(1);
    let mut states = Vec::with_capacity(n + 1);
    states.push(ParticleState::origin(k));
    for _ in 0..n {
        let (xi_minus, xi_plus) = draw_jumps(k, &mut minus, &mut plus);
        let next = step_onepass(states.last().expect("nonempty"), &xi_minus, &xi_plus)
            .expect("jump vectors are valid by construction");
        states.push(next);
    }
    states
}

/// As [`simulate`] but keeps only the final state. Consumes the stream in
/// the same order, so it agrees exactly with `simulate(..).last()`.
pub fn simulate_final(k: usize, n: usize, stream: &NoiseStream) -> ParticleState<f64> {
    let mut minus = stream.derive(0);
    let mut plus = stream.derive(1);
    let mut state = ParticleState::origin(k);
    for _ in 0..n {
        let (xi_minus, xi_plus) = draw_jumps(k, &mut minus, &mut plus);
        state = step_onepass(&state, &xi_minus, &xi_plus)
            .expect("jump vectors are valid by construction");
    }
    state
}
