//! Counter-based random number generation.
//!
//! Monte Carlo work in this crate must be reproducible under arbitrary
//! parallel scheduling. Instead of a stateful generator shared across
//! threads, every variate is a pure function of `(seed, stream_id, counter)`:
//! a keyed Philox-style block permutation maps the triple to 64 random bits.
//! Replicates and independent jump families get their own `stream_id`, so
//! workers never contend and reordering work cannot change results.

/// Philox 2x64 multiplier.
const PHILOX_M: u64 = 0xD2B7_4407_B1CE_6E93;
/// Weyl key increment.
const PHILOX_W: u64 = 0x9E37_79B9_7F4A_7C15;
/// Key tweak separating stream derivation from variate generation.
const DERIVE_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// Ten rounds of the Philox 2x64 round function.
#[inline]
fn philox2x64(mut ctr: [u64; 2], mut key: u64) -> [u64; 2] {
    for _ in 0..10 {
        let prod = (ctr[0] as u128).wrapping_mul(PHILOX_M as u128);
        let hi = (prod >> 64) as u64;
        let lo = prod as u64;
        ctr = [hi ^ key ^ ctr[1], lo];
        key = key.wrapping_add(PHILOX_W);
    }
    ctr
}

/// A deterministic stream of variates addressed by `(seed, stream_id, counter)`.
///
/// The same triple always yields the same variate; distinct `stream_id`s are
/// statistically independent. Sequential draws advance `counter` by one per
/// consumed 64-bit block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseStream {
    seed: u64,
    stream_id: u64,
    counter: u64,
}

impl NoiseStream {
    /// Creates a stream at counter zero.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        NoiseStream { seed, stream_id, counter: 0 }
    }

    /// Derives an independent child stream identified by `tag`.
    ///
    /// Derivation runs the block function under a salted key, so derived
    /// stream ids cannot collide structurally with variate generation.
    /// Typical use: one child per replicate, then one grandchild per jump
    /// family inside the replicate.
    pub fn derive(&self, tag: u64) -> NoiseStream {
        let id = philox2x64([self.stream_id, tag], self.seed ^ DERIVE_SALT)[0];
        NoiseStream::new(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Random bits at an explicit counter, without advancing the stream.
    #[inline]
    pub fn bits_at(&self, counter: u64) -> u64 {
        philox2x64([self.stream_id, counter], self.seed)[0]
    }

    /// Uniform variate in the open interval (0, 1) at an explicit counter.
    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        // 53 significant bits, offset by half a ulp: never exactly 0 or 1.
        (((self.bits_at(counter) >> 11) as f64) + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Next 64 random bits; advances the counter.
    #[inline]
    pub fn next_bits(&mut self) -> u64 {
        let v = self.bits_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Next uniform variate in (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        let v = self.uniform_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Next unit-mean exponential variate, via inverse transform `-ln(1-U)`.
    ///
    /// Strictly positive: the uniform source never returns 0 or 1.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -(-self.uniform()).ln_1p()
    }

    /// Next standard normal variate (Box-Muller; consumes two uniforms).
    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }
}
