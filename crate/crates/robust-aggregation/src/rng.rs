//! Pinned pseudo-random number generation.
//!
//! Reproducibility across runs, platforms, and worker counts is part of this
//! crate's contract, so the generator is specified here exactly rather than
//! delegated to an external crate:
//!
//! * **State seeding — splitmix64.** A 64-bit seed initialises a splitmix64
//!   chain (increment `0x9E3779B97F4A7C15`; finalizer multiplies
//!   `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB` with xor-shifts 30/27/31).
//!   Stream `j` takes splitmix64 outputs `4j, 4j+1, 4j+2, 4j+3` as its
//!   xoshiro state, so stream 0 matches the conventional seeding and distinct
//!   streams are disjoint windows of one chain.
//! * **Core generator — xoshiro256**.** `result = rotl(s1 * 5, 7) * 9`,
//!   followed by the standard xor/shift/rotate state update with shift 17 and
//!   rotation 45.
//! * **Uniforms.** `next_f64` maps the top 53 bits to `[0, 1)` via
//!   `(u >> 11) * 2^-53`; `next_open_f64` adds one first, giving `(0, 1]`
//!   (safe as a `ln` argument).
//! * **Normals — Box–Muller.** From `u1 in (0, 1]` and `u2 in [0, 1)`,
//!   `r = sqrt(-2 ln u1)` and `theta = 2 pi u2` give the pair
//!   `(r cos theta, r sin theta)`; the sine component is cached and returned
//!   on the next call.
//!
//! The `u64` stream is bit-exact everywhere. Derived floating-point values
//! are bit-stable across runs of one binary; across platforms the
//! transcendental functions in Box–Muller may differ in the last ulp.

/// Splitmix64 sequence used for seeding.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Starts the chain at `seed`.
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Next value of the chain.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// xoshiro256** generator with splitmix64 seeding and indexed sub-streams.
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    /// Seeds stream 0.
    pub fn from_seed(seed: u64) -> Self {
        Self::from_stream(seed, 0)
    }

    /// Seeds stream `stream`: state words are splitmix64 outputs
    /// `4*stream .. 4*stream + 4` of the chain starting at `seed`.
    pub fn from_stream(seed: u64, stream: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        for _ in 0..4 * stream {
            sm.next_u64();
        }
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        Xoshiro256StarStar { s }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform double in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (f64::EPSILON / 2.0)
    }

    /// Uniform double in `(0, 1]`; never zero, so `ln` is finite.
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (f64::EPSILON / 2.0)
    }

    /// Uniform double in `[-1, 1]`.
    pub fn next_symmetric_f64(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Standard-normal source: Box–Muller over a pinned generator, with the
/// sine-leg cached between calls.
#[derive(Debug, Clone)]
pub struct NormalSource {
    rng: Xoshiro256StarStar,
    cache: Option<f64>,
}

impl NormalSource {
    /// Normal source over stream 0 of `seed`.
    pub fn from_seed(seed: u64) -> Self {
        Self::from_stream(seed, 0)
    }

    /// Normal source over the given sub-stream. The cache starts empty, so
    /// per-stream output depends only on `(seed, stream)`.
    pub fn from_stream(seed: u64, stream: u64) -> Self {
        NormalSource { rng: Xoshiro256StarStar::from_stream(seed, stream), cache: None }
    }

    /// Next standard-normal draw.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cache.take() {
            return z;
        }
        let u1 = self.rng.next_open_f64();
        let u2 = self.rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cache = Some(r * theta.sin());
        r * theta.cos()
    }
}
