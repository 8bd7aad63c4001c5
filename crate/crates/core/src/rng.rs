//! Seeded, stream-splittable pseudo-random source.
//!
//! Every random quantity in the simulator comes from a [`RandomStream`]
//! addressed by `(seed, stream_id)`. The generator is counter-based: draw
//! `i` of a stream is `mix(base + i * GAMMA)` where `base` is derived from
//! the address, so streams need no warm-up, never interact, and replay
//! bit-exactly regardless of thread schedule.
//!
//! Stream ids are assigned per `(trial, purpose)` via [`purpose::stream_id`].
//! Purpose tags are fixed; changing how one noise source is consumed can
//! never perturb the draws of another.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 64-bit golden-ratio increment of the Weyl sequence.
const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a bijective avalanche mix of the counter state.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fixed purpose tags for per-trial streams.
///
/// Each Monte Carlo trial owns one stream per noise source, so the sources
/// are independently addressable and independently reproducible.
pub mod purpose {
    /// Channel path parameters (delays, gains, scattering angles).
    pub const CHANNEL: u64 = 0;
    /// Phase-shift noise vector.
    pub const PSN: u64 = 1;
    /// Random RIS configuration baseline.
    pub const RANDOM_CONFIG: u64 = 2;
    /// Random compensator baseline.
    pub const RANDOM_COMPENSATOR: u64 = 3;

    /// Stream ids per trial; tags above must stay below this stride.
    pub const STRIDE: u64 = 8;

    /// Stream id for `(trial, purpose)`.
    pub fn stream_id(trial: u64, tag: u64) -> u64 {
        debug_assert!(tag < STRIDE);
        trial.wrapping_mul(STRIDE).wrapping_add(tag)
    }
}

/// A deterministic, value-like random stream.
///
/// Cloning a stream clones its position; two clones continue identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    base: u64,
    counter: u64,
    spare_normal: Option<u64>,
}

impl RandomStream {
    /// Stream addressed by `(seed, stream_id)`; the first draw is a pure
    /// function of the pair.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let base = mix(mix(seed) ^ stream_id.wrapping_mul(GAMMA));
        Self {
            seed,
            stream_id,
            base,
            counter: 0,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of raw 64-bit words drawn so far.
    pub fn draw_count(&self) -> u64 {
        self.counter
    }

    /// Next raw 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.base.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform<T: Scalar>(&mut self, lo: T, hi: T) -> Result<T> {
        if !(lo < hi) {
            return Err(Error::DegenerateRange {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let u = T::from_f64_lossy(self.next_f64());
        let x = lo + u * (hi - lo);
        // Guard the half-open contract against rounding at the upper edge.
        Ok(if x >= hi { lo } else { x })
    }

    /// Standard normal draw (Box-Muller; the paired variate is cached).
    pub fn standard_normal<T: Scalar>(&mut self) -> T {
        if let Some(bits) = self.spare_normal.take() {
            return T::from_f64_lossy(f64::from_bits(bits));
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some((r * theta.sin()).to_bits());
        T::from_f64_lossy(r * theta.cos())
    }

    /// Circularly symmetric complex Gaussian with total variance `var`.
    pub fn complex_normal<T: Scalar>(&mut self, var: T) -> Complex<T> {
        let s = (var / T::from_f64_lossy(2.0)).sqrt();
        let re: T = self.standard_normal();
        let im: T = self.standard_normal();
        Complex::new(s * re, s * im)
    }
}

/// Stream for `(seed, trial, purpose)`.
pub fn trial_stream(seed: u64, trial: u64, tag: u64) -> RandomStream {
    RandomStream::new(seed, purpose::stream_id(trial, tag))
}
