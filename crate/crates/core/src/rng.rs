//! Counter-based deterministic random number generation.
//!
//! Every variate is a pure function of `(seed, counter, stream)`, so sampled
//! paths are reproducible independent of evaluation order and of how work is
//! split across threads. Not cryptographically secure.

/// Golden-ratio increment used throughout the splitmix-style mixing.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0x6A09_E667_F3BC_C909;

/// The splitmix64 output finalizer: a fast, well-avalanched bijection.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent sub-seed, e.g. one per simulated path.
#[inline]
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ index.wrapping_add(1).wrapping_mul(GAMMA))
}

/// A stateless keyed generator: `unit(counter, stream)` is a deterministic
/// function of the key and its arguments.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> CounterRng {
        CounterRng {
            key: mix64(seed ^ GAMMA),
        }
    }

    #[inline]
    pub fn word(&self, counter: u64, stream: u64) -> u64 {
        mix64(
            self.key
                ^ mix64(counter.wrapping_mul(GAMMA) ^ mix64(stream ^ STREAM_SALT)),
        )
    }

    /// A uniform variate in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&self, counter: u64, stream: u64) -> f64 {
        (self.word(counter, stream) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
