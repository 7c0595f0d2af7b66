//! Counter-based, splittable 64-bit random streams.
//!
//! A stream is identified by `(master_seed, stream_index)`. Its key is a
//! SplitMix64-style hash of both, and draw `c` (1-based) is
//! `mix64(key + c * GOLDEN_GAMMA)`. Draws depend only on the identifier and
//! the counter, never on thread scheduling or platform.

/// Weyl increment of SplitMix64 (2^64 / golden ratio, odd).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Salt folded into the stream index before hashing.
pub const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng {
    master_seed: u64,
    stream_index: u64,
    key: u64,
    counter: u64,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = mix64(mix64(master_seed.wrapping_add(GOLDEN_GAMMA)) ^ mix64(stream_index ^ STREAM_SALT));
        Self {
            master_seed,
            stream_index,
            key,
            counter: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Number of 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform integer in `0..bound` by Lemire's multiply-and-reject method.
    ///
    /// Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(bound);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in the closed range `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Seed for a nested family of streams, e.g. realization `r` of an experiment
/// whose replicates then use streams `(derive_seed(seed, r), k)`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    SeededRng::new(master_seed, index).next_u64()
}
