//! Counter-based random substreams.
//!
//! Every sample index gets its own ChaCha8 stream: the generator is keyed by
//! `ChaCha8Rng::seed_from_u64(seed)` (PCG32 key expansion, fixed by
//! `rand_core`) and the 64-bit stream id is the sample index. Draws are
//! therefore a pure function of `(seed, index)` and do not depend on how
//! indices are split across threads. Uniform doubles use the top 53 bits of
//! each `u64` word.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
pub struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator positioned at the start of stream `index`.
    pub fn stream(&self, index: u64) -> IndexRng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        IndexRng { rng }
    }
}

/// Generator for one substream.
pub struct IndexRng {
    rng: ChaCha8Rng,
}

impl IndexRng {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_bit(&mut self) -> u8 {
        (self.rng.next_u64() >> 63) as u8
    }
}

/// Derives an independent 64-bit seed from `(seed, salt)` with the
/// SplitMix64 finalizer.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
