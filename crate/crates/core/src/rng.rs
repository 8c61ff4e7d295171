//! Splittable, counter-based randomness.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream selected
//! by a [`StreamKey`]: the 64-bit seed picks the key, the 64-bit stream id picks
//! one of 2^64 independent streams, and the position inside the stream is the
//! draw index. Work items derive their keys from `(seed, index)` alone, so the
//! output never depends on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator type handed to every sampler.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub stream: u64,
}

impl StreamKey {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Key for replication `index` of an experiment seeded with `seed`.
    pub const fn replication(seed: u64, index: u64) -> Self {
        Self { seed, stream: index }
    }

    /// Opens the stream at draw index 0.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Derives an independent child key. Children of distinct `(key, tag)`
    /// pairs land on distinct ChaCha keys with overwhelming probability.
    pub fn child(&self, tag: u64) -> Self {
        Self { seed: splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d))), stream: tag }
    }
}

/// Runs `f` for replications `0..reps` of `seed` in parallel and returns
/// the results in replication order.
pub fn replicate<T, F>(reps: u64, seed: u64, f: F) -> crate::Result<Vec<T>>
where
    T: Send,
    F: Fn(StreamKey) -> crate::Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps).into_par_iter().map(|i| f(StreamKey::replication(seed, i))).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
