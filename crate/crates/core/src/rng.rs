//! Seeded random streams.
//!
//! Every randomized operation draws from a [`RngStream`]: a 64-bit seed plus a
//! stream id. The same pair always produces the same sequence; distinct stream
//! ids under one seed produce independent ChaCha streams. Fan-out work derives
//! child streams with [`RngStream::child`] so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent child stream `index` of this stream.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: splitmix64(
                self.seed ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d)),
            ),
            stream: index,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
