//! Splittable, counter-based random streams.
//!
//! A stream is a ChaCha8 key plus a 64-bit stream id. Child streams are
//! addressed by index, so the draws seen by path `i` depend only on the
//! master seed and `i`, never on how paths are scheduled across workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    key: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream { key: seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent family of streams labelled by `tag` (e.g. one family for
    /// surplus paths, another for dual paths).
    pub fn fork(&self, tag: u64) -> Self {
        Self::new(splitmix64(self.key ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    /// The `index`-th stream of this family, positioned at its start.
    pub fn substream(&self, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(index);
        rng.set_word_pos(0);
        RandomStream { key: self.key, rng }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
