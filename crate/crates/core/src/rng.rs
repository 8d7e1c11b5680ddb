//! Counter-based, splittable randomness.
//!
//! A [`SeededRng`] is identified by `(seed, stream)`. The same pair always
//! yields the same sequence, and [`SeededRng::fork`] derives independent
//! children deterministically so that parallel workers can each own one.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Seed of the `k`-th child. Depends only on `(seed, stream, k)`, never on
    /// how much of this generator has been consumed.
    pub fn child_seed(&self, k: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(self.stream ^ splitmix64(k.wrapping_add(1))))
    }

    /// The `k`-th child generator, `SeededRng::new(self.child_seed(k), 0)`.
    pub fn fork(&self, k: u64) -> SeededRng {
        SeededRng::new(self.child_seed(k), 0)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
