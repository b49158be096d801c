//! Seeded random streams.
//!
//! Every stream is ChaCha8 keyed with `ChaCha8Rng::seed_from_u64(seed)` (the
//! `rand_core` 0.6 PCG32 key expansion) and positioned on stream id `stream`
//! via `set_stream`. Derived values:
//!
//! * `unit()`  = `(next_u64 >> 11) · 2⁻⁵³`, a double in `[0, 1)`;
//! * `below(n)` = `(next_u64 · n) >> 64` (multiply-shift, 128-bit product).
//!
//! Any port reproducing those three steps sees identical draws.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`; `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    /// Fisher–Yates, back to front.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
