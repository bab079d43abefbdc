//! Portable random stream.
//!
//! Raw words come from SplitMix64 (Steele, Lea, Flood 2014): state advances
//! by `0x9e3779b97f4a7c15` and each output is the state mixed by two
//! xor-shift-multiply rounds. Derived values use only the mappings below, so
//! a reimplementation in another language reproduces every dataset:
//!
//! - `below(n)`: Lemire's multiply-shift. Take the high word of `x * n`
//!   (128-bit). If the low word is under `2^64 mod n`, draw again.
//! - `unit()`: `(x >> 11) * 2^-53`, in `[0, 1)`.
//! - `binomial_half(n)`: the number of set bits among `n` fresh bits, taken
//!   from successive words, low bits first.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    /// Independent stream for a sub-task, keyed by `label`.
    pub fn derive(seed: u64, label: u64) -> Self {
        let mut base = Rng::new(seed ^ label.wrapping_mul(0xd1b5_4a32_d192_ed03));
        Rng::new(base.next())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let mut m = self.next() as u128 * n as u128;
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = self.next() as u128 * n as u128;
            }
        }
        (m >> 64) as u64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in `[lo, hi)`; `lo` when the interval is a point.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn binomial_half(&mut self, n: u64) -> u64 {
        let mut left = n;
        let mut count = 0;
        while left > 0 {
            let take = left.min(64);
            let word = self.next();
            let bits = if take == 64 { word } else { word & ((1 << take) - 1) };
            count += u64::from(bits.count_ones());
            left -= take;
        }
        count
    }

    /// Fisher-Yates shuffle driven by `below`.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
