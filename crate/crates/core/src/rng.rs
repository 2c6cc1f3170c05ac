//! Portable pseudo-random numbers for seed vectors and random right-hand sides.
//!
//! The generator is xorshift64* with its state initialised by one SplitMix64
//! step, so any 64-bit seed (including 0) gives a non-zero state:
//!
//! ```text
//! state = splitmix64(seed)              // z = seed + 0x9E3779B97F4A7C15
//!                                       // z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//!                                       // z = (z ^ z>>27) * 0x94D049BB133111EB
//!                                       // z ^ z>>31   (0 is mapped to 1)
//! next:  x ^= x >> 12; x ^= x << 25; x ^= x >> 27
//!        return x * 0x2545F4914F6CDD1D  (wrapping)
//! uniform in [-1, 1):  2 * (next >> 11) * 2^-53 - 1
//! ```
//!
//! All arithmetic is wrapping 64-bit, so the streams are identical on every
//! platform.

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let state = match splitmix64(seed) {
            0 => 1,
            s => s,
        };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }

    /// `n` draws uniform in `[-1, 1)`.
    pub fn symmetric_vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_symmetric()).collect()
    }
}
