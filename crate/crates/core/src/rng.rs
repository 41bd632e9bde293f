//! SplitMix64, the single generator behind every seeded family and corpus.
//!
//! Stream contract (reproducible from any language):
//!
//! ```text
//! state = seed
//! next():
//!     state = state + 0x9E3779B97F4A7C15        (mod 2^64)
//!     z = state
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2^64)
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2^64)
//!     return z ^ (z >> 31)
//! ```
//!
//! Random matrices draw one `next()` per cell in row-major order and keep the
//! top bit as the f-value.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_bit(&mut self) -> u8 {
        (self.next_u64() >> 63) as u8
    }

    /// Uniform value in `0..bound` by rejection (no modulo bias).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}
