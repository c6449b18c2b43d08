//! Counter-based random streams.
//!
//! Every Monte-Carlo unit of work (a trajectory, a count record, a
//! tomography repetition) draws from its own stream keyed by
//! `(seed, stream index)`. Output word `n` of a stream is a pure function of
//! the key and `n`, so results do not depend on how work is scheduled
//! across threads.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed; used to separate experiment phases
/// that share a user seed.
pub fn derive_seed(seed: u64, domain: u64) -> u64 {
    mix64(mix64(seed ^ GOLDEN).wrapping_add(domain.wrapping_mul(GOLDEN)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(mix64(seed).wrapping_add(mix64(stream ^ 0xD6E8_FEB8_6659_FD93)));
        Self { key, counter: 0 }
    }

    /// Word `n` of this stream, independent of the cursor.
    #[inline]
    pub fn word(&self, n: u64) -> u64 {
        mix64(self.key.wrapping_add(n.wrapping_mul(GOLDEN)))
    }

    /// Uniform in the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = self.word(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
