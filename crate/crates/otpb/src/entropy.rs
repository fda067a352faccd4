//! Random-bit supply.
//!
//! Every random draw in the crate — fresh pool bits, hash seeds, channel
//! noise — flows through an [`EntropySource`], so a run is fully
//! reproducible from its seeds. The source is a ChaCha12 stream cipher:
//! seeded for deterministic simulations, or keyed from the operating
//! system for live sessions.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// How an [`EntropySource`] was keyed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    /// Deterministic: same seed, same stream.
    Seeded,
    /// Keyed from operating-system entropy; not reproducible.
    System,
}

/// Buffered bit-level view over a ChaCha12 stream.
///
/// `next_bit` serves bits from an internal 64-bit buffer, so consuming
/// bits one at a time costs one cipher block per 64 bits.
#[derive(Debug, Clone)]
pub struct EntropySource {
    kind: EntropyKind,
    rng: ChaCha12Rng,
    buf: u64,
    buf_left: u32,
}

impl EntropySource {
    /// Deterministic source: the same seed always yields the same bit
    /// stream.
    pub fn seeded(seed: u64) -> Self {
        EntropySource {
            kind: EntropyKind::Seeded,
            rng: ChaCha12Rng::seed_from_u64(seed),
            buf: 0,
            buf_left: 0,
        }
    }

    /// Source keyed from the operating system's entropy pool.
    pub fn from_system() -> Self {
        EntropySource {
            kind: EntropyKind::System,
            rng: ChaCha12Rng::from_entropy(),
            buf: 0,
            buf_left: 0,
        }
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }

    /// Next bit of the stream (0 or 1).
    pub fn next_bit(&mut self) -> u8 {
        if self.buf_left == 0 {
            self.buf = self.rng.next_u64();
            self.buf_left = 64;
        }
        let bit = (self.buf & 1) as u8;
        self.buf >>= 1;
        self.buf_left -= 1;
        bit
    }

    /// Next `n` bits as a 0/1 vector.
    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.next_bit()).collect()
    }
}

// Exposes the underlying word stream for samplers (`rand_distr`) that
// want whole words. Bit-buffered and word-level draws interleave safely:
// each pulls fresh cipher output.
impl RngCore for EntropySource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = EntropySource::seeded(7);
        let mut b = EntropySource::seeded(7);
        assert_eq!(a.bits(1000), b.bits(1000));
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = EntropySource::seeded(7);
        let mut b = EntropySource::seeded(8);
        assert_ne!(a.bits(256), b.bits(256));
    }

    #[test]
    fn bit_stream_is_balanced() {
        // Monobit check: 10^5 draws from a healthy source sit within
        // 5 sigma of half ones (sigma = sqrt(n)/2 = 158).
        let mut src = EntropySource::seeded(42);
        let ones: u32 = src.bits(100_000).iter().map(|&b| u32::from(b)).sum();
        assert!((ones as i64 - 50_000).abs() < 790, "ones = {ones}");
    }

    #[test]
    fn bit_and_word_draws_interleave() {
        let mut src = EntropySource::seeded(3);
        let first = src.next_bit();
        let _word = src.next_u64();
        let after = src.next_bit();
        // No panic and values stay in range; determinism covers the rest.
        assert!(first <= 1 && after <= 1);
    }

    #[test]
    fn kind_reports_seeding() {
        assert_eq!(EntropySource::seeded(0).kind(), EntropyKind::Seeded);
        assert_eq!(EntropySource::from_system().kind(), EntropyKind::System);
    }
}
