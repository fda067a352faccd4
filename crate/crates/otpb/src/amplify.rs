//! Privacy amplification: Toeplitz hashing over GF(2), round
//! dimensioning, and the eavesdropper bounds that justify the hash
//! output length.
//!
//! A binary Toeplitz matrix is constant along every diagonal, so an
//! `rows × cols` instance is determined by `rows + cols − 1` seed bits —
//! cheap to draw fresh each round and to announce over the classical
//! channel. Hashing a partially-leaked bit string through a fresh random
//! Toeplitz matrix leaves the eavesdropper exponentially little
//! information about the output (see [`eve_bound_security_margin`]).

use crate::bits;
use crate::entropy::EntropySource;
use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// A binary Toeplitz matrix in compressed (diagonal) form.
///
/// `seed_bits[d]` holds the value of the diagonal `i − j = d − (cols −
/// 1)`, i.e. `entry(i, j) = seed_bits[i − j + cols − 1]`. Index 0 is the
/// top-right corner's diagonal, index `rows + cols − 2` the bottom-left.
/// Compression requires `cols > rows`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzHash {
    rows: usize,
    cols: usize,
    seed_bits: Vec<u8>,
    // seed_bits reversed and packed LSB-first: row i of the matrix is
    // the contiguous bit slice rev[rows−1−i ..][..cols], which makes
    // apply() a word-parallel AND + popcount per row.
    rev_packed: Vec<u64>,
}

fn pack_words(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        words[i / 64] |= u64::from(b & 1) << (i % 64);
    }
    words
}

impl ToeplitzHash {
    /// Builds the matrix from diagonal-order seed bits (see the type
    /// docs for the layout).
    pub fn from_seed_bits(rows: usize, cols: usize, seed_bits: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols <= rows {
            return Err(Error::InvalidParam(format!(
                "Toeplitz dimensions must compress: need cols > rows >= 1, got {rows}x{cols}"
            )));
        }
        let need = rows + cols - 1;
        if seed_bits.len() != need {
            return Err(Error::LengthMismatch {
                what: "Toeplitz seed",
                expected: need,
                got: seed_bits.len(),
            });
        }
        if seed_bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParam("seed bits must be 0 or 1".into()));
        }
        let mut rev: Vec<u8> = seed_bits.iter().rev().copied().collect();
        rev.push(0); // sentinel so row extraction never indexes past the end
        let rev_packed = {
            let mut w = pack_words(&rev);
            w.push(0);
            w
        };
        Ok(ToeplitzHash { rows, cols, seed_bits, rev_packed })
    }

    /// Draws a fresh matrix from `rng`, consuming exactly `rows + cols −
    /// 1` bits: first the leftmost column top to bottom, then the rest
    /// of the top row left to right.
    pub fn random(rows: usize, cols: usize, rng: &mut EntropySource) -> Result<Self> {
        if rows == 0 || cols <= rows {
            return Err(Error::InvalidParam(format!(
                "Toeplitz dimensions must compress: need cols > rows >= 1, got {rows}x{cols}"
            )));
        }
        let mut seed = vec![0u8; rows + cols - 1];
        for i in 0..rows {
            seed[cols - 1 + i] = rng.next_bit();
        }
        for j in 1..cols {
            seed[cols - 1 - j] = rng.next_bit();
        }
        Self::from_seed_bits(rows, cols, seed)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Seed bits in diagonal order.
    pub fn seed_bits(&self) -> &[u8] {
        &self.seed_bits
    }

    /// Matrix entry at (row `i`, column `j`), zero-based.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        assert!(i < self.rows && j < self.cols, "entry index out of range");
        self.seed_bits[i + self.cols - 1 - j]
    }

    /// Serialized seed for the wire: bit-count header plus packed bits.
    pub fn seed_wire_bytes(&self) -> Vec<u8> {
        bits::encode_bit_block(&self.seed_bits)
    }

    /// Rebuilds a matrix from dimensions and a serialized seed.
    pub fn from_wire(rows: usize, cols: usize, wire: &[u8]) -> Result<Self> {
        Self::from_seed_bits(rows, cols, bits::decode_bit_block(wire)?)
    }

    /// GF(2) matrix–vector product: `input` (length `cols`, one bit per
    /// byte) hashed down to `rows` bits.
    pub fn apply(&self, input: &[u8]) -> Result<Vec<u8>> {
        if input.len() != self.cols {
            return Err(Error::LengthMismatch {
                what: "hash input",
                expected: self.cols,
                got: input.len(),
            });
        }
        let x = pack_words(input);
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let start = self.rows - 1 - i;
            let word = start / 64;
            let sh = start % 64;
            let mut parity = 0u32;
            for (w, &xw) in x.iter().enumerate() {
                let chunk = if sh == 0 {
                    self.rev_packed[word + w]
                } else {
                    (self.rev_packed[word + w] >> sh)
                        | (self.rev_packed[word + w + 1] << (64 - sh))
                };
                parity ^= (chunk & xw).count_ones();
            }
            out.push((parity & 1) as u8);
        }
        Ok(out)
    }
}

/// Bit accounting for one hashing round.
///
/// Input is the concatenation of the current basis schedule (`m·s` bits)
/// and the `s` fresh bits of the round; output re-seeds the next
/// schedule and leaves `key_bits()` of distilled key. The difference
/// `in_bits − out_bits = ⌈t_leak⌉ + lambda` is what the round pays for
/// the observed leakage plus the security margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundDims {
    /// Fresh bits per round (also bases consumed per round).
    pub s: u32,
    /// Bits per basis index; the constellation has 2^m bases.
    pub m: u32,
    /// Bits of eavesdropper information shaved off, before rounding.
    pub t_leak: f64,
    /// Extra compression beyond the leakage (security margin).
    pub lambda: u32,
    /// Hash input width: s·(m+1).
    pub in_bits: usize,
    /// Hash output width: in_bits − ⌈t_leak⌉ − lambda.
    pub out_bits: usize,
}

impl RoundDims {
    /// Bits re-absorbed as the next basis schedule.
    pub fn bases_bits(&self) -> usize {
        self.m as usize * self.s as usize
    }

    /// Net distilled key bits per round.
    pub fn key_bits(&self) -> usize {
        self.out_bits - self.bases_bits()
    }

    /// Leakage rounded up to whole bits.
    pub fn leak_whole_bits(&self) -> usize {
        self.t_leak.ceil() as usize
    }
}

/// Computes the round dimensions, rejecting any configuration that
/// would not distill at least one key bit per round.
pub fn dims_for_round(s: u32, m: u32, t_leak: f64, lambda: u32) -> Result<RoundDims> {
    if s == 0 || m == 0 {
        return Err(Error::InvalidParam(format!(
            "round needs s >= 1 fresh bits and m >= 1 basis bits, got s = {s}, m = {m}"
        )));
    }
    if !t_leak.is_finite() || t_leak < 0.0 {
        return Err(Error::InvalidParam(format!(
            "leakage must be finite and non-negative, got {t_leak}"
        )));
    }
    if lambda == 0 {
        return Err(Error::InvalidParam("security margin lambda must be >= 1".into()));
    }
    let in_bits = s as i64 * (m as i64 + 1);
    let out_bits = in_bits - t_leak.ceil() as i64 - i64::from(lambda);
    let bases_bits = s as i64 * m as i64;
    if out_bits <= bases_bits {
        return Err(Error::PoolStarvation {
            out_bits,
            bases_bits,
            shortfall: bases_bits + 1 - out_bits,
        });
    }
    Ok(RoundDims {
        s,
        m,
        t_leak,
        lambda,
        in_bits: in_bits as usize,
        out_bits: out_bits as usize,
    })
}

/// Upper bound on the eavesdropper's expected information about the
/// hashed output when the hash compresses `lambda` bits beyond the
/// leakage: `2^(−lambda) / ln 2` bits.
///
/// Exactly halves per unit of `lambda`.
pub fn eve_bound_security_margin(lambda: u32) -> f64 {
    (-f64::from(lambda)).exp2() / LN_2
}

/// Base-2 logarithm of [`eve_bound_security_margin`]; stays finite for
/// margins where the linear value would underflow.
pub fn eve_bound_security_margin_log2(lambda: u32) -> f64 {
    -f64::from(lambda) - LN_2.log2()
}

/// Expected eavesdropper information (bits) about an `r`-bit hash
/// output when the adversary holds at least `2n` bits of collision
/// entropy about the hash input: `2^(r − 2n) / ln 2`.
///
/// Underflows to 0 when `r − 2n < −1074`; use
/// [`eve_entropy_gap_log2`] in that regime.
pub fn eve_entropy_gap(r: u64, n: u64) -> f64 {
    ((r as f64) - 2.0 * (n as f64)).exp2() / LN_2
}

/// Base-2 logarithm of [`eve_entropy_gap`], finite for all inputs.
pub fn eve_entropy_gap_log2(r: u64, n: u64) -> f64 {
    ((r as f64) - 2.0 * (n as f64)) - LN_2.log2()
}

/// Largest run length `s` whose accumulated eavesdropper advantage
/// stays below one bit under the per-bit error rate `p_e`: the largest
/// `s` with `s · (1 − p_e) < 1`.
pub fn max_run_length(p_e: f64) -> Result<u64> {
    run_length_below_unit(1.0 - p_e, "1 - p_e")
}

/// Alternative accounting: largest `s` with `s · t_bit < 1`, where
/// `t_bit = 1/2 − p_e` is the per-bit leakage above the blind-guess
/// floor. Errors when `p_e ≥ 1/2` (no leakage — every run length
/// qualifies, so no finite maximum exists).
pub fn max_run_length_leak_rate(p_e: f64) -> Result<u64> {
    run_length_below_unit(0.5 - p_e, "t_bit = 1/2 - p_e")
}

fn run_length_below_unit(rate: f64, what: &str) -> Result<u64> {
    if !rate.is_finite() || rate <= 0.0 || rate >= 1.0 {
        return Err(Error::InvalidParam(format!(
            "per-bit rate {what} must lie strictly between 0 and 1, got {rate}"
        )));
    }
    let guess = (1.0 / rate).ceil() - 1.0;
    if guess > 9.0e15 {
        return Err(Error::InvalidParam(format!(
            "run-length bound ~{guess:.3e} exceeds exact integer range"
        )));
    }
    // Settle float rounding at the boundary: enforce s·rate < 1 ≤ (s+1)·rate.
    let mut s = guess.max(0.0) as u64;
    while (s as f64) * rate >= 1.0 {
        s -= 1;
    }
    while ((s + 1) as f64) * rate < 1.0 {
        s += 1;
    }
    Ok(s)
}
