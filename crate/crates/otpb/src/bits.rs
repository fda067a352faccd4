//! Bit-sequence helpers shared by the hashing engine, the pool protocol
//! and the wire format.
//!
//! Bits travel through the crate as `&[u8]` slices holding one bit per
//! byte (values 0 or 1). Packing into bytes is LSB-first: bit `i` of the
//! sequence lands in byte `i / 8` at bit position `i % 8`. The serialized
//! "bit block" form prefixes the packed bytes with a big-endian `u32` bit
//! count so the receiver can strip padding unambiguously; padding bits in
//! the final byte must be zero (canonical form).

use crate::error::{Error, FrameError, Result};

/// Packs a 0/1 slice into bytes, LSB-first within each byte.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        debug_assert!(b <= 1, "bit value out of range");
        out[i / 8] |= (b & 1) << (i % 8);
    }
    out
}

/// Expands packed bytes back into a 0/1 slice of `bit_len` bits.
pub fn unpack_bits(bytes: &[u8], bit_len: usize) -> Vec<u8> {
    debug_assert!(bit_len <= bytes.len() * 8);
    (0..bit_len).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect()
}

/// Serializes a bit sequence: 4-byte big-endian bit count, then the
/// packed bytes in canonical (zero-padded) form.
pub fn encode_bit_block(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u32).to_be_bytes());
    out.extend_from_slice(&pack_bits(bits));
    out
}

/// Parses a serialized bit block, rejecting short buffers, byte-count
/// mismatches and non-zero padding.
pub fn decode_bit_block(bytes: &[u8]) -> Result<Vec<u8>> {
    if bytes.len() < 4 {
        return Err(FrameError::Truncated {
            field: "bit count",
            needed: 4,
            available: bytes.len(),
        }
        .into());
    }
    let bit_len = u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize;
    let body = &bytes[4..];
    let expected = bit_len.div_ceil(8);
    if body.len() != expected {
        return Err(Error::LengthMismatch {
            what: "bit block body",
            expected,
            got: body.len(),
        });
    }
    if bit_len % 8 != 0 {
        let last = body[body.len() - 1];
        if last >> (bit_len % 8) != 0 {
            return Err(FrameError::BitBlock("non-zero padding bits").into());
        }
    }
    Ok(unpack_bits(body, bit_len))
}

/// Fraction of ones in a bit sequence. Empty input reports 0.
pub fn ones_fraction(bits: &[u8]) -> f64 {
    if bits.is_empty() {
        return 0.0;
    }
    bits.iter().map(|&b| u32::from(b)).sum::<u32>() as f64 / bits.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pack_is_lsb_first() {
        assert_eq!(pack_bits(&[1, 0, 0, 0, 0, 0, 0, 0]), vec![0b0000_0001]);
        assert_eq!(pack_bits(&[0, 0, 0, 0, 0, 0, 0, 1]), vec![0b1000_0000]);
        assert_eq!(pack_bits(&[1, 1, 0, 1]), vec![0b0000_1011]);
    }

    #[test]
    fn block_header_is_bit_count() {
        let enc = encode_bit_block(&[1, 0, 1]);
        assert_eq!(&enc[..4], &3u32.to_be_bytes());
        assert_eq!(enc.len(), 5);
    }

    #[test]
    fn decode_rejects_short_header() {
        let err = decode_bit_block(&[0, 0, 1]).unwrap_err();
        assert!(matches!(
            err,
            Error::Frame(FrameError::Truncated { field: "bit count", .. })
        ));
    }

    #[test]
    fn decode_rejects_body_length_mismatch() {
        let mut enc = encode_bit_block(&[1, 0, 1]);
        enc.push(0);
        assert!(matches!(
            decode_bit_block(&enc).unwrap_err(),
            Error::LengthMismatch { what: "bit block body", .. }
        ));
    }

    #[test]
    fn decode_rejects_dirty_padding() {
        let mut enc = encode_bit_block(&[1, 0, 1]);
        *enc.last_mut().unwrap() |= 0b1000_0000;
        assert!(matches!(
            decode_bit_block(&enc).unwrap_err(),
            Error::Frame(FrameError::BitBlock(_))
        ));
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(bits in prop::collection::vec(0u8..=1, 0..512)) {
            let packed = pack_bits(&bits);
            prop_assert_eq!(unpack_bits(&packed, bits.len()), bits);
        }

        #[test]
        fn block_round_trip(bits in prop::collection::vec(0u8..=1, 0..512)) {
            let enc = encode_bit_block(&bits);
            prop_assert_eq!(decode_bit_block(&enc).unwrap(), bits);
        }
    }
}
