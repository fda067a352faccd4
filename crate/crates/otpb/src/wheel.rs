//! The M-ary encryption-basis wheel.
//!
//! Basis k (0 ≤ k < M) encodes a bit as one of two antipodal phases:
//!
//! ```text
//! φ(bit, k) = k·π/M + bit·π + (k mod 2)·π   (mod 2π)
//! ```
//!
//! Basis 0 anchors bit 0 at phase 0 and bit 1 at π. The 2M points of
//! the full constellation sit π/M apart, and the parity twist (k mod 2)·π
//! makes bit values alternate from one point to the next: stepping +π/M
//! from either point of basis k lands exactly on the opposite-bit point
//! of basis k+1 (for k < M−1). An observer who does not know k therefore
//! sees both bit values interleaved at the finest angular scale the
//! constellation has.

use crate::error::{Error, Result};
use crate::noise::{ChannelParams, PhaseAngle};

/// Index of one of the M encryption bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(u32);

impl BasisIndex {
    pub fn new(k: u32) -> Self {
        BasisIndex(k)
    }

    pub fn index(&self) -> u32 {
        self.0
    }
}

/// One constellation point: a basis, the bit it carries and the phase on
/// the wheel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationPoint {
    pub basis: BasisIndex,
    pub bit: u8,
    pub phase: PhaseAngle,
}

/// Interprets `m` bits (most-significant first) as a basis index.
///
/// Rejects a slice of the wrong length or with entries other than 0/1.
pub fn basis_from_bits(bits: &[u8], m: u32) -> Result<BasisIndex> {
    if bits.len() != m as usize {
        return Err(Error::LengthMismatch {
            what: "basis bit group",
            expected: m as usize,
            got: bits.len(),
        });
    }
    if m == 0 || m > 30 {
        return Err(Error::InvalidParam(format!(
            "bits per basis must lie in 1..=30, got {m}"
        )));
    }
    let mut k = 0u32;
    for &b in bits {
        if b > 1 {
            return Err(Error::InvalidParam(format!(
                "bit values must be 0 or 1, got {b}"
            )));
        }
        k = (k << 1) | u32::from(b);
    }
    Ok(BasisIndex(k))
}

/// Expands a basis index back into `m` bits, most-significant first.
pub fn bits_from_basis(basis: BasisIndex, m: u32) -> Result<Vec<u8>> {
    if m == 0 || m > 30 {
        return Err(Error::InvalidParam(format!(
            "bits per basis must lie in 1..=30, got {m}"
        )));
    }
    if basis.index() >= (1u32 << m) {
        return Err(Error::InvalidParam(format!(
            "basis index {} does not fit in {m} bits",
            basis.index()
        )));
    }
    Ok((0..m).rev().map(|i| ((basis.index() >> i) & 1) as u8).collect())
}

/// Phase that carries `bit` in basis `basis`.
pub fn encode(bit: u8, basis: BasisIndex, params: &ChannelParams) -> Result<PhaseAngle> {
    if bit > 1 {
        return Err(Error::InvalidParam(format!("bit must be 0 or 1, got {bit}")));
    }
    if basis.index() >= params.num_bases() {
        return Err(Error::InvalidParam(format!(
            "basis index {} out of range for {} bases",
            basis.index(),
            params.num_bases()
        )));
    }
    let k = basis.index();
    let twist = f64::from((k % 2) + u32::from(bit)) * std::f64::consts::PI;
    Ok(PhaseAngle::new(f64::from(k) * params.point_spacing() + twist))
}

/// Full constellation point for (`bit`, `basis`).
pub fn constellation_point(
    bit: u8,
    basis: BasisIndex,
    params: &ChannelParams,
) -> Result<ConstellationPoint> {
    Ok(ConstellationPoint { basis, bit, phase: encode(bit, basis, params)? })
}

/// Recovers the bit from a measured phase, given the basis it was sent
/// in: whichever of the basis's two antipodal points lies closer wins,
/// with the exact tie (distance π/2 to both) resolved to bit 0.
pub fn decode_with_basis(
    measured: PhaseAngle,
    basis: BasisIndex,
    params: &ChannelParams,
) -> Result<u8> {
    let to0 = measured.distance(encode(0, basis, params)?);
    let to1 = measured.distance(encode(1, basis, params)?);
    Ok(u8::from(to1 < to0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use proptest::prelude::*;

    fn params(n: f64, m_bases: u32) -> ChannelParams {
        ChannelParams::new(n, m_bases).unwrap()
    }

    #[test]
    fn basis_zero_anchors_the_wheel() {
        let p = params(100.0, 16);
        assert_eq!(encode(0, BasisIndex::new(0), &p).unwrap().radians(), 0.0);
        assert_eq!(encode(1, BasisIndex::new(0), &p).unwrap().radians(), PI);
    }

    #[test]
    fn bit_groups_read_most_significant_first() {
        assert_eq!(basis_from_bits(&[1, 0, 1, 1], 4).unwrap(), BasisIndex::new(11));
        assert_eq!(basis_from_bits(&[0, 0, 0, 1], 4).unwrap(), BasisIndex::new(1));
        assert_eq!(bits_from_basis(BasisIndex::new(11), 4).unwrap(), vec![1, 0, 1, 1]);
    }

    #[test]
    fn basis_from_bits_validates_input() {
        assert!(matches!(
            basis_from_bits(&[1, 0, 1], 4).unwrap_err(),
            Error::LengthMismatch { what: "basis bit group", expected: 4, got: 3 }
        ));
        assert!(basis_from_bits(&[2, 0], 2).is_err());
        assert!(bits_from_basis(BasisIndex::new(16), 4).is_err());
    }

    #[test]
    fn encode_validates_input() {
        let p = params(100.0, 16);
        assert!(encode(2, BasisIndex::new(0), &p).is_err());
        assert!(encode(0, BasisIndex::new(16), &p).is_err());
        assert!(encode(0, BasisIndex::new(15), &p).is_ok());
    }

    #[test]
    fn interior_step_lands_on_opposite_bit_of_next_basis() {
        // M = 16, basis 3 carries bit 0 at 3π/16 + π; one step of π/16
        // later sits basis 4's bit-1 point (4π/16 + π + 0·π... the parity
        // twist flips, so the phases coincide exactly).
        let p = params(100.0, 16);
        for k in 0..15u32 {
            for bit in 0..=1u8 {
                let here = encode(bit, BasisIndex::new(k), &p).unwrap();
                let stepped = here.offset(p.point_spacing());
                let next = encode(1 - bit, BasisIndex::new(k + 1), &p).unwrap();
                assert!(
                    stepped.distance(next) < 1e-12,
                    "k = {k}, bit = {bit}: step lands {} from next point",
                    stepped.distance(next)
                );
            }
        }
    }

    #[test]
    fn decode_breaks_exact_tie_toward_zero() {
        // Exactly between the two points of a basis, both distances are
        // π/2; the decoder must report 0.
        let p = params(100.0, 16);
        let b = BasisIndex::new(5);
        let mid = encode(0, b, &p).unwrap().offset(PI / 2.0);
        assert_eq!(decode_with_basis(mid, b, &p).unwrap(), 0);
    }

    #[test]
    fn noiseless_decode_inverts_encode_for_odd_and_even_m() {
        for m_bases in [15u32, 16, 200] {
            let p = params(100.0, m_bases);
            for k in 0..m_bases {
                for bit in 0..=1u8 {
                    let phase = encode(bit, BasisIndex::new(k), &p).unwrap();
                    assert_eq!(
                        decode_with_basis(phase, BasisIndex::new(k), &p).unwrap(),
                        bit,
                        "m_bases = {m_bases}, k = {k}, bit = {bit}"
                    );
                }
            }
        }
    }

    #[test]
    fn adjacent_basis_reads_the_complement() {
        // The alternation twist puts basis 1's bit-1 point a single step
        // (π/16) from basis 0's bit-0 point, so a receiver who guesses
        // basis 1 reads the sent 0 as a 1.
        let p = params(100.0, 16);
        let sent = encode(0, BasisIndex::new(0), &p).unwrap();
        assert_eq!(decode_with_basis(sent, BasisIndex::new(1), &p).unwrap(), 1);
    }

    #[test]
    fn reliable_recovery_under_noise_at_operating_point() {
        // ⟨n⟩ = 100, M = 200: σ_φ ≈ 0.0707 while the two points of any
        // basis sit π apart, so the matched receiver decodes 10^5
        // noisy bits without a single error.
        use crate::entropy::EntropySource;
        use crate::noise::sample_measured_phase;

        let p = params(100.0, 200);
        let mut rng = EntropySource::seeded(2024);
        let mut errors = 0u32;
        for trial in 0..100_000u32 {
            let bit = (trial & 1) as u8;
            let k = BasisIndex::new(trial % 200);
            let sent = encode(bit, k, &p).unwrap();
            let measured = sample_measured_phase(sent, &p, &mut rng);
            if decode_with_basis(measured, k, &p).unwrap() != bit {
                errors += 1;
            }
        }
        assert_eq!(errors, 0, "matched-basis decoding must be error-free here");
    }

    proptest! {
        #[test]
        fn bits_to_basis_round_trip(m in 1u32..=12, seed in 0u32..4096) {
            let k = seed & ((1u32 << m) - 1);
            let bits = bits_from_basis(BasisIndex::new(k), m).unwrap();
            prop_assert_eq!(bits.len(), m as usize);
            prop_assert_eq!(basis_from_bits(&bits, m).unwrap(), BasisIndex::new(k));
        }

        #[test]
        fn antipodality_holds_everywhere(m_bases in 2u32..=4096, k_seed in 0u32..4096, bit in 0u8..=1) {
            // The two points of any basis are exactly π apart.
            let p = params(10.0, m_bases);
            let k = BasisIndex::new(k_seed % m_bases);
            let a = encode(bit, k, &p).unwrap();
            let b = encode(1 - bit, k, &p).unwrap();
            prop_assert!((a.distance(b) - PI).abs() < 1e-9);
        }

        #[test]
        fn noiseless_round_trip_random_bases(m_bases in 2u32..=4096, k_seed in 0u32..4096, bit in 0u8..=1) {
            let p = params(10.0, m_bases);
            let k = BasisIndex::new(k_seed % m_bases);
            let phase = encode(bit, k, &p).unwrap();
            prop_assert_eq!(decode_with_basis(phase, k, &p).unwrap(), bit);
        }
    }
}
