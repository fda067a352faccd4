//! The M-ary basis wheel: encoding one bit per signal.
//!
//! Basis k places the two bit values at antipodal phases; consecutive
//! bases are rotated by π/M and parity-twisted, so the full
//! constellation interleaves 0-points and 1-points every π/M. Whoever
//! knows the basis decodes with a half-circle decision distance; whoever
//! does not faces points packed π/M apart.

use otpb::entropy::EntropySource;
use otpb::noise::{sample_measured_phase, ChannelParams};
use otpb::wheel::{basis_from_bits, bits_from_basis, decode_with_basis, encode, BasisIndex};

fn main() -> otpb::Result<()> {
    let params = ChannelParams::new(100.0, 8)?;
    println!("wheel with M = {} bases (spacing pi/8):", params.num_bases());
    for k in 0..params.num_bases() {
        let basis = BasisIndex::new(k);
        let p0 = encode(0, basis, &params)?;
        let p1 = encode(1, basis, &params)?;
        println!(
            "  basis {k}: bit 0 at {:>8.5} rad, bit 1 at {:>8.5} rad (separation {:.5})",
            p0.radians(),
            p1.radians(),
            p0.distance(p1)
        );
    }

    // Basis indices travel as bit blocks (most significant bit first).
    let m = params.bits_per_basis().expect("8 is a power of two");
    let basis = basis_from_bits(&[1, 0, 1], m)?;
    println!(
        "\nbits [1,0,1] name basis {} and read back as {:?}",
        basis.index(),
        bits_from_basis(basis, m)?
    );

    // Round trip through the noisy channel with the basis known.
    let mut rng = EntropySource::seeded(42);
    let mut errors = 0;
    let trials = 10_000;
    for i in 0..trials {
        let bit = (i % 2) as u8;
        let basis = BasisIndex::new(i as u32 % params.num_bases());
        let sent = encode(bit, basis, &params)?;
        let got = sample_measured_phase(sent, &params, &mut rng);
        if decode_with_basis(got, basis, &params)? != bit {
            errors += 1;
        }
    }
    println!(
        "\nknowing the basis, {trials} noisy transmissions decoded with {errors} errors \
         (decision distance pi/2 vs sigma ~ 0.07)"
    );
    Ok(())
}
