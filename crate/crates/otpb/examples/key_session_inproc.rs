//! A complete key-stretching session between two in-process endpoints.
//!
//! Both parties start from a short shared secret (the first basis
//! schedule). Each round the sender transmits s fresh bits on the noisy
//! wheel, both sides hash (old schedule ‖ fresh bits) with a newly drawn
//! Toeplitz matrix, reserve the first m·s output bits as the next
//! schedule, and bank the rest as distilled key. The audit proves both
//! pools stayed in lockstep.

use otpb::amplify::eve_bound_security_margin;
use otpb::entropy::EntropySource;
use otpb::noise::ChannelParams;
use otpb::pool::{audit_pool, dims_for_session, init_session, run_session, LeakMode, SessionRole};
use otpb::transport::make_inproc_pair;

fn main() -> otpb::Result<()> {
    let params = ChannelParams::new(100.0, 256)?;
    let dims = dims_for_session(64, 8, 8, LeakMode::Rate, &params)?;
    println!(
        "round shape: {} fresh bits, {} basis bits each, leak budget {:.4} -> \
         hash {} bits down to {}",
        dims.s, dims.m, dims.t_leak, dims.in_bits, dims.out_bits
    );
    println!(
        "=> {} schedule bits recycle, {} key bits distilled per round; \
         residual eavesdropper information <= {:.2e} bits",
        dims.bases_bits(),
        dims.key_bits(),
        eve_bound_security_margin(dims.lambda)
    );

    // The short initial secret both parties share out of band.
    let mut secret_rng = EntropySource::seeded(11);
    let c0 = secret_rng.bits(dims.bases_bits());

    let mut alice = init_session(SessionRole::Alice, &c0, dims, params)?;
    let mut bob = init_session(SessionRole::Bob, &c0, dims, params)?;
    let mut alice_rng = EntropySource::seeded(12);

    let mut pair = make_inproc_pair(false);
    run_session(
        &mut alice,
        &mut alice_rng,
        &mut pair.endpoint_a,
        &mut bob,
        &mut pair.endpoint_b,
        100,
    )?;

    let audit = audit_pool(&alice, &bob);
    println!("\naudit: {audit}");
    let key = &alice.pool.key_region;
    println!(
        "first 64 of {} key bits: {}",
        key.len(),
        key[..64].iter().map(|b| char::from(b'0' + b)).collect::<String>()
    );
    Ok(())
}
