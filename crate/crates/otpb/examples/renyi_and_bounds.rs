//! Security accounting: collision entropy, leakage, and the hashing
//! bounds that size the protocol.
//!
//! Once the eavesdropper's error rate P_e is known, everything the
//! protocol needs follows: her collision (Rényi) entropy per bit, the
//! per-bit leak ½ − P_e the hash must pay for, how long a run can stay
//! under one leaked bit, and the exponentially small residue that
//! remains after compressing λ extra bits.

use otpb::amplify::{
    eve_bound_security_margin, eve_entropy_gap_log2, max_run_length, max_run_length_leak_rate,
};
use otpb::eve::{bayes_error_prob, leak_per_bit, renyi_entropy_per_bit};
use otpb::noise::ChannelParams;

fn main() -> otpb::Result<()> {
    println!("collision entropy per transmitted bit at <n> = 100:");
    for m in [64u32, 256, 1024, 4096, 16384] {
        let params = ChannelParams::new(100.0, m)?;
        let p_e = bayes_error_prob(&params)?;
        println!(
            "  M = {m:>5}: P_e = {p_e:.6}, Renyi entropy = {:.6} bits (ceiling 2)",
            renyi_entropy_per_bit(p_e)?
        );
    }

    let params = ChannelParams::new(100.0, 256)?;
    let p_e = bayes_error_prob(&params)?;
    let t_bit = leak_per_bit(&params)?;
    println!("\nat (<n>=100, M=256) the per-bit leak is {t_bit:.6} = 1/{:.0}", 1.0 / t_bit);
    println!(
        "  longest run under one leaked bit: {} bits (rate accounting)",
        max_run_length_leak_rate(p_e)?
    );
    println!(
        "  longest run by the literal rule (s(1-P_e) < 1): {} bits",
        max_run_length(p_e)?
    );

    println!("\nresidual information after hashing away lambda extra bits:");
    for lambda in [1u32, 8, 20, 40] {
        println!(
            "  lambda = {lambda:>2}: <= {:.3e} bits",
            eve_bound_security_margin(lambda)
        );
    }

    println!("\nreusing the pool across n hashing rounds (r = 100 entropy bits):");
    for n in [1u64, 2, 5, 10] {
        println!(
            "  after {n:>2} rounds: log2(information bound) = {:.1}",
            eve_entropy_gap_log2(100, n)
        );
    }
    Ok(())
}
