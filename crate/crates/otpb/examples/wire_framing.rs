//! The wire format, frame by frame.
//!
//! Every message is a length-prefixed, typed, round-indexed frame closed
//! by a 16-byte authentication tag. Phase blocks carry big-endian f64
//! samples. Decoding is strict: truncation, unknown types, and trailing
//! bytes are distinct errors, and a flipped bit anywhere breaks the tag.

use otpb::transport::{
    decode_frame, encode_frame, payload_to_phases, phases_to_payload, FrameAuthenticator,
    FrameType, PlaceholderTag, WireFrame,
};

fn main() -> otpb::Result<()> {
    let phases = [0.25f64, 1.5, 3.0];
    let mut frame = WireFrame::untagged(FrameType::PhaseBlock, 42, phases_to_payload(&phases));

    let auth = PlaceholderTag::new(0x00de_ad00_beef_0000);
    auth.stamp(&mut frame);
    let wire = encode_frame(&frame);
    println!(
        "phase block, round 42, {} samples -> {} wire bytes:",
        phases.len(),
        wire.len()
    );
    println!("  {}", hex(&wire));
    println!("  [4B payload len | 1B type | 4B round | payload | 16B tag]");

    let back = decode_frame(&wire).map_err(otpb::Error::from)?;
    println!(
        "\ndecoded: type {:?}, round {}, phases {:?}, tag valid = {}",
        back.frame_type,
        back.run_index,
        payload_to_phases(&back.payload).map_err(otpb::Error::from)?,
        auth.verify(&back)
    );

    let mut tampered = wire.clone();
    tampered[12] ^= 0x01; // one bit inside the first phase sample
    let forged = decode_frame(&tampered).map_err(otpb::Error::from)?;
    println!("after flipping one payload bit: tag valid = {}", auth.verify(&forged));

    for (what, bad) in [
        ("truncated mid-payload", &wire[..12]),
        ("missing part of the tag", &wire[..wire.len() - 3]),
    ] {
        println!("{what}: {}", decode_frame(bad).unwrap_err());
    }
    let mut unknown = wire.clone();
    unknown[4] = 0x77;
    println!("unknown frame type: {}", decode_frame(&unknown).unwrap_err());
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
