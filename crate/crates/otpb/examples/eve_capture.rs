//! Wiretapping the session: what a passive observer actually gets.
//!
//! A tap on the sender's line receives every frame; a capture sink
//! records the whole conversation to disk for offline analysis. The
//! observer replays her Bayes-optimal per-sample guess against the
//! recorded phases — and lands exactly on the predicted error rate,
//! which is what the hashing budget was sized against.

use otpb::entropy::EntropySource;
use otpb::eve::{bayes_error_prob, BayesClassifier};
use otpb::noise::{ChannelParams, PhaseAngle};
use otpb::pool::{dims_for_session, init_session, run_session, LeakMode, SessionRole};
use otpb::transport::{make_inproc_pair, read_capture, shared_capture, FrameType};

fn main() -> otpb::Result<()> {
    let params = ChannelParams::new(1000.0, 1024)?;
    let dims = dims_for_session(64, 10, 8, LeakMode::Rate, &params)?;
    let c0 = EntropySource::seeded(31).bits(dims.bases_bits());
    let mut alice = init_session(SessionRole::Alice, &c0, dims, params)?;
    let mut bob = init_session(SessionRole::Bob, &c0, dims, params)?;
    alice.record_transmitted_bits();
    let mut rng = EntropySource::seeded(32);

    let capture_path = std::env::temp_dir().join("otpb_eve_capture.bin");
    let capture = shared_capture(std::fs::File::create(&capture_path)?);
    let mut pair = make_inproc_pair(true);
    pair.attach_capture(&capture);
    let tap = pair.eavesdrop_tap.take().expect("tap requested");

    let rounds = 200;
    run_session(&mut alice, &mut rng, &mut pair.endpoint_a, &mut bob, &mut pair.endpoint_b, rounds)?;
    drop((pair.endpoint_a, pair.endpoint_b));
    capture.lock().unwrap().flush()?;

    // Offline: classify every tapped phase sample without basis
    // knowledge and score against what was actually sent.
    let classifier = BayesClassifier::new(&params);
    let truth = alice.transmitted_bits();
    let mut correct = 0usize;
    let mut total = 0usize;
    for (_, phases) in tap.drain_phase_blocks()? {
        for phi in phases {
            if classifier.decide(PhaseAngle::new(phi)) == truth[total] {
                correct += 1;
            }
            total += 1;
        }
    }
    let expected = 1.0 - bayes_error_prob(&params)?;
    println!(
        "tap saw {total} bits; guessed {correct} right ({:.4}); channel optimum {expected:.4}",
        correct as f64 / total as f64
    );

    let frames = read_capture(std::fs::File::open(&capture_path)?)?;
    let phase_blocks = frames.iter().filter(|f| f.frame_type == FrameType::PhaseBlock).count();
    println!(
        "capture file {} holds {} frames ({} phase blocks) for replay",
        capture_path.display(),
        frames.len(),
        phase_blocks
    );
    Ok(())
}
