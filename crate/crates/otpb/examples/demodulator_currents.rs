//! Receiver photocurrents: how the basis setting selects what is read.
//!
//! The receiver interferes the incoming signal with a local setting Δ
//! and reads two detector currents. Their difference swings with the
//! input phase φ; the two ports always split the full intensity.

use otpb::noise::{detector_counts, detector_counts_with, DetectorConfig, PhaseAngle};

fn main() {
    let amplitude_sq = 100.0;
    let delta = std::f64::consts::FRAC_PI_2;

    println!("port currents at |alpha|^2 = {amplitude_sq}, delta = pi/2:");
    println!("{:>8} {:>12} {:>12} {:>12}", "phi", "n_e", "n_f", "delta_i");
    for i in 0..=8 {
        let phi = f64::from(i) * std::f64::consts::TAU / 8.0;
        let c = detector_counts(PhaseAngle::new(phi), delta, amplitude_sq);
        println!("{phi:>8.4} {:>12.4} {:>12.4} {:>12.4}", c.n_e, c.n_f, c.delta_i);
    }

    let at0 = detector_counts(PhaseAngle::new(0.0), delta, amplitude_sq);
    let at_pi = detector_counts(PhaseAngle::new(std::f64::consts::PI), delta, amplitude_sq);
    println!(
        "\nworked point: n_e(0) = {:.6} = 25(2-sqrt3), n_f(0) = {:.6} = 25(2+sqrt3)",
        at0.n_e, at0.n_f
    );
    println!(
        "antipodal readout flips the sign exactly: delta_i(0) = {}, delta_i(pi) = {}",
        at0.delta_i, at_pi.delta_i
    );

    let lossy = DetectorConfig { gain: 2.0, efficiency: 0.8 };
    let c = detector_counts_with(PhaseAngle::new(0.0), delta, amplitude_sq, lossy);
    println!(
        "\nwith gain 2 and efficiency 0.8 the currents scale to {:.4} / {:.4}",
        c.n_e, c.n_f
    );
}
