//! Coherent-state phase-noise channel model.
//!
//! A weak laser pulse carrying mean photon number ⟨n⟩ has an intrinsic
//! phase uncertainty: two copies of the state prepared at phases φ and
//! φ′ overlap with probability
//!
//! ```text
//! |⟨Ψ(φ)|Ψ(φ′)⟩|² = exp(−2⟨n⟩ · (1 − cos((φ − φ′)/2)))
//! ```
//!
//! For small separations this is a Gaussian in Δφ with standard
//! deviation σ_φ = 1/√(2⟨n⟩), which is the width this crate uses when
//! drawing simulated phase measurements. The legitimate receiver never
//! resolves the absolute phase better than σ_φ, and neither can an
//! eavesdropper — that shared blur is the protection mechanism the rest
//! of the crate builds on.

use std::f64::consts::{PI, TAU};

use rand_distr::{Distribution, Normal};

use crate::entropy::EntropySource;
use crate::error::{Error, Result};

/// Channel and constellation parameters: mean photon number ⟨n⟩ and the
/// number of encryption bases M (the constellation has 2M points spaced
/// π/M apart).
///
/// M is any integer ≥ 2 for channel analysis; protocols that convert
/// between basis indices and bit strings additionally need M = 2^m (see
/// [`bits_per_basis`](ChannelParams::bits_per_basis)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    mean_photon_number: f64,
    num_bases: u32,
    variance_scale: f64,
}

impl ChannelParams {
    /// Channel with mean photon number `n_mean` and `num_bases` bases.
    pub fn new(n_mean: f64, num_bases: u32) -> Result<Self> {
        if !n_mean.is_finite() || n_mean <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "mean photon number must be finite and positive, got {n_mean}"
            )));
        }
        if num_bases < 2 {
            return Err(Error::InvalidParam(format!(
                "need at least 2 bases, got {num_bases}"
            )));
        }
        Ok(ChannelParams {
            mean_photon_number: n_mean,
            num_bases,
            variance_scale: 1.0,
        })
    }

    /// Channel whose basis count is 2^m, the form the bit-pool protocol
    /// requires.
    pub fn from_basis_bits(n_mean: f64, m: u32) -> Result<Self> {
        if m == 0 || m > 30 {
            return Err(Error::InvalidParam(format!(
                "bits per basis must lie in 1..=30, got {m}"
            )));
        }
        Self::new(n_mean, 1u32 << m)
    }

    /// Rescales the sampling variance by `scale` (≥ 0). The default 1
    /// matches σ_φ² = 1/(2⟨n⟩); some display conventions widen the blur
    /// (e.g. scale 4 doubles σ_φ), and 0 turns the channel noiseless for
    /// degenerate-case protocol checks.
    pub fn with_variance_scale(mut self, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::InvalidParam(format!(
                "variance scale must be finite and non-negative, got {scale}"
            )));
        }
        self.variance_scale = scale;
        Ok(self)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.mean_photon_number
    }

    pub fn num_bases(&self) -> u32 {
        self.num_bases
    }

    pub fn variance_scale(&self) -> f64 {
        self.variance_scale
    }

    /// Bits per basis index, if M is a power of two.
    pub fn bits_per_basis(&self) -> Option<u32> {
        if self.num_bases.is_power_of_two() {
            Some(self.num_bases.trailing_zeros())
        } else {
            None
        }
    }

    /// Angular spacing π/M between adjacent constellation points.
    pub fn point_spacing(&self) -> f64 {
        PI / self.num_bases as f64
    }
}

/// An angle reduced to the canonical interval [0, 2π).
///
/// All phase arithmetic in the crate goes through this type, so angles
/// stay canonical everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    /// Wraps any finite angle into [0, 2π).
    pub fn new(radians: f64) -> Self {
        let mut r = radians % TAU;
        if r < 0.0 {
            r += TAU;
        }
        // -1e-17 % TAU is -1e-17; the correction then rounds to TAU itself,
        // which must still map into the half-open interval.
        if r >= TAU {
            r = 0.0;
        }
        PhaseAngle(r)
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    /// Shortest angular distance to `other`, in [0, π].
    pub fn distance(&self, other: PhaseAngle) -> f64 {
        let diff = (self.0 - other.0).abs();
        diff.min(TAU - diff)
    }

    /// This angle advanced by `delta` radians, re-wrapped.
    pub fn offset(&self, delta: f64) -> PhaseAngle {
        PhaseAngle::new(self.0 + delta)
    }
}

/// Overlap probability |⟨Ψ(φ)|Ψ(φ′)⟩|² of two pulses prepared `phi` and
/// `phi_prime` apart on a channel with mean photon number ⟨n⟩.
///
/// Equals 1 at zero separation and decays monotonically to exp(−2⟨n⟩)
/// at the antipode (separation π... the relevant argument is half the
/// separation, so the floor over a full turn is exp(−4⟨n⟩) at 2π).
pub fn overlap_magnitude_sq(phi: PhaseAngle, phi_prime: PhaseAngle, params: &ChannelParams) -> f64 {
    let half = (phi.radians() - phi_prime.radians()) / 2.0;
    (-2.0 * params.mean_photon_number() * (1.0 - half.cos())).exp()
}

/// Intrinsic phase-blur width σ_φ = √(scale / (2⟨n⟩)).
pub fn sigma_phi(params: &ChannelParams) -> f64 {
    (params.variance_scale() / (2.0 * params.mean_photon_number())).sqrt()
}

/// Draws one simulated phase measurement: the true phase plus Gaussian
/// blur of width [`sigma_phi`], wrapped into [0, 2π).
pub fn sample_measured_phase(
    true_phase: PhaseAngle,
    params: &ChannelParams,
    rng: &mut EntropySource,
) -> PhaseAngle {
    let normal = Normal::new(0.0, sigma_phi(params)).expect("sigma is finite and positive");
    PhaseAngle::new(true_phase.radians() + normal.sample(rng))
}

/// Detector gain and quantum efficiency applied multiplicatively to the
/// ideal photocurrents. The defaults (1, 1) give the ideal detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub gain: f64,
    pub efficiency: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { gain: 1.0, efficiency: 1.0 }
    }
}

/// Mean photocurrents at the interferometer's two output ports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorCounts {
    /// Mean count at port e.
    pub n_e: f64,
    /// Mean count at port f.
    pub n_f: f64,
    /// Differential signal n_f − n_e, the quantity the receiver slices.
    pub delta_i: f64,
}

/// sin/cos that is exact on the quadrant boundaries.
///
/// The differential current must be an exact odd function of the input
/// phase across half a turn — f64 `sin(PI)` is ~1.2e−16, which would
/// break that symmetry — so multiples of π/2 short-circuit to their
/// exact values.
fn quadrant_exact_sin_cos(angle: f64) -> (f64, f64) {
    let quads = angle / (PI / 2.0);
    if quads == quads.round() {
        let q = ((quads as i64 % 4) + 4) % 4;
        match q {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        angle.sin_cos()
    }
}

/// Ideal mean photocurrents for input phase φ, interferometer offset Δ
/// and pulse intensity |α|² (= mean photon number of the bright pulse).
///
/// The two ports split the intensity exactly: n_e + n_f = |α|² for every
/// input. Total function — no parameter can make it fail.
pub fn detector_counts(input_phase: PhaseAngle, delta: f64, amplitude_sq: f64) -> DetectorCounts {
    detector_counts_with(input_phase, delta, amplitude_sq, DetectorConfig::default())
}

/// [`detector_counts`] with gain and efficiency applied to both ports.
pub fn detector_counts_with(
    input_phase: PhaseAngle,
    delta: f64,
    amplitude_sq: f64,
    config: DetectorConfig,
) -> DetectorCounts {
    let (sin_phi, cos_phi) = quadrant_exact_sin_cos(input_phase.radians());
    let (sin_delta, cos_half_delta) = {
        let (s, _) = quadrant_exact_sin_cos(delta);
        let (_, ch) = quadrant_exact_sin_cos(delta / 2.0);
        (s, ch)
    };
    let sqrt3 = 3.0f64.sqrt();
    let core = sqrt3 * sin_phi * cos_half_delta * cos_half_delta + sqrt3 * cos_phi * sin_delta;
    let scale = config.gain * config.efficiency * amplitude_sq / 4.0;
    let n_e = -scale * (core - 2.0);
    let n_f = scale * (core + 2.0);
    DetectorCounts { n_e, n_f, delta_i: n_f - n_e }
}
