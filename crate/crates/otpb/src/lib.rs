//! otpb — a desk-scale simulator and protocol library for a
//! noise-protected one-time-pad booster.
//!
//! Two parties who share a short secret stretch it into a long key over
//! an optical channel whose intrinsic phase noise does the protecting:
//! each bit rides one of M phase bases packed so tightly that an
//! observer without the basis schedule cannot read it, while the
//! legitimate receiver — who knows the basis — decodes with a
//! half-circle margin. Rounds of Toeplitz hashing then squeeze out the
//! little that does leak.
//!
//! The crate is organized bottom-up:
//!
//! - [`noise`] — the channel model: coherent-state phase blur, state
//!   overlap, detector photocurrents.
//! - [`wheel`] — the M-ary basis wheel: encoding, decoding, bit↔basis
//!   conversions.
//! - [`eve`] — the adversary: Bayes-optimal bit guessing without the
//!   basis, error-probability quadrature and Monte Carlo, collision
//!   entropy, basis-identification information.
//! - [`amplify`] — privacy amplification: Toeplitz hashing over GF(2),
//!   round bit-accounting, residual-information bounds.
//! - [`stokes`] — polarization-frame readout limits: moment identities
//!   and how many bases hide inside the intensity blur.
//! - [`entropy`], [`bits`] — seeded/system randomness and bit packing.
//! - [`transport`] — the framed wire format, in-process and byte-stream
//!   endpoints, the eavesdropper tap, and capture files.
//! - [`pool`] — the two-party session: rounds, pools, audits.
//! - [`experiments`] — named, reproducible dataset and scenario runs
//!   (also exposed by the `otpb` binary).
//!
//! Each capability has a runnable demonstration under `examples/`:
//! `phase_noise`, `basis_wheel`, `demodulator_currents`,
//! `eve_error_rates`, `renyi_and_bounds`, `toeplitz_hashing`,
//! `key_session_inproc`, `key_session_stream`, `eve_capture`,
//! `mutual_information`, `stokes_resolution`, `wire_framing`, and
//! `scripted_experiments`.
//!
//! # Quick start
//!
//! Distill key bits between two in-process endpoints:
//!
//! ```
//! use otpb::entropy::EntropySource;
//! use otpb::noise::ChannelParams;
//! use otpb::pool::{audit_pool, dims_for_session, init_session, run_session,
//!                  LeakMode, SessionRole};
//! use otpb::transport::make_inproc_pair;
//!
//! # fn main() -> otpb::Result<()> {
//! let params = ChannelParams::new(100.0, 256)?;
//! let dims = dims_for_session(64, 8, 8, LeakMode::Rate, &params)?;
//!
//! let shared_secret = EntropySource::seeded(11).bits(dims.bases_bits());
//! let mut alice = init_session(SessionRole::Alice, &shared_secret, dims, params)?;
//! let mut bob = init_session(SessionRole::Bob, &shared_secret, dims, params)?;
//!
//! let mut pair = make_inproc_pair(false);
//! let mut rng = EntropySource::seeded(12);
//! run_session(&mut alice, &mut rng, &mut pair.endpoint_a,
//!             &mut bob, &mut pair.endpoint_b, 10)?;
//!
//! assert!(audit_pool(&alice, &bob).all_equal());
//! assert_eq!(alice.pool.key_region.len(), 10 * dims.key_bits());
//! # Ok(())
//! # }
//! ```

pub mod amplify;
pub mod bits;
pub mod entropy;
pub mod error;
pub mod eve;
pub mod experiments;
pub mod noise;
pub mod pool;
pub mod stokes;
pub mod transport;
pub mod wheel;

pub use error::{Error, FrameError, Result};
