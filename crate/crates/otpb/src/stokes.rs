//! Polarization-mode bookkeeping: Stokes parameters, the two-mode
//! angular-momentum moments, and the phase-resolution limit they impose
//! on an intensity-based wheel readout.
//!
//! A signal that splits amplitude `a` and `b` across two polarization
//! modes with relative phase φ has classical Stokes parameters
//! (S₀, S₁, S₂, S₃); quantum mechanically the same geometry is carried
//! by angular-momentum components (J_x, J_y, J_z) whose second moments
//! do not commute. The variances σ_x² = σ_y² = ⟨n⟩/4 and σ_z² = ⟨n⟩ put
//! a floor under how precisely any intensity measurement can pin the
//! wheel angle: [`wheel_resolution`] converts that floor into "how many
//! basis steps wide is the uncertainty band around basis k".

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{ChannelParams, PhaseAngle};
use crate::wheel::BasisIndex;

/// Guard band around a vanishing tangent-extremum denominator.
pub const POLE_GUARD: f64 = 1e-12;

/// Classical Stokes vector of a two-mode field with amplitudes `a`, `b`
/// and relative phase φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    /// Total intensity a² + b².
    pub s0: f64,
    /// Mode imbalance a² − b².
    pub s1: f64,
    /// In-phase cross term 2ab·cos φ.
    pub s2: f64,
    /// Quadrature cross term 2ab·sin φ.
    pub s3: f64,
}

pub fn stokes_from_components(a: f64, b: f64, phi: PhaseAngle) -> StokesVector {
    let (sin_phi, cos_phi) = phi.radians().sin_cos();
    StokesVector {
        s0: a * a + b * b,
        s1: a * a - b * b,
        s2: 2.0 * a * b * cos_phi,
        s3: 2.0 * a * b * sin_phi,
    }
}

/// First and second moments of the two-mode angular-momentum components
/// for a balanced coherent signal of mean photon number ⟨n⟩ at relative
/// phase φ.
///
/// The second-moment matrix is Hermitian with imaginary antisymmetric
/// off-diagonal parts in the x–z and y–z sectors (the commutators);
/// `variances` is the diagonal minus the squared means, which lands on
/// (⟨n⟩/4, ⟨n⟩/4, ⟨n⟩) identically in exact arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct JMoments {
    /// (⟨J_x⟩, ⟨J_y⟩, ⟨J_z⟩) = ((⟨n⟩/2)·cos φ, (⟨n⟩/2)·sin φ, 0).
    pub mean: [f64; 3],
    /// ⟨J_i J_j⟩, row-major over (x, y, z).
    pub second: [[Complex64; 3]; 3],
    /// (σ_x², σ_y², σ_z²) computed as ⟨J_i²⟩ − ⟨J_i⟩².
    pub variances: [f64; 3],
}

pub fn j_moments(phi: PhaseAngle, n_mean: f64) -> Result<JMoments> {
    if !n_mean.is_finite() || n_mean <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mean photon number must be finite and positive, got {n_mean}"
        )));
    }
    let n = n_mean;
    let (sin_phi, cos_phi) = phi.radians().sin_cos();
    let (sin_2phi, cos_2phi) = (2.0 * phi.radians()).sin_cos();

    let mean = [n / 2.0 * cos_phi, n / 2.0 * sin_phi, 0.0];

    let re = Complex64::new;
    let im = |v: f64| Complex64::new(0.0, v);
    let xx = re(n / 8.0 * (2.0 + n * (1.0 + cos_2phi)), 0.0);
    let yy = re(n / 8.0 * (2.0 + n * (1.0 - cos_2phi)), 0.0);
    let zz = re(n, 0.0);
    let xy = re(n * n / 8.0 * sin_2phi, 0.0);
    let xz = im(-n / 4.0 * sin_phi);
    let yz = im(n / 4.0 * cos_phi);
    let second = [
        [xx, xy, xz],
        [xy, yy, yz],
        [-xz, -yz, zz],
    ];

    let variances = [
        second[0][0].re - mean[0] * mean[0],
        second[1][1].re - mean[1] * mean[1],
        second[2][2].re - mean[2] * mean[2],
    ];
    let jm = JMoments { mean, second, variances };

    // The closed forms above must reproduce (n/4, n/4, n); the defect
    // budget covers the ⟨J⟩² cancellation at large n.
    let tol = |target: f64| 1e-12 * target + 1e-15 * n * n;
    debug_assert!((jm.variances[0] - n / 4.0).abs() <= tol(n / 4.0));
    debug_assert!((jm.variances[1] - n / 4.0).abs() <= tol(n / 4.0));
    debug_assert!((jm.variances[2] - n).abs() <= tol(n));
    Ok(jm)
}

/// The extreme tangents of the wheel-angle uncertainty band around
/// basis `k`:
///
/// ```text
/// tan_max = (sin(kπ/M) + 1/√⟨n⟩) / (cos(kπ/M) − 1/√⟨n⟩)
/// tan_min = (sin(kπ/M) − 1/√⟨n⟩) / (cos(kπ/M) + 1/√⟨n⟩)
/// ```
///
/// Errors when either denominator sits within [`POLE_GUARD`] of zero
/// (the band edge passes through ±π/2, where the tangent chart fails).
pub fn tan_extrema(k: BasisIndex, params: &ChannelParams) -> Result<(f64, f64)> {
    let m = params.num_bases();
    if k.index() >= m {
        return Err(Error::InvalidParam(format!(
            "basis index {} out of range for {m} bases",
            k.index()
        )));
    }
    let angle = f64::from(k.index()) * PI / f64::from(m);
    let (s, c) = angle.sin_cos();
    let u = 1.0 / params.mean_photon_number().sqrt();
    let den_max = c - u;
    if den_max.abs() < POLE_GUARD {
        return Err(Error::TanPole { branch: "upper", denominator: den_max, limit: POLE_GUARD });
    }
    let den_min = c + u;
    if den_min.abs() < POLE_GUARD {
        return Err(Error::TanPole { branch: "lower", denominator: den_min, limit: POLE_GUARD });
    }
    Ok(((s + u) / den_max, (s - u) / den_min))
}

/// Width of the uncertainty band around basis `k`, measured in basis
/// steps:
///
/// ```text
/// Δk = (M/π) · (φ_max − φ_min) / 2
/// ```
///
/// where φ_max/φ_min are the band edges recovered from [`tan_extrema`]
/// on the tangent branch nearest the basis angle kπ/M (each extremum
/// has exactly one representative within π/2 of it). Δk < 1 means
/// intensity statistics resolve individual bases; Δk > 1 means the band
/// blurs across neighbors.
///
/// The scalar extraction (absolute half-separation of the two
/// branch-corrected edges) is this crate's convention; past the point
/// where the basis angle crosses 3π/4 the two extremum formulas swap
/// roles, so only the magnitude of their separation is meaningful.
pub fn wheel_resolution(k: BasisIndex, params: &ChannelParams) -> Result<f64> {
    let (tan_max, tan_min) = tan_extrema(k, params)?;
    let m = f64::from(params.num_bases());
    let center = f64::from(k.index()) * PI / m;
    let nearest = |raw_tan: f64| {
        let mut v = raw_tan.atan();
        while v < center - PI / 2.0 {
            v += PI;
        }
        while v > center + PI / 2.0 {
            v -= PI;
        }
        v
    };
    Ok(m / PI * (nearest(tan_max) - nearest(tan_min)).abs() / 2.0)
}
