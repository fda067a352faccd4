//! Eavesdropper analysis: how much an observer who sees the phase but
//! not the basis schedule can learn.
//!
//! Eve's best strategy against a uniformly random (bit, basis) pair is
//! Bayes-optimal discrimination between the two conditional phase
//! densities f₀ and f₁ (each a 1/M mixture of wrapped Gaussians centered
//! on that bit's M constellation points). Her minimum error probability
//! is
//!
//! ```text
//! P_e = 1 − ½ ∫ max(f₀(θ), f₁(θ)) dθ = ½ ∫ min(f₀(θ), f₁(θ)) dθ
//! ```
//!
//! over the circle. The second form is what the quadrature integrates:
//! it avoids cancellation when P_e is within rounding of its ceiling ½.
//! Because the bit assignment alternates every π/M, the noise blur only
//! has to cover one step of π/M — not the π separating a single basis's
//! two points — for min(f₀, f₁) to approach f₀ ≈ f₁ and P_e to approach
//! ½. That asymmetry between the legitimate receiver (who knows the
//! basis) and Eve (who does not) is the whole game.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use crate::noise::{sample_measured_phase, sigma_phi, ChannelParams, PhaseAngle};
use crate::wheel::{encode, BasisIndex};

/// Absolute tolerance the error-probability quadrature aims for.
pub const QUADRATURE_TOL: f64 = 1e-6;

/// Coefficients below this never influence the first ~15 digits of a
/// density value.
const SERIES_FLOOR: f64 = 1e-18;

/// Per-bit conditional phase densities and the Bayes decision rule.
///
/// Construction precomputes one of two evaluation strategies, chosen by
/// estimated cost:
///
/// * **Lattice sum** — the wrapped-Gaussian mixture summed over the
///   constellation points inside a window wide enough to cover both bit
///   parities and the 10σ tails. Cheap when σ is small compared to the
///   point spacing.
/// * **Harmonic series** — closed-form Fourier series of f₀ ± f₁. For
///   even M the difference f₀ − f₁ carries only odd harmonics h with
///   weight e^(−h²σ²/2) / cos(h·π/(2M)), and the sum f₀ + f₁ only
///   multiples of 2M; both truncate after O(1/σ) terms. Cheap when σ
///   swallows many spacings. (Odd M puts the difference on harmonics
///   M, 3M, …; those wheels are small in practice, so they take the
///   lattice path.)
pub struct BayesClassifier {
    num_bases: u32,
    sigma: f64,
    spacing: f64,
    mode: Mode,
}

enum Mode {
    Lattice {
        half_window: f64,
    },
    Harmonic {
        /// Weight of cos(h(θ + d/2)) for h = 2i+1 in f₀ − f₁.
        diff_coeffs: Vec<f64>,
        /// Weight of cos(2M·k·θ) for k = i+1 in f₀ + f₁.
        sum_coeffs: Vec<f64>,
    },
}

/// Bit carried by constellation point j (phase j·π/M).
///
/// Odd M alternates perfectly around the wheel; even M alternates with
/// two seams (j = M−1, M and j = 2M−1, 0 carry equal bits).
fn point_bit(j: i64, num_bases: u32) -> u8 {
    let two_m = 2 * i64::from(num_bases);
    let jj = j.rem_euclid(two_m);
    let alt = (jj % 2) as u8;
    if num_bases % 2 == 1 || jj < i64::from(num_bases) {
        alt
    } else {
        1 - alt
    }
}

impl BayesClassifier {
    pub fn new(params: &ChannelParams) -> Self {
        let sigma = sigma_phi(params);
        let m = params.num_bases();
        let d = params.point_spacing();

        // Window radius: 10σ of tail, and always past the nearest
        // opposite-bit point (up to 2 spacings away at a seam).
        let half_window = (10.0 * sigma).max(2.0 * d + 8.0 * sigma);
        let lattice_evals = 2.0 * half_window / d + 2.0;

        // Harmonics die once e^(−h²σ²/2) can no longer lift the series
        // floor even through the worst-case 1/cos amplification (~2M/π).
        let h_cut = (2.0 * (4.0 * f64::from(m) / SERIES_FLOOR).ln()).sqrt() / sigma;
        let harmonic_terms = h_cut / 2.0;

        // A lattice step costs an exp(); a harmonic step a complex
        // multiply — roughly six times cheaper.
        let mode = if m % 2 == 0 && harmonic_terms < 6.0 * lattice_evals {
            let mut diff_coeffs = Vec::new();
            let mut h = 1.0f64;
            while h <= h_cut {
                let envelope = (-h * h * sigma * sigma / 2.0).exp();
                diff_coeffs.push(
                    (2.0 / (PI * f64::from(m))) * envelope / (h * d / 2.0).cos(),
                );
                h += 2.0;
            }
            let mut sum_coeffs = Vec::new();
            for k in 1..=4 {
                let hk = 2.0 * f64::from(m) * k as f64;
                let envelope = (-hk * hk * sigma * sigma / 2.0).exp();
                if envelope < SERIES_FLOOR {
                    break;
                }
                sum_coeffs.push((2.0 / PI) * envelope);
            }
            Mode::Harmonic { diff_coeffs, sum_coeffs }
        } else {
            Mode::Lattice { half_window }
        };

        BayesClassifier { num_bases: m, sigma, spacing: d, mode }
    }

    /// The conditional densities (f₀(θ), f₁(θ)), each normalized to unit
    /// mass over the circle.
    pub fn densities(&self, theta: f64) -> (f64, f64) {
        match &self.mode {
            Mode::Lattice { half_window } => self.lattice_densities(theta, *half_window),
            Mode::Harmonic { diff_coeffs, sum_coeffs } => {
                self.harmonic_densities(theta, diff_coeffs, sum_coeffs)
            }
        }
    }

    /// Bayes-optimal bit guess for a measured phase; the tie f₀ = f₁
    /// resolves to 0.
    pub fn decide(&self, theta: PhaseAngle) -> u8 {
        let (f0, f1) = self.densities(theta.radians());
        u8::from(f1 > f0)
    }

    fn lattice_densities(&self, theta: f64, half_window: f64) -> (f64, f64) {
        let theta = PhaseAngle::new(theta).radians();
        let d = self.spacing;
        let j_lo = ((theta - half_window) / d).floor() as i64;
        let j_hi = ((theta + half_window) / d).ceil() as i64;
        let inv_two_sigma_sq = 1.0 / (2.0 * self.sigma * self.sigma);
        let mut f = [0.0f64; 2];
        for j in j_lo..=j_hi {
            let x = theta - j as f64 * d;
            let w = (-x * x * inv_two_sigma_sq).exp();
            f[point_bit(j, self.num_bases) as usize] += w;
        }
        let norm = 1.0 / (f64::from(self.num_bases) * self.sigma * (2.0 * PI).sqrt());
        (f[0] * norm, f[1] * norm)
    }

    fn harmonic_densities(&self, theta: f64, diff: &[f64], sum: &[f64]) -> (f64, f64) {
        // f₀ − f₁ = Σ diff[i]·cos((2i+1)(θ + d/2)), walked with a
        // rotation recurrence: one sin_cos then a complex multiply per
        // harmonic.
        let ang = theta + self.spacing / 2.0;
        let base = Complex64::new(ang.cos(), ang.sin());
        let rot = base * base;
        let mut w = base;
        let mut g = 0.0;
        for &c in diff {
            g += c * w.re;
            w *= rot;
        }
        // f₀ + f₁ = 1/π + Σ sum[i]·cos(2M(i+1)θ).
        let mut s = 1.0 / PI;
        if !sum.is_empty() {
            let step_ang = 2.0 * f64::from(self.num_bases) * theta;
            let step = Complex64::new(step_ang.cos(), step_ang.sin());
            let mut wk = step;
            for &c in sum {
                s += c * wk.re;
                wk *= step;
            }
        }
        // Rounding floor: the analytic densities are non-negative.
        (((s + g) / 2.0).max(0.0), ((s - g) / 2.0).max(0.0))
    }

    #[cfg(test)]
    fn force_lattice(params: &ChannelParams) -> Self {
        let mut c = Self::new(params);
        let sigma = c.sigma;
        let d = c.spacing;
        c.mode = Mode::Lattice { half_window: (10.0 * sigma).max(2.0 * d + 8.0 * sigma) };
        c
    }
}

/// Eve's minimum bit-error probability against uniformly random
/// (bit, basis), by adaptive quadrature of min(f₀, f₁) over [0, π]
/// (the integrand has period π).
///
/// The integration splits at the decision-boundary midpoints between
/// adjacent constellation points, then bisects adaptively to an absolute
/// tolerance of [`QUADRATURE_TOL`]; failure to converge is an error, not
/// a silently degraded value.
pub fn bayes_error_prob(params: &ChannelParams) -> Result<f64> {
    let classifier = BayesClassifier::new(params);
    let f = |theta: f64| {
        let (f0, f1) = classifier.densities(theta);
        f0.min(f1)
    };
    let m = params.num_bases() as usize;
    let d = params.point_spacing();
    let mut edges = Vec::with_capacity(m + 2);
    edges.push(0.0);
    for t in 0..m {
        edges.push(d / 2.0 + t as f64 * d);
    }
    edges.push(PI);

    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut converged = true;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let tol = QUADRATURE_TOL * (b - a) / PI;
        let out = adaptive_simpson(&f, a, b, tol);
        total += out.value;
        err_total += out.err_est;
        converged &= out.converged;
    }
    if !converged && err_total > QUADRATURE_TOL {
        return Err(Error::QuadratureFailure {
            achieved: err_total,
            requested: QUADRATURE_TOL,
        });
    }
    // The exact value cannot exceed ½ (guessing at random); quadrature
    // error must not be allowed to push it past that ceiling.
    Ok(total.min(0.5))
}

/// Eve's statistical leak per bit, t_bit = ½ − P_e.
pub fn leak_per_bit(params: &ChannelParams) -> Result<f64> {
    Ok(0.5 - bayes_error_prob(params)?)
}

/// Rényi (collision) entropy per bit of Eve's posterior,
/// −2·log2(1 − p_e). Equals exactly 2 at p_e = ½ (no information) and 0
/// at p_e = 0; rejects error rates outside [0, ½].
pub fn renyi_entropy_per_bit(p_e: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_e) {
        return Err(Error::InvalidParam(format!(
            "per-bit error probability must lie in [0, 1/2], got {p_e}"
        )));
    }
    Ok(-2.0 * (1.0 - p_e).log2())
}

/// Monte-Carlo estimate of Eve's error rate: draws `trials` uniform
/// (bit, basis) pairs, pushes each through the noisy channel and the
/// Bayes rule, and returns (error rate, binomial standard error).
///
/// A degenerate count (0 or `trials` errors) would report zero spread;
/// its standard error is widened with the add-one adjusted proportion so
/// downstream sigma gates stay meaningful.
pub fn monte_carlo_error_prob(
    params: &ChannelParams,
    trials: u64,
    rng: &mut EntropySource,
) -> (f64, f64) {
    assert!(trials > 0, "need at least one trial");
    let classifier = BayesClassifier::new(params);
    let m = params.num_bases();
    let mut errors = 0u64;
    for _ in 0..trials {
        let bit = rng.next_bit();
        let basis = BasisIndex::new(rng.gen_range(0..m));
        let sent = encode(bit, basis, params).expect("bit and basis are in range");
        let measured = sample_measured_phase(sent, params, rng);
        if classifier.decide(measured) != bit {
            errors += 1;
        }
    }
    let n = trials as f64;
    let p_hat = errors as f64 / n;
    let p_adj = if errors == 0 || errors == trials {
        (errors as f64 + 1.0) / (n + 2.0)
    } else {
        p_hat
    };
    (p_hat, (p_adj * (1.0 - p_adj) / n).sqrt())
}

/// One row of a basis-identification table: what observing phases from
/// true basis `k` tells Eve about candidate basis `guess_basis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiRow {
    pub guess_basis: u32,
    /// Unnormalized overlap kernel exp(−⟨n⟩(1 − cos(π(k − k_E)/M))).
    pub kernel: f64,
    /// Kernel normalized over all ordered basis pairs.
    pub weight: f64,
    /// Information gain in bits: H − weight·log2(1/weight).
    pub info_bits: f64,
    /// info_bits / H, clamped to [0, 1]; 1 means the candidate is fully
    /// distinguishable from the truth, the dip at k_E = k marks the
    /// residual confusion.
    pub ratio: f64,
}

/// Basis-identification table for a fixed true basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualInfoTable {
    pub true_basis: u32,
    pub num_bases: u32,
    /// Per-basis entropy budget H = log2(M)/M.
    pub per_basis_entropy: f64,
    pub rows: Vec<MiRow>,
}

impl MutualInfoTable {
    pub fn row(&self, guess_basis: u32) -> &MiRow {
        &self.rows[guess_basis as usize]
    }

    /// Largest |ratio(k+d) − ratio(k−d)| over offsets where both sides
    /// stay in range.
    pub fn max_symmetry_defect(&self) -> f64 {
        let k = self.true_basis as i64;
        let m = self.num_bases as i64;
        let mut worst = 0.0f64;
        for dist in 1..m {
            let (lo, hi) = (k - dist, k + dist);
            if lo < 0 || hi >= m {
                break;
            }
            worst = worst
                .max((self.rows[lo as usize].ratio - self.rows[hi as usize].ratio).abs());
        }
        worst
    }
}

/// Builds the basis-identification table for true basis `k`: kernel,
/// normalized weight, information gain and ratio for every candidate.
///
/// The normalization sums the kernel over all M² ordered (k, k_E)
/// pairs; the per-basis entropy budget is H = log2(M)/M.
pub fn mutual_information_table(k: BasisIndex, params: &ChannelParams) -> Result<MutualInfoTable> {
    let m = params.num_bases();
    if k.index() >= m {
        return Err(Error::InvalidParam(format!(
            "true basis {} out of range for {m} bases",
            k.index()
        )));
    }
    let n = params.mean_photon_number();
    let kernel = |delta: i64| (-n * (1.0 - (params.point_spacing() * delta as f64).cos())).exp();

    // Σ over ordered pairs, grouped by index offset u with multiplicity
    // M − |u|.
    let mut z = f64::from(m); // u = 0 contributes M·1
    for u in 1..i64::from(m) {
        z += 2.0 * (f64::from(m) - u as f64) * kernel(u);
    }

    let h = f64::from(m).log2() / f64::from(m);
    let rows = (0..m)
        .map(|ke| {
            let kern = kernel(i64::from(k.index()) - i64::from(ke));
            let weight = kern / z;
            let info = if weight > 0.0 {
                h - weight * (1.0 / weight).log2()
            } else {
                h
            };
            MiRow {
                guess_basis: ke,
                kernel: kern,
                weight,
                info_bits: info,
                ratio: (info / h).clamp(0.0, 1.0),
            }
        })
        .collect();

    Ok(MutualInfoTable {
        true_basis: k.index(),
        num_bases: m,
        per_basis_entropy: h,
        rows,
    })
}

struct QuadOutcome {
    value: f64,
    err_est: f64,
    converged: bool,
}

/// Adaptive Simpson with a forced minimum depth (so a narrow feature in
/// the first subdivision cannot fool the accept test) and a bounded
/// maximum depth.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> QuadOutcome {
    const MIN_DEPTH: u32 = 2;
    const MAX_DEPTH: u32 = 45;

    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        out: &mut QuadOutcome,
    ) {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
            out.value += left + right + delta / 15.0;
            out.err_est += delta.abs() / 15.0;
            return;
        }
        if depth >= MAX_DEPTH {
            out.value += left + right;
            out.err_est += delta.abs();
            out.converged = false;
            return;
        }
        recurse(f, a, fa, m, fm, flm, left, tol / 2.0, depth + 1, out);
        recurse(f, m, fm, b, fb, frm, right, tol / 2.0, depth + 1, out);
    }

    let mut out = QuadOutcome { value: 0.0, err_est: 0.0, converged: true };
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wheel::constellation_point;

    fn params(n: f64, m: u32) -> ChannelParams {
        ChannelParams::new(n, m).unwrap()
    }

    #[test]
    fn point_bit_rule_matches_the_encoder() {
        // The lattice evaluator's parity rule must agree with the wheel
        // map on every constellation point, for both wheel parities.
        for m in [4u32, 8, 9, 15, 16, 100] {
            let p = params(10.0, m);
            for k in 0..m {
                for bit in 0..=1u8 {
                    let pt = constellation_point(bit, BasisIndex::new(k), &p).unwrap();
                    let j = (pt.phase.radians() / p.point_spacing()).round() as i64;
                    assert_eq!(
                        point_bit(j, m),
                        bit,
                        "m = {m}, k = {k}, bit = {bit}, j = {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn densities_normalize_to_unit_mass() {
        for (n, m) in [(100.0, 8u32), (100.0, 256), (10.0, 15), (1000.0, 512)] {
            let c = BayesClassifier::new(&params(n, m));
            // Trapezoid over a fine grid is plenty for a smooth density.
            let steps = 200_000usize;
            let h = 2.0 * PI / steps as f64;
            let mut mass0 = 0.0;
            let mut mass1 = 0.0;
            for i in 0..steps {
                let (f0, f1) = c.densities(i as f64 * h);
                mass0 += f0 * h;
                mass1 += f1 * h;
            }
            assert!((mass0 - 1.0).abs() < 1e-6, "(n={n}, M={m}): mass0 = {mass0}");
            assert!((mass1 - 1.0).abs() < 1e-6, "(n={n}, M={m}): mass1 = {mass1}");
        }
    }

    #[test]
    fn lattice_and_harmonic_evaluations_agree() {
        for (n, m) in [(100.0, 256u32), (1000.0, 512), (30.0, 64), (10.0, 4096)] {
            let p = params(n, m);
            let general = BayesClassifier::new(&p);
            assert!(
                matches!(general.mode, Mode::Harmonic { .. }),
                "(n={n}, M={m}) should pick the harmonic path"
            );
            let lattice = BayesClassifier::force_lattice(&p);
            for i in 0..2000 {
                let theta = 2.0 * PI * i as f64 / 2000.0 + 1e-4;
                let (a0, a1) = general.densities(theta);
                let (b0, b1) = lattice.densities(theta);
                assert!(
                    (a0 - b0).abs() < 1e-9 && (a1 - b1).abs() < 1e-9,
                    "(n={n}, M={m}) at theta={theta}: ({a0},{a1}) vs ({b0},{b1})"
                );
            }
        }
    }

    #[test]
    fn error_prob_matches_independent_references() {
        // Values computed with an independent integrator over the same
        // closed-form densities.
        let cases = [
            (100.0, 8u32, 0.004803455755),
            (10.0, 8, 0.326975232238),
            (100.0, 64, 0.492169349550),
            (1000.0, 64, 0.267165982626),
            (100.0, 256, 0.498046875000),
            (1000.0, 512, 0.499023437500),
            (100.0, 100, 0.495),
            (100.0, 200, 0.4975),
        ];
        for (n, m, want) in cases {
            let got = bayes_error_prob(&params(n, m)).unwrap();
            assert!(
                (got - want).abs() < 2e-6,
                "(n={n}, M={m}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn error_prob_stays_in_open_interval() {
        for (n, m) in [(1000.0, 8u32), (100.0, 16), (50.0, 4096), (10.0, 15)] {
            let p = bayes_error_prob(&params(n, m)).unwrap();
            assert!(p > 0.0 && p < 0.5, "(n={n}, M={m}): p = {p}");
        }
    }

    #[test]
    fn error_prob_grows_with_bases_and_falls_with_photons() {
        let mut prev = -1.0;
        for m in [8u32, 16, 32, 64, 128, 256] {
            let p = bayes_error_prob(&params(200.0, m)).unwrap();
            assert!(p > prev, "M = {m}: {p} <= {prev}");
            prev = p;
        }
        let coarse = bayes_error_prob(&params(10.0, 64)).unwrap();
        let fine = bayes_error_prob(&params(10_000.0, 64)).unwrap();
        assert!(fine < coarse, "more photons must sharpen Eve's view");
    }

    #[test]
    fn leak_complements_error_prob() {
        let p = params(100.0, 256);
        let pe = bayes_error_prob(&p).unwrap();
        assert_eq!(leak_per_bit(&p).unwrap(), 0.5 - pe);
    }

    #[test]
    fn renyi_entropy_worked_points() {
        assert_eq!(renyi_entropy_per_bit(0.5).unwrap(), 2.0);
        assert_eq!(renyi_entropy_per_bit(0.0).unwrap(), 0.0);
        assert!((renyi_entropy_per_bit(0.25).unwrap() - 0.8300749985576874).abs() < 1e-12);
        assert!(renyi_entropy_per_bit(-0.1).is_err());
        assert!(renyi_entropy_per_bit(0.51).is_err());
        assert!(renyi_entropy_per_bit(f64::NAN).is_err());
    }

    #[test]
    fn monte_carlo_brackets_quadrature_at_moderate_noise() {
        let p = params(100.0, 64);
        let quad = bayes_error_prob(&p).unwrap();
        let mut rng = EntropySource::seeded(77);
        let (mc, se) = monte_carlo_error_prob(&p, 200_000, &mut rng);
        assert!(
            (mc - quad).abs() < 4.0 * se,
            "mc = {mc}, quad = {quad}, se = {se}"
        );
    }

    #[test]
    fn monte_carlo_guards_degenerate_spread() {
        // At ⟨n⟩ = 1000, M = 8 errors are ~1e−18: every trial succeeds,
        // and the reported spread must still be positive.
        let p = params(1000.0, 8);
        let mut rng = EntropySource::seeded(5);
        let (mc, se) = monte_carlo_error_prob(&p, 10_000, &mut rng);
        assert_eq!(mc, 0.0);
        assert!(se > 0.0);
    }

    #[test]
    fn mi_table_matches_reference_row() {
        // Independent double-sum reference: M = 100, ⟨n⟩ = 100, k = 20.
        let table =
            mutual_information_table(BasisIndex::new(20), &params(100.0, 100)).unwrap();
        assert!((table.per_basis_entropy - 0.06643856189774724).abs() < 1e-15);
        let r0 = table.row(20);
        assert!((r0.kernel - 1.0).abs() < 1e-15);
        assert!((r0.weight - 1.284154e-3).abs() < 1e-9);
        assert!((r0.ratio - 0.814350945).abs() < 1e-9);
        let r31 = table.row(31); // distance 11
        assert!((r31.ratio - 0.999051196).abs() < 1e-9);
        let r40 = table.row(40); // distance 20
        assert!((r40.ratio - 0.999999996).abs() < 1e-9);
    }

    #[test]
    fn mi_table_dips_at_truth_and_is_symmetric() {
        for m in [64u32, 100, 256] {
            let k = m / 3;
            let table =
                mutual_information_table(BasisIndex::new(k), &params(100.0, m)).unwrap();
            let dip = table.row(k).ratio;
            for row in &table.rows {
                assert!(row.ratio >= dip, "dip must be the global minimum");
                assert!((0.0..=1.0).contains(&row.ratio));
            }
            assert!(table.max_symmetry_defect() < 1e-12, "M = {m}");
        }
    }

    #[test]
    fn mi_table_rejects_out_of_range_basis() {
        assert!(mutual_information_table(BasisIndex::new(100), &params(100.0, 100)).is_err());
    }

    #[test]
    fn quadrature_handles_flat_and_spiky_integrands() {
        let flat = adaptive_simpson(&|_| 1.0, 0.0, 2.0, 1e-9);
        assert!(flat.converged && (flat.value - 2.0).abs() < 1e-12);
        // Narrow Gaussian of mass 1 centered inside the interval.
        let spike = adaptive_simpson(
            &|x: f64| (-(x - 0.5) * (x - 0.5) / (2.0 * 1e-4)).exp() / (1e-2 * (2.0 * PI).sqrt()),
            0.0,
            1.0,
            1e-8,
        );
        assert!(spike.converged, "spike must not be skipped");
        assert!((spike.value - 1.0).abs() < 1e-6, "got {}", spike.value);
    }
}
