//! Named, reproducible experiment runs.
//!
//! Every experiment is fully determined by (name, parameter overrides,
//! seed): running the same spec twice produces byte-identical output
//! files. Curve experiments emit CSV — one provenance comment line
//! (config hash, seed), one header row, then data rows — while the
//! `session` and `capture-eve` experiments emit key material, capture
//! records, and key=value reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::os::unix::net::UnixStream;
use std::path::{Path, PathBuf};

use crate::amplify::{
    eve_bound_security_margin, eve_bound_security_margin_log2, eve_entropy_gap,
    eve_entropy_gap_log2,
};
use crate::bits::pack_bits;
use crate::entropy::EntropySource;
use crate::error::{Error, Result};
use crate::eve::{
    bayes_error_prob, leak_per_bit, mutual_information_table, renyi_entropy_per_bit,
    BayesClassifier,
};
use crate::noise::{detector_counts, ChannelParams, PhaseAngle};
use crate::pool::{
    audit_pool, dims_for_session, init_session, run_session, AuditReport, LeakMode, SessionRole,
    SessionState,
};
use crate::stokes::{tan_extrema, wheel_resolution};
use crate::transport::{make_inproc_pair, make_stream_pair, shared_capture};
use crate::wheel::BasisIndex;

/// Every runnable experiment name.
pub const EXPERIMENT_NAMES: &[&str] = &[
    "fig5-leak",
    "fig6-currents",
    "fig7-renyi",
    "fig8-gap",
    "fig9-bound",
    "fig10-mi",
    "fig12-14-extrema",
    "session",
    "capture-eve",
];

/// A fully parameterized experiment invocation.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// One of [`EXPERIMENT_NAMES`].
    pub name: String,
    /// Parameter overrides; missing keys take documented defaults.
    pub params: BTreeMap<String, String>,
    /// Master seed for every random draw in the run.
    pub seed: u64,
    /// Primary output path (CSV, key file, or report, by experiment).
    pub out: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            name: name.into(),
            params: BTreeMap::new(),
            seed: 1,
            out: out.into(),
        }
    }

    /// Adds or replaces one parameter override.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.params.insert(key.into(), value.into());
        self
    }

    /// Stable 64-bit hash of the resolved configuration, stamped into
    /// every output file so artifacts are traceable to their inputs.
    pub fn config_hash(&self) -> u64 {
        let mut text = format!("name={}\nseed={}\n", self.name, self.seed);
        for (k, v) in &self.params {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        fnv1a64(text.as_bytes())
    }
}

/// FNV-1a, 64-bit: a fixed, platform-independent content hash.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Outcome of a run: where output landed, how many data rows (or
/// samples) it holds, and a one-line human summary.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: PathBuf,
    pub rows: usize,
    pub detail: String,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wrote {} ({} rows): {}",
            self.output.display(),
            self.rows,
            self.detail
        )
    }
}

/// Reads a key=value config file: one pair per line, `#` comments and
/// blank lines ignored.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParam(format!(
                "config line {}: expected key=value, got `{line}`",
                idx + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Typed access to spec parameters with unknown-key rejection.
struct ParamReader<'a> {
    spec: &'a ExperimentSpec,
}

impl<'a> ParamReader<'a> {
    fn new(spec: &'a ExperimentSpec, allowed: &[&str]) -> Result<Self> {
        for key in spec.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidParam(format!(
                    "experiment `{}` does not take parameter `{key}`; it accepts: {}",
                    spec.name,
                    allowed.join(", ")
                )));
            }
        }
        Ok(ParamReader { spec })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.spec.params.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                Error::InvalidParam(format!("parameter `{key}`: cannot parse `{raw}`"))
            }),
        }
    }

    fn text(&self, key: &str, default: &str) -> String {
        self.spec
            .params
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }
}

/// CSV assembly: provenance comment, header, rows — built in memory so
/// the file appears atomically and byte-identically per spec.
struct CsvOut {
    text: String,
    rows: usize,
}

impl CsvOut {
    fn new(spec: &ExperimentSpec, columns: &[&str]) -> Self {
        let mut text = format!(
            "# config_hash={:016x}, seed={}\n",
            spec.config_hash(),
            spec.seed
        );
        text.push_str(&columns.join(","));
        text.push('\n');
        CsvOut { text, rows: 0 }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
        self.rows += 1;
    }

    fn write(self, path: &Path) -> Result<usize> {
        fs::write(path, self.text)?;
        Ok(self.rows)
    }
}

/// Runs a named experiment, writing its output files and returning the
/// summary.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunSummary> {
    match spec.name.as_str() {
        "fig5-leak" => leak_curve(spec),
        "fig6-currents" => current_curve(spec),
        "fig7-renyi" => renyi_curve(spec),
        "fig8-gap" => hashing_gap_curve(spec),
        "fig9-bound" => margin_bound_curve(spec),
        "fig10-mi" => basis_information_table(spec),
        "fig12-14-extrema" => extrema_table(spec),
        "session" => {
            let report = run_key_session(spec)?;
            Ok(RunSummary {
                output: report.key_path.clone(),
                rows: report.rounds as usize,
                detail: format!(
                    "{} key bits over {} rounds; audit: {}",
                    report.key_bits, report.rounds, report.audit
                ),
            })
        }
        "capture-eve" => {
            let report = capture_eve(spec)?;
            Ok(RunSummary {
                output: spec.out.clone(),
                rows: report.samples,
                detail: format!(
                    "eavesdropper guessed {}/{} bits ({:.4}); channel optimum {:.4}; \
                     distance {:.2} sigma",
                    report.correct,
                    report.samples,
                    report.accuracy,
                    report.expected_accuracy,
                    report.sigma_distance
                ),
            })
        }
        other => Err(Error::InvalidParam(format!(
            "unknown experiment `{other}`; available: {}",
            EXPERIMENT_NAMES.join(", ")
        ))),
    }
}

/// Dyadic sweep M = start, 2·start, …, ≤ end.
fn dyadic_sweep(start: u32, end: u32) -> Result<Vec<u32>> {
    if start < 2 || end < start {
        return Err(Error::InvalidParam(format!(
            "sweep needs 2 <= m_min <= m_max, got {start}..{end}"
        )));
    }
    let mut ms = Vec::new();
    let mut m = start;
    while m <= end {
        ms.push(m);
        match m.checked_mul(2) {
            Some(next) => m = next,
            None => break,
        }
    }
    Ok(ms)
}

/// Per-bit eavesdropper leak versus wheel size, log-scaled.
fn leak_curve(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["n_mean", "m_min", "m_max"])?;
    let n_mean: f64 = p.parse("n_mean", 1000.0)?;
    let m_min: u32 = p.parse("m_min", 8)?;
    let m_max: u32 = p.parse("m_max", 4096)?;
    let mut csv = CsvOut::new(spec, &["basis_count", "p_e", "leak_per_bit", "log10_leak_per_bit"]);
    let mut first_last = (0.0f64, 0.0f64);
    let sweep = dyadic_sweep(m_min, m_max)?;
    for (i, &m) in sweep.iter().enumerate() {
        let params = ChannelParams::new(n_mean, m)?;
        let p_e = bayes_error_prob(&params)?;
        let leak = leak_per_bit(&params)?;
        let log_leak = leak.log10();
        if i == 0 {
            first_last.0 = log_leak;
        }
        first_last.1 = log_leak;
        csv.row(&[
            m.to_string(),
            p_e.to_string(),
            leak.to_string(),
            log_leak.to_string(),
        ]);
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!(
            "log10 leak per bit falls {:.3} -> {:.3} over M = {m_min}..{m_max}",
            first_last.0, first_last.1
        ),
    })
}

/// Interferometer port currents versus input phase.
fn current_curve(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["amplitude_sq", "delta", "points"])?;
    let amplitude_sq: f64 = p.parse("amplitude_sq", 100.0)?;
    let delta: f64 = p.parse("delta", std::f64::consts::FRAC_PI_2)?;
    let points: u32 = p.parse("points", 256)?;
    if points == 0 {
        return Err(Error::InvalidParam("points must be >= 1".into()));
    }
    let mut csv = CsvOut::new(spec, &["phi", "n_e", "n_f", "delta_i"]);
    let mut at_zero = 0.0;
    for i in 0..points {
        let phi = f64::from(i) * std::f64::consts::TAU / f64::from(points);
        let c = detector_counts(PhaseAngle::new(phi), delta, amplitude_sq);
        if i == 0 {
            at_zero = c.delta_i;
        }
        csv.row(&[
            phi.to_string(),
            c.n_e.to_string(),
            c.n_f.to_string(),
            c.delta_i.to_string(),
        ]);
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!("differential current at phi=0 is {at_zero}"),
    })
}

/// Eavesdropper collision entropy per bit versus wheel size.
fn renyi_curve(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["n_mean", "m_min", "m_max"])?;
    let n_mean: f64 = p.parse("n_mean", 100.0)?;
    let m_min: u32 = p.parse("m_min", 8)?;
    let m_max: u32 = p.parse("m_max", 8192)?;
    let mut csv = CsvOut::new(spec, &["basis_count", "p_e", "renyi_bits"]);
    let mut last = 0.0;
    for m in dyadic_sweep(m_min, m_max)? {
        let params = ChannelParams::new(n_mean, m)?;
        let p_e = bayes_error_prob(&params)?;
        let renyi = renyi_entropy_per_bit(p_e)?;
        last = renyi;
        csv.row(&[m.to_string(), p_e.to_string(), renyi.to_string()]);
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!("collision entropy reaches {last:.6} bits of 2 at M = {m_max}"),
    })
}

/// Eavesdropper information bound versus number of hashed blocks.
fn hashing_gap_curve(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["entropy_bits", "hashes_max"])?;
    let entropy_bits: u64 = p.parse("entropy_bits", 100)?;
    let hashes_max: u64 = p.parse("hashes_max", 100)?;
    if hashes_max == 0 {
        return Err(Error::InvalidParam("hashes_max must be >= 1".into()));
    }
    let mut csv = CsvOut::new(
        spec,
        &["hash_count", "log2_information_bound", "information_bound"],
    );
    for n in 1..=hashes_max {
        csv.row(&[
            n.to_string(),
            eve_entropy_gap_log2(entropy_bits, n).to_string(),
            eve_entropy_gap(entropy_bits, n).to_string(),
        ]);
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!("bound quarters per hash; log2 slope -2 from r = {entropy_bits} bits"),
    })
}

/// Eavesdropper information bound versus security margin.
fn margin_bound_curve(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["lambda_max"])?;
    let lambda_max: u32 = p.parse("lambda_max", 64)?;
    if lambda_max == 0 {
        return Err(Error::InvalidParam("lambda_max must be >= 1".into()));
    }
    let mut csv = CsvOut::new(
        spec,
        &["lambda", "information_bound", "log2_information_bound"],
    );
    for lambda in 1..=lambda_max {
        csv.row(&[
            lambda.to_string(),
            eve_bound_security_margin(lambda).to_string(),
            eve_bound_security_margin_log2(lambda).to_string(),
        ]);
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: "bound halves per unit of lambda".into(),
    })
}

/// Basis-identification information table for one true basis.
fn basis_information_table(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["n_mean", "basis_count", "true_basis"])?;
    let n_mean: f64 = p.parse("n_mean", 100.0)?;
    let basis_count: u32 = p.parse("basis_count", 100)?;
    let true_basis: u32 = p.parse("true_basis", 20)?;
    let params = ChannelParams::new(n_mean, basis_count)?;
    let table = mutual_information_table(BasisIndex::new(true_basis), &params)?;
    let mut csv = CsvOut::new(spec, &["guess_basis", "kernel", "weight", "info_bits", "ratio"]);
    for row in &table.rows {
        csv.row(&[
            row.guess_basis.to_string(),
            row.kernel.to_string(),
            row.weight.to_string(),
            row.info_bits.to_string(),
            row.ratio.to_string(),
        ]);
    }
    let dip = table.row(true_basis).ratio;
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!(
            "ratio dips to {dip:.4} at the true basis; symmetry defect {:.2e}",
            table.max_symmetry_defect()
        ),
    })
}

/// Intensity-band extrema and basis-resolution count across the wheel.
fn extrema_table(spec: &ExperimentSpec) -> Result<RunSummary> {
    let p = ParamReader::new(spec, &["n_mean", "basis_count"])?;
    let n_mean: f64 = p.parse("n_mean", 700.0)?;
    let basis_count: u32 = p.parse("basis_count", 1000)?;
    let params = ChannelParams::new(n_mean, basis_count)?;
    let mut csv = CsvOut::new(spec, &["k", "tan_max", "tan_min", "band_basis_count"]);
    let mut poles = 0usize;
    let mut band_range = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..basis_count {
        let basis = BasisIndex::new(k);
        match tan_extrema(basis, &params) {
            Ok((tan_max, tan_min)) => {
                let band = wheel_resolution(basis, &params)?;
                band_range.0 = band_range.0.min(band);
                band_range.1 = band_range.1.max(band);
                csv.row(&[
                    k.to_string(),
                    tan_max.to_string(),
                    tan_min.to_string(),
                    band.to_string(),
                ]);
            }
            Err(Error::TanPole { .. }) => poles += 1,
            Err(e) => return Err(e),
        }
    }
    let rows = csv.write(&spec.out)?;
    Ok(RunSummary {
        output: spec.out.clone(),
        rows,
        detail: format!(
            "band spans {:.3}..{:.3} bases; {poles} pole rows skipped",
            band_range.0, band_range.1
        ),
    })
}

/// Deterministic sub-seed for one named random stream of a run.
fn stream_seed(master: u64, stream: u64) -> u64 {
    // splitmix64 step keeps distinct streams decorrelated even for
    // adjacent master seeds.
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const STREAM_SHARED_POOL: u64 = 1;
const STREAM_SENDER: u64 = 2;

/// Common session wiring resolved from a spec.
struct SessionSetup {
    params: ChannelParams,
    dims: crate::amplify::RoundDims,
    t_mode: LeakMode,
    transport: String,
    alice: SessionState,
    bob: SessionState,
    alice_rng: EntropySource,
}

const SESSION_KEYS: &[&str] = &["n_mean", "M", "s", "lambda", "t_mode", "transport"];

fn session_setup(spec: &ExperimentSpec, p: &ParamReader, defaults: (f64, u32)) -> Result<SessionSetup> {
    let n_mean: f64 = p.parse("n_mean", defaults.0)?;
    let basis_count: u32 = p.parse("M", defaults.1)?;
    let s: u32 = p.parse("s", 64)?;
    let lambda: u32 = p.parse("lambda", 8)?;
    let t_mode = LeakMode::parse(&p.text("t_mode", "rate"))?;
    let transport = p.text("transport", "inproc");
    if transport != "inproc" && transport != "stream" {
        return Err(Error::InvalidParam(format!(
            "transport must be `inproc` or `stream`, got `{transport}`"
        )));
    }
    let params = ChannelParams::new(n_mean, basis_count)?;
    let m = params.bits_per_basis().ok_or_else(|| {
        Error::InvalidParam(format!(
            "session needs a power-of-two basis count, got M = {basis_count}"
        ))
    })?;
    let dims = dims_for_session(s, m, lambda, t_mode, &params)?;
    let mut pool_rng = EntropySource::seeded(stream_seed(spec.seed, STREAM_SHARED_POOL));
    let shared_c0 = pool_rng.bits(dims.bases_bits());
    let alice = init_session(SessionRole::Alice, &shared_c0, dims, params)?;
    let bob = init_session(SessionRole::Bob, &shared_c0, dims, params)?;
    let alice_rng = EntropySource::seeded(stream_seed(spec.seed, STREAM_SENDER));
    Ok(SessionSetup {
        params,
        dims,
        t_mode,
        transport,
        alice,
        bob,
        alice_rng,
    })
}

/// Outcome of a `session` run.
#[derive(Debug, Clone)]
pub struct SessionReport {
    pub rounds: u32,
    pub key_bits: usize,
    pub audit: AuditReport,
    pub key_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Appends a suffix to a path's file name.
fn path_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

/// Runs the full key-stretching session and exports the key material:
/// the distilled bits packed into raw bytes at the output path, plus a
/// key=value sidecar manifest describing the run.
pub fn run_key_session(spec: &ExperimentSpec) -> Result<SessionReport> {
    let mut keys = vec!["rounds"];
    keys.extend_from_slice(SESSION_KEYS);
    let p = ParamReader::new(spec, &keys)?;
    let rounds: u32 = p.parse("rounds", 100)?;
    let mut setup = session_setup(spec, &p, (100.0, 256))?;

    drive_rounds(&mut setup, rounds, false, None)?;
    let audit = audit_pool(&setup.alice, &setup.bob);
    let key_bits = setup.alice.pool.key_region.len();

    fs::write(&spec.out, pack_bits(&setup.alice.pool.key_region))?;
    let manifest_path = path_with_suffix(&spec.out, ".manifest");
    let manifest = format!(
        "audit_all_equal={}\nbasis_count={}\nconfig_hash={:016x}\nkey_bits={}\n\
         key_bits_per_round={}\nlambda={}\nleak_bits_per_round={}\nm={}\nn_mean={}\n\
         rounds={}\ns={}\nseed={}\nt_mode={}\ntransport={}\n",
        audit.all_equal(),
        setup.params.num_bases(),
        spec.config_hash(),
        key_bits,
        setup.dims.key_bits(),
        setup.dims.lambda,
        setup.dims.leak_whole_bits(),
        setup.dims.m,
        setup.params.mean_photon_number(),
        rounds,
        setup.dims.s,
        spec.seed,
        setup.t_mode.name(),
        setup.transport,
    );
    fs::write(&manifest_path, manifest)?;
    Ok(SessionReport {
        rounds,
        key_bits,
        audit,
        key_path: spec.out.clone(),
        manifest_path,
    })
}

/// Runs the rounds over the configured transport, optionally tapped;
/// returns the tapped phase samples when a tap was attached.
fn drive_rounds(
    setup: &mut SessionSetup,
    rounds: u32,
    with_tap: bool,
    capture_to: Option<&Path>,
) -> Result<Option<Vec<(u32, Vec<f64>)>>> {
    let capture = match capture_to {
        Some(path) => Some(shared_capture(BufWriter::new(fs::File::create(path)?))),
        None => None,
    };
    let tap_blocks = if setup.transport == "stream" {
        let (sa, sb) = UnixStream::pair().map_err(Error::Io)?;
        let mut pair = make_stream_pair(sa, sb, with_tap);
        if let Some(c) = &capture {
            pair.attach_capture(c);
        }
        let tap = pair.eavesdrop_tap.take();
        run_session(
            &mut setup.alice,
            &mut setup.alice_rng,
            &mut pair.endpoint_a,
            &mut setup.bob,
            &mut pair.endpoint_b,
            rounds,
        )?;
        drop((pair.endpoint_a, pair.endpoint_b));
        tap.map(|t| t.drain_phase_blocks()).transpose()?
    } else {
        let mut pair = make_inproc_pair(with_tap);
        if let Some(c) = &capture {
            pair.attach_capture(c);
        }
        let tap = pair.eavesdrop_tap.take();
        run_session(
            &mut setup.alice,
            &mut setup.alice_rng,
            &mut pair.endpoint_a,
            &mut setup.bob,
            &mut pair.endpoint_b,
            rounds,
        )?;
        drop((pair.endpoint_a, pair.endpoint_b));
        tap.map(|t| t.drain_phase_blocks()).transpose()?
    };
    if let Some(c) = capture {
        c.lock()
            .map_err(|_| Error::Transport("capture sink poisoned".into()))?
            .flush()?;
    }
    Ok(tap_blocks)
}

/// Outcome of a `capture-eve` run: how well a passive wire observer
/// guessed the transmitted bits without basis knowledge.
#[derive(Debug, Clone)]
pub struct CaptureEveReport {
    /// Phase samples analyzed.
    pub samples: usize,
    /// Correct bit guesses.
    pub correct: usize,
    /// Empirical guess accuracy.
    pub accuracy: f64,
    /// Channel-analysis optimum, 1 − P_e.
    pub expected_accuracy: f64,
    /// Binomial standard error at the expected accuracy.
    pub sigma: f64,
    /// |accuracy − expected| in sigma units.
    pub sigma_distance: f64,
    /// Where the session's frame capture was written.
    pub capture_path: PathBuf,
}

/// Runs a tapped session and replays the eavesdropper's best
/// single-sample strategy over every captured phase: the Bayes decision
/// with no basis knowledge. Writes the full frame capture next to the
/// report.
pub fn capture_eve(spec: &ExperimentSpec) -> Result<CaptureEveReport> {
    let mut keys = vec!["bits", "tap", "eve_model"];
    keys.extend_from_slice(SESSION_KEYS);
    let p = ParamReader::new(spec, &keys)?;
    let bits: u64 = p.parse("bits", 100_000)?;
    if bits == 0 {
        return Err(Error::InvalidParam("bits must be >= 1".into()));
    }
    let tap = p.text("tap", "on");
    if tap != "on" {
        return Err(Error::InvalidParam(
            "tap required: capture-eve analyzes tapped frames (tap=on)".into(),
        ));
    }
    let eve_model = p.text("eve_model", "shared");
    if eve_model != "shared" && eve_model != "independent" {
        return Err(Error::InvalidParam(format!(
            "eve_model must be `shared` or `independent`, got `{eve_model}`"
        )));
    }

    let mut setup = session_setup(spec, &p, (1000.0, 1024))?;
    let rounds_needed = bits.div_ceil(u64::from(setup.dims.s));
    let rounds = u32::try_from(rounds_needed)
        .map_err(|_| Error::InvalidParam(format!("bits={bits} implies too many rounds")))?;
    setup.alice.record_transmitted_bits();
    if eve_model == "independent" {
        setup.alice.set_independent_tap(true);
    }

    let capture_path = path_with_suffix(&spec.out, ".capture");
    let blocks = drive_rounds(&mut setup, rounds, true, Some(&capture_path))?
        .expect("tap was requested");

    let classifier = BayesClassifier::new(&setup.params);
    let truth = setup.alice.transmitted_bits();
    let mut samples = 0usize;
    let mut correct = 0usize;
    for (_, phases) in &blocks {
        for &phi in phases {
            if samples < truth.len() {
                let guess = classifier.decide(PhaseAngle::new(phi));
                if guess == truth[samples] {
                    correct += 1;
                }
            }
            samples += 1;
        }
    }
    if samples != truth.len() {
        return Err(Error::LengthMismatch {
            what: "tapped samples versus recorded bits",
            expected: truth.len(),
            got: samples,
        });
    }

    let expected_accuracy = 1.0 - bayes_error_prob(&setup.params)?;
    let accuracy = correct as f64 / samples as f64;
    let sigma = (expected_accuracy * (1.0 - expected_accuracy) / samples as f64)
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let report = CaptureEveReport {
        samples,
        correct,
        accuracy,
        expected_accuracy,
        sigma,
        sigma_distance: (accuracy - expected_accuracy).abs() / sigma,
        capture_path: capture_path.clone(),
    };

    let text = format!(
        "accuracy={}\ncapture_file={}\nconfig_hash={:016x}\ncorrect={}\neve_model={}\n\
         expected_accuracy={}\nsamples={}\nseed={}\nsigma={}\nsigma_distance={}\n",
        report.accuracy,
        capture_path.display(),
        spec.config_hash(),
        report.correct,
        eve_model,
        report.expected_accuracy,
        report.samples,
        spec.seed,
        report.sigma,
        report.sigma_distance,
    );
    fs::write(&spec.out, text)?;
    Ok(report)
}
