//! Command-line runner for the named experiments.
//!
//! Every run is reproducible: the same experiment, parameters, and seed
//! produce byte-identical output files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use otpb::experiments::{load_config_file, run_experiment, ExperimentSpec, EXPERIMENT_NAMES};
use otpb::Error;

const EXPERIMENTS_HELP: &str = "\
Experiments (parameters with their defaults):
  fig5-leak         per-bit leak to an eavesdropper vs wheel size
                    n_mean=1000, m_min=8, m_max=4096 (dyadic sweep)
  fig6-currents     interferometer port currents vs input phase
                    amplitude_sq=100, delta=1.5707963267948966, points=256
  fig7-renyi        eavesdropper collision entropy per bit vs wheel size
                    n_mean=100, m_min=8, m_max=8192 (dyadic sweep)
  fig8-gap          information bound vs number of hashed blocks
                    entropy_bits=100, hashes_max=100
  fig9-bound        information bound vs security margin
                    lambda_max=64
  fig10-mi          basis-identification information table
                    n_mean=100, basis_count=100, true_basis=20
  fig12-14-extrema  intensity-band extrema and basis resolution
                    n_mean=700, basis_count=1000
  session           full key-stretching session; writes packed key bits
                    plus a `.manifest` sidecar
                    n_mean=100, M=256, s=64, lambda=8, rounds=100,
                    t_mode=rate|literal, transport=inproc|stream
  capture-eve       tapped session replaying the eavesdropper's best
                    per-sample guess; writes a key=value report plus a
                    `.capture` frame log
                    n_mean=1000, M=1024, s=64, lambda=8, bits=100000,
                    tap=on, eve_model=shared|independent,
                    t_mode=rate|literal, transport=inproc|stream

Exit codes: 0 success, 2 invalid arguments, 3 numeric failure, 4 I/O error.";

/// otpb — one-time-pad booster simulator and experiment runner.
#[derive(Parser)]
#[command(name = "otpb", version, about, after_help = EXPERIMENTS_HELP)]
struct Cli {
    /// Experiment name (see the list under --help).
    experiment: String,

    /// Parameter override, repeatable: --param key=value.
    #[arg(short, long = "param", value_name = "KEY=VALUE")]
    param: Vec<String>,

    /// Master seed for every random draw (default: config file's `seed`
    /// if given, else 1).
    #[arg(long)]
    seed: Option<u64>,

    /// Output path (default: `<experiment>.csv`, or `session.key` /
    /// `capture-eve.report`).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// key=value file supplying parameter defaults; `seed` is honored
    /// unless --seed is also given. --param overrides config values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

fn default_out(experiment: &str) -> PathBuf {
    match experiment {
        "session" => PathBuf::from("session.key"),
        "capture-eve" => PathBuf::from("capture-eve.report"),
        other => PathBuf::from(format!("{other}.csv")),
    }
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, Error> {
    if !EXPERIMENT_NAMES.contains(&cli.experiment.as_str()) {
        return Err(Error::InvalidParam(format!(
            "unknown experiment `{}`; available: {}",
            cli.experiment,
            EXPERIMENT_NAMES.join(", ")
        )));
    }
    let mut spec = ExperimentSpec::new(
        cli.experiment.clone(),
        cli.out.clone().unwrap_or_else(|| default_out(&cli.experiment)),
    );
    if let Some(path) = &cli.config {
        for (key, value) in load_config_file(path)? {
            if key == "seed" {
                spec.seed = value.parse().map_err(|_| {
                    Error::InvalidParam(format!("config `seed`: cannot parse `{value}`"))
                })?;
            } else {
                spec.set(key, value);
            }
        }
    }
    for pair in &cli.param {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::InvalidParam(format!("--param expects key=value, got `{pair}`"))
        })?;
        spec.set(key.trim(), value.trim());
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build_spec(&cli).and_then(|spec| run_experiment(&spec)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("otpb: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
