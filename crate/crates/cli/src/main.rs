//! `ris-sim`: command-line front end for the RIS hardware-imperfection
//! simulator.
//!
//! Subcommands:
//! - `run` executes one Monte Carlo scenario and writes per-trial CSV rows;
//! - `sweep` repeats a scenario along one numeric axis and writes aggregate
//!   rows;
//! - `gradcheck` verifies the analytic gradient against central finite
//!   differences on a synthetic instance.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex;

use ris_core::harness::{run_scenario, sweep, SweepAxis};
use ris_core::hwi::{apply_psn, PsnSpec};
use ris_core::optim::{finite_difference_gradient, gradient, max_relative_gradient_error};
use ris_core::rng::RandomStream;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "ris-sim", version, about = "RIS-aided OFDM link simulator with hardware-imperfection compensation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write per-trial results.
    Run {
        /// Scenario JSON (strict keys; missing sections use desk defaults).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial-count override.
        #[arg(long)]
        trials: Option<u64>,
        /// Also write per-iteration compensated traces to `<out>_trace.csv`.
        #[arg(long)]
        trace: bool,
        /// Full-size experiment: K = 700, L_a = 101, L_b = 51, L_d = 100.
        #[arg(long = "paper-scale")]
        paper_scale: bool,
    },
    /// Sweep one numeric parameter and write aggregate results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Axis: n_reflectors | epsilon | h_max_over_lambda | k_peaks |
        /// k_subcarriers | gamma | trials.
        #[arg(long)]
        axis: String,
        /// Comma-separated numeric values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long = "paper-scale")]
        paper_scale: bool,
    },
    /// Compare the analytic gradient with central finite differences.
    Gradcheck {
        /// Reflector count (<= 64).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Subcarrier count (<= 64).
        #[arg(long, default_value_t = 16)]
        k: usize,
        /// Acceptance threshold on the max relative error.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn config_error(err: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {err}");
    ExitCode::from(2)
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            trials,
            trace,
            paper_scale,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(text) => text,
                Err(err) => return Ok(config_error(format_args!("{}: {err}", config.display()))),
            };
            let parsed = match RunConfig::from_json(&text) {
                Ok(parsed) => parsed,
                Err(err) => return Ok(config_error(err)),
            };
            let (scenario, effective) = match parsed.to_scenario(seed, trials, paper_scale, trace)
            {
                Ok(resolved) => resolved,
                Err(err) => return Ok(config_error(err)),
            };
            let outcome = run_scenario(&scenario)?;
            std::fs::write(&out, output::run_csv(&outcome, &effective, scenario.seed))?;
            let mut written = vec![out.display().to_string()];
            if trace {
                let path = output::trace_path(&out);
                std::fs::write(&path, output::trace_csv(&outcome))?;
                written.push(path.display().to_string());
            }
            if outcome.degenerate_trials > 0 {
                eprintln!(
                    "note: {} degenerate trials skipped in aggregates",
                    outcome.degenerate_trials
                );
            }
            println!(
                "wrote {} ({} trials x {} labels)",
                written.join(" and "),
                scenario.trials,
                scenario.labels.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            config,
            axis,
            values,
            out,
            seed,
            trials,
            paper_scale,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(text) => text,
                Err(err) => return Ok(config_error(format_args!("{}: {err}", config.display()))),
            };
            let parsed = match RunConfig::from_json(&text) {
                Ok(parsed) => parsed,
                Err(err) => return Ok(config_error(err)),
            };
            let axis = match SweepAxis::parse(&axis) {
                Ok(axis) => axis,
                Err(err) => return Ok(config_error(err)),
            };
            let (base, _) = match parsed.to_scenario(seed, trials, paper_scale, false) {
                Ok(resolved) => resolved,
                Err(err) => return Ok(config_error(err)),
            };
            let results = sweep(&base, axis, &values)?;
            // Echo the effective per-value settings for the CSV.
            let rows: Vec<_> = results
                .into_iter()
                .map(|(value, outcome)| {
                    let spec = ris_core::harness::apply_axis(&base, axis, value)
                        .expect("axis already applied once");
                    let eff = config::Effective {
                        scenario: spec.name.clone(),
                        n_reflectors: spec.channel.geometry.n_elements(),
                        k_subcarriers: spec.ofdm.k_subcarriers,
                        epsilon: spec.hwi.psn.map(|p| p.epsilon()).unwrap_or(1.0),
                        h_max_over_lambda: spec
                            .hwi
                            .deformation
                            .map(|d| d.h_max_over_lambda)
                            .unwrap_or(0.0),
                        k_peaks: spec
                            .hwi
                            .deformation
                            .map(|d| d.peak_k / std::f64::consts::PI)
                            .unwrap_or(config::defaults::K_PEAKS),
                    };
                    (value, outcome, eff)
                })
                .collect();
            std::fs::write(&out, output::sweep_csv(&rows, axis, base.seed))?;
            println!(
                "wrote {} ({} values x {} labels)",
                out.display(),
                rows.len(),
                base.labels.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Gradcheck { n, k, tol, seed } => {
            if n == 0 || n > 64 || k == 0 || k > 64 {
                return Ok(config_error("gradcheck expects 1 <= n <= 64 and 1 <= k <= 64"));
            }
            let error = gradcheck_error(n, k, seed)?;
            println!("max relative gradient error: {}", output::fmt_f64(error));
            if error <= tol {
                println!("gradcheck OK (tolerance {})", output::fmt_f64(tol));
                Ok(ExitCode::SUCCESS)
            } else {
                println!("gradcheck FAILED (tolerance {})", output::fmt_f64(tol));
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// Max relative error between the analytic gradient and central finite
/// differences on a synthetic dense instance.
fn gradcheck_error(n: usize, k: usize, seed: u64) -> anyhow::Result<f64> {
    let mut stream = RandomStream::new(seed, 0);
    let m = k.clamp(1, 6);
    let mut direct = vec![Complex::new(0.0, 0.0); k];
    for tap in direct.iter_mut().take(m) {
        *tap = Complex::new(stream.standard_normal(), stream.standard_normal());
    }
    let composite: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|_| {
            let mut row = vec![Complex::new(0.0, 0.0); k];
            for tap in row.iter_mut().take(m) {
                *tap = Complex::new(stream.standard_normal(), stream.standard_normal());
            }
            row
        })
        .collect();
    let ch = ris_core::channel::ChannelRealization {
        direct_taps: direct,
        composite_taps: composite,
        tap_count: m,
    };

    // Imperfect configuration: PSN over random unit phasors.
    let ideal: Vec<Complex<f64>> = (0..n)
        .map(|_| {
            Ok::<_, ris_core::Error>(Complex::from_polar(
                1.0,
                stream.uniform(-std::f64::consts::PI, std::f64::consts::PI)?,
            ))
        })
        .collect::<Result<_, _>>()?;
    let omega = apply_psn(&ideal, &PsnSpec::new(0.7)?, &mut stream);
    let theta: Vec<f64> = (0..n)
        .map(|_| stream.uniform(-1.0, 1.0))
        .collect::<Result<_, _>>()?;

    let analytic = gradient(&ch, &omega, &theta)?;
    let reference = finite_difference_gradient(&ch, &omega, &theta, 1e-5)?;
    Ok(max_relative_gradient_error(&analytic, &reference))
}
