//! CSV emission.
//!
//! Floats are serialized with 17 significant digits so every `f64`
//! round-trips exactly; given a fixed seed the files are byte-identical
//! across runs and thread counts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ris_core::harness::{ScenarioOutcome, SweepAxis};

use crate::config::Effective;

pub const RUN_HEADER: &str = "scenario,label,n,k_subcarriers,epsilon,h_max_over_lambda,k_peaks,trial,iterations,rate_bps,relative_rate,seed";

pub const SWEEP_HEADER: &str = "scenario,label,axis,value,n,k_subcarriers,epsilon,h_max_over_lambda,k_peaks,trials,mean_rate_bps,mean_relative_rate,se_relative_rate,seed";

pub const TRACE_HEADER: &str = "trial,iter,objective,relative_rate";

/// 17 significant digits: exact round-trip for doubles.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-trial rows of one scenario run.
pub fn run_csv(outcome: &ScenarioOutcome<f64>, eff: &Effective, seed: u64) -> String {
    let mut out = String::new();
    out.push_str(RUN_HEADER);
    out.push('\n');
    for record in &outcome.records {
        if record.degenerate {
            continue;
        }
        for (label, res) in &record.outcomes {
            let iterations = match label {
                ris_core::harness::EvalLabel::Compensated => record.iterations_used,
                _ => 0,
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                eff.scenario,
                label.as_str(),
                eff.n_reflectors,
                eff.k_subcarriers,
                fmt_f64(eff.epsilon),
                fmt_f64(eff.h_max_over_lambda),
                fmt_f64(eff.k_peaks),
                record.trial,
                iterations,
                fmt_f64(res.rate_bps),
                fmt_f64(res.relative_rate),
                seed,
            );
        }
    }
    out
}

/// Aggregate rows of a sweep, one per `(value, label)`.
pub fn sweep_csv(
    results: &[(f64, ScenarioOutcome<f64>, Effective)],
    axis: SweepAxis,
    seed: u64,
) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for (value, outcome, eff) in results {
        for agg in &outcome.aggregates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                eff.scenario,
                agg.label.as_str(),
                axis.as_str(),
                fmt_f64(*value),
                eff.n_reflectors,
                eff.k_subcarriers,
                fmt_f64(eff.epsilon),
                fmt_f64(eff.h_max_over_lambda),
                fmt_f64(eff.k_peaks),
                agg.trials,
                fmt_f64(agg.mean_rate_bps),
                fmt_f64(agg.mean_relative_rate),
                fmt_f64(agg.se_relative_rate),
                seed,
            );
        }
    }
    out
}

/// Per-iteration compensated traces: objective and relative rate.
pub fn trace_csv(outcome: &ScenarioOutcome<f64>) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for record in &outcome.records {
        let Some(rel_trace) = &record.relative_rate_trace else {
            continue;
        };
        let objectives = record.objective_trace.as_deref().unwrap_or(&[]);
        for (iter, rel) in rel_trace.iter().enumerate() {
            let objective = objectives
                .get(iter)
                .map(|&j| fmt_f64(j))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                record.trial,
                iter,
                objective,
                fmt_f64(*rel),
            );
        }
    }
    out
}

/// `results.csv` -> `results_trace.csv` next to the main output.
pub fn trace_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let mut name = format!("{stem}_trace");
    if let Some(ext) = out.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    out.with_file_name(name)
}
