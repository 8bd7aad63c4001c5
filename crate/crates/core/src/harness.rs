//! Monte Carlo experiment runner: per-trial channel draw, imperfection
//! injection, configuration, compensation, and relative-rate aggregation.
//!
//! Every evaluated configuration within a trial sees the same channel
//! realization and the same imperfection draw; each noise source reads its
//! own `(seed, trial, purpose)` stream, so enabling or disabling one label
//! never perturbs another. Trials run in parallel and aggregate in trial
//! order, making results independent of the thread count.

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::{self, ChannelSpec};
use crate::configurator::{random_compensator, random_configure, stm_configure};
use crate::error::{Error, Result};
use crate::hwi::{compose_imperfections, DeformationSpec, HwiSpec, RowMode};
use crate::ofdm::{
    coherent_upper_bound_from, relative_rate, water_filled_rate, OfdmParams, SubcarrierResponse,
};
use crate::optim::{apply_compensation, optimize_observed, OptimizerOptions};
use crate::rng::{purpose, trial_stream};
use crate::scalar::Scalar;

/// Configurations a trial can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalLabel {
    IdealStm,
    ImpairedStm,
    Compensated,
    RandomConfig,
    RandomCompensator,
}

impl EvalLabel {
    pub const ALL: [EvalLabel; 5] = [
        EvalLabel::IdealStm,
        EvalLabel::ImpairedStm,
        EvalLabel::Compensated,
        EvalLabel::RandomConfig,
        EvalLabel::RandomCompensator,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EvalLabel::IdealStm => "ideal_stm",
            EvalLabel::ImpairedStm => "impaired_stm",
            EvalLabel::Compensated => "compensated",
            EvalLabel::RandomConfig => "random_config",
            EvalLabel::RandomCompensator => "random_compensator",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        EvalLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec {
                what: "label",
                why: format!("unknown label `{s}`"),
            })
    }
}

/// Where the compensated run starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompensationInit {
    /// Imperfections applied to the strongest-tap configuration.
    #[default]
    Stm,
    /// Imperfections applied to the all-zero phase configuration; the
    /// optimizer configures the surface from scratch.
    Zero,
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec<T> {
    pub name: String,
    pub channel: ChannelSpec<T>,
    pub ofdm: OfdmParams<T>,
    pub hwi: HwiSpec<T>,
    pub optimizer: OptimizerOptions<T>,
    pub init: CompensationInit,
    pub labels: Vec<EvalLabel>,
    pub trials: u64,
    pub seed: u64,
    /// Record the per-iteration relative rate of the compensated run.
    pub record_traces: bool,
}

impl<T: Scalar> ScenarioSpec<T> {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.ofdm.validate()?;
        self.optimizer.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidSpec {
                what: "scenario",
                why: "needs at least one trial".into(),
            });
        }
        if self.labels.is_empty() {
            return Err(Error::InvalidSpec {
                what: "scenario",
                why: "needs at least one label".into(),
            });
        }
        if self.labels.contains(&EvalLabel::Compensated)
            && !self.labels.contains(&EvalLabel::IdealStm)
        {
            return Err(Error::InvalidSpec {
                what: "scenario",
                why: "compensated runs need ideal_stm as the comparison reference".into(),
            });
        }
        Ok(())
    }

    /// Deformation spec with the LOS elevations filled in from geometry.
    pub fn effective_hwi(&self) -> HwiSpec<T> {
        let mut hwi = self.hwi;
        if let Some(d) = &mut hwi.deformation {
            d.elevation_in = self.channel.los_angles_arrival().elevation;
            d.elevation_out = self.channel.los_angles_departure().elevation;
        }
        hwi
    }
}

/// Rate and relative rate of one evaluated configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelOutcome<T> {
    pub rate_bps: T,
    pub relative_rate: T,
}

/// Everything recorded about one Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord<T> {
    pub trial: u64,
    pub degenerate: bool,
    pub m_star: Option<usize>,
    pub zero_direct_tap: bool,
    pub coherent_bound_bps: T,
    pub outcomes: Vec<(EvalLabel, LabelOutcome<T>)>,
    /// Gradient iterations of the compensated run.
    pub iterations_used: usize,
    pub final_objective: Option<T>,
    /// Relative rate after each iteration (index 0 is the uncompensated
    /// starting point), when tracing is on.
    pub relative_rate_trace: Option<Vec<T>>,
    /// Objective per iteration of the compensated run, when tracing is on.
    pub objective_trace: Option<Vec<T>>,
}

impl<T: Scalar> TrialRecord<T> {
    pub fn outcome(&self, label: EvalLabel) -> Option<&LabelOutcome<T>> {
        self.outcomes
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, o)| o)
    }

    fn degenerate(trial: u64) -> Self {
        Self {
            trial,
            degenerate: true,
            m_star: None,
            zero_direct_tap: false,
            coherent_bound_bps: T::zero(),
            outcomes: Vec::new(),
            iterations_used: 0,
            final_objective: None,
            relative_rate_trace: None,
            objective_trace: None,
        }
    }
}

/// Mean and standard error of one label over the valid trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelAggregate<T> {
    pub label: EvalLabel,
    pub mean_rate_bps: T,
    pub mean_relative_rate: T,
    pub se_relative_rate: T,
    pub trials: u64,
}

/// Scenario-level results.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome<T> {
    pub records: Vec<TrialRecord<T>>,
    pub aggregates: Vec<LabelAggregate<T>>,
    /// Mean relative rate of the compensated run per iteration, each trial's
    /// trace padded with its final value; present when tracing is on.
    pub mean_relative_rate_trace: Option<Vec<T>>,
    pub degenerate_trials: u64,
}

impl<T: Scalar> ScenarioOutcome<T> {
    pub fn aggregate(&self, label: EvalLabel) -> Option<&LabelAggregate<T>> {
        self.aggregates.iter().find(|a| a.label == label)
    }
}

/// Run one Monte Carlo trial.
///
/// The coherent bound is computed once; every requested label is evaluated
/// on the same realization and the same imperfection draw, water-filling on
/// the combined channel it actually produces.
///
/// The impaired label keeps the raw imperfect coefficients. Compensation
/// (optimized or random) reprograms the phase shifters: it starts from the
/// calibrated imperfect phases and realizes unit-modulus coefficients at
/// the corrected phases, `e^{j(theta' + theta_bar)}`.
pub fn run_trial<T: Scalar>(spec: &ScenarioSpec<T>, trial: u64) -> Result<TrialRecord<T>> {
    spec.validate()?;
    let mut channel_stream = trial_stream(spec.seed, trial, purpose::CHANNEL);
    let mut psn_stream = trial_stream(spec.seed, trial, purpose::PSN);
    let mut random_config_stream = trial_stream(spec.seed, trial, purpose::RANDOM_CONFIG);
    let mut random_comp_stream = trial_stream(spec.seed, trial, purpose::RANDOM_COMPENSATOR);

    let realization = channel::realize(
        &spec.channel,
        spec.ofdm.k_subcarriers,
        spec.ofdm.bandwidth,
        &mut channel_stream,
    )?;
    if realization.is_degenerate() {
        return Ok(TrialRecord::degenerate(trial));
    }
    let ofdm = spec.ofdm.with_taps(realization.tap_count)?;
    let n = realization.n_elements();

    let stm = stm_configure(&realization)?;
    let resp = SubcarrierResponse::build(&realization, stm.config.coefficients())?;
    let bound = coherent_upper_bound_from(&resp, &ofdm)?;

    let rate_of = |omega: &[Complex<T>]| -> Result<LabelOutcome<T>> {
        let gains = resp.recombined_gains(omega)?;
        let rate = water_filled_rate(&gains, &ofdm)?;
        Ok(LabelOutcome {
            rate_bps: rate,
            relative_rate: relative_rate(rate, bound)?,
        })
    };

    // One imperfection draw per trial, shared by every label that needs it.
    let hwi = spec.effective_hwi();
    let base_phases: Vec<T> = match spec.init {
        CompensationInit::Stm => stm.config.phases().to_vec(),
        CompensationInit::Zero => vec![T::zero(); n],
    };
    let needs_imperfect = spec.labels.iter().any(|l| {
        matches!(
            l,
            EvalLabel::ImpairedStm | EvalLabel::Compensated | EvalLabel::RandomCompensator
        )
    });
    let omega_imperfect = if needs_imperfect {
        Some(compose_imperfections(
            &base_phases,
            &hwi,
            &spec.channel.geometry,
            &mut psn_stream,
        )?)
    } else {
        None
    };
    // Calibration reads the imperfect phases; reprogramming realizes them
    // (plus any compensation) at unit modulus.
    let omega_calibrated: Option<Vec<Complex<T>>> = omega_imperfect.as_ref().map(|omega| {
        omega
            .iter()
            .map(|w| Complex::from_polar(T::one(), w.arg()))
            .collect()
    });

    let mut outcomes = Vec::with_capacity(spec.labels.len());
    let mut iterations_used = 0;
    let mut final_objective = None;
    let mut trace = None;
    let mut objective_trace = None;

    for &label in &spec.labels {
        let outcome = match label {
            EvalLabel::IdealStm => rate_of(stm.config.coefficients())?,
            EvalLabel::ImpairedStm => rate_of(omega_imperfect.as_ref().unwrap())?,
            EvalLabel::Compensated => {
                let omega = omega_calibrated.as_ref().unwrap();
                let mut rel_trace = spec.record_traces.then(Vec::new);
                let out = optimize_observed(
                    &realization,
                    omega,
                    &spec.optimizer,
                    |_, phases| {
                        if let Some(trace) = rel_trace.as_mut() {
                            let applied = apply_compensation(omega, phases);
                            let outcome = rate_of(&applied).expect("trace rate");
                            trace.push(outcome.relative_rate);
                        }
                    },
                )?;
                iterations_used = out.state.iter;
                final_objective = Some(out.best_objective);
                trace = rel_trace;
                if spec.record_traces {
                    objective_trace = Some(out.state.objective_trace.clone());
                }
                rate_of(&apply_compensation(omega, &out.phases))?
            }
            EvalLabel::RandomConfig => {
                let cfg = random_configure(n, &mut random_config_stream)?;
                rate_of(cfg.coefficients())?
            }
            EvalLabel::RandomCompensator => {
                let omega = omega_calibrated.as_ref().unwrap();
                let comp = random_compensator(n, &mut random_comp_stream)?;
                rate_of(&apply_compensation(omega, &comp))?
            }
        };
        outcomes.push((label, outcome));
    }

    Ok(TrialRecord {
        trial,
        degenerate: false,
        m_star: Some(stm.m_star),
        zero_direct_tap: stm.zero_direct_tap,
        coherent_bound_bps: bound,
        outcomes,
        iterations_used,
        final_objective,
        relative_rate_trace: trace,
        objective_trace,
    })
}

/// Run all trials of a scenario and aggregate.
///
/// Trials execute in parallel; records and aggregates are reduced in trial
/// order, so the outcome is identical for any thread count.
pub fn run_scenario<T: Scalar>(spec: &ScenarioSpec<T>) -> Result<ScenarioOutcome<T>> {
    spec.validate()?;
    let records: Vec<TrialRecord<T>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, trial))
        .collect::<Result<_>>()?;

    let degenerate_trials = records.iter().filter(|r| r.degenerate).count() as u64;
    let valid: Vec<&TrialRecord<T>> = records.iter().filter(|r| !r.degenerate).collect();
    if valid.is_empty() {
        return Err(Error::NoValidTrials {
            degenerate: degenerate_trials,
        });
    }

    let n = t::<T>(valid.len() as f64);
    let mut aggregates = Vec::with_capacity(spec.labels.len());
    for &label in &spec.labels {
        let rels: Vec<T> = valid
            .iter()
            .filter_map(|r| r.outcome(label))
            .map(|o| o.relative_rate)
            .collect();
        let rates: Vec<T> = valid
            .iter()
            .filter_map(|r| r.outcome(label))
            .map(|o| o.rate_bps)
            .collect();
        let mean_rel = rels.iter().copied().sum::<T>() / n;
        let mean_rate = rates.iter().copied().sum::<T>() / n;
        let se = if rels.len() > 1 {
            let var = rels
                .iter()
                .map(|&r| (r - mean_rel) * (r - mean_rel))
                .sum::<T>()
                / t::<T>((rels.len() - 1) as f64);
            (var / n).sqrt()
        } else {
            T::zero()
        };
        aggregates.push(LabelAggregate {
            label,
            mean_rate_bps: mean_rate,
            mean_relative_rate: mean_rel,
            se_relative_rate: se,
            trials: rels.len() as u64,
        });
    }

    let mean_relative_rate_trace = if spec.record_traces {
        let longest = valid
            .iter()
            .filter_map(|r| r.relative_rate_trace.as_ref())
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        (longest > 0).then(|| {
            (0..longest)
                .map(|i| {
                    let mut acc = T::zero();
                    let mut count = 0u64;
                    for r in &valid {
                        if let Some(trace) = &r.relative_rate_trace {
                            // Stopped trials hold their final value.
                            acc += trace[i.min(trace.len() - 1)];
                            count += 1;
                        }
                    }
                    acc / t::<T>(count as f64)
                })
                .collect()
        })
    } else {
        None
    };

    Ok(ScenarioOutcome {
        records,
        aggregates,
        mean_relative_rate_trace,
        degenerate_trials,
    })
}

fn t<T: Scalar>(x: f64) -> T {
    T::from_f64_lossy(x)
}

/// Numeric parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Total reflector count; factored into the squarest possible grid.
    Reflectors,
    /// PSN intensity.
    Epsilon,
    /// Deformation peak height over wavelength.
    HMaxOverLambda,
    /// Deformation peak count in units of pi.
    KPeaks,
    /// Subcarrier count.
    Subcarriers,
    /// Optimizer learning rate.
    Gamma,
    /// Trial count.
    Trials,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "n_reflectors" => SweepAxis::Reflectors,
            "epsilon" | "rho" => SweepAxis::Epsilon,
            "h_max_over_lambda" => SweepAxis::HMaxOverLambda,
            "k_peaks" => SweepAxis::KPeaks,
            "k_subcarriers" => SweepAxis::Subcarriers,
            "gamma" => SweepAxis::Gamma,
            "trials" => SweepAxis::Trials,
            other => return Err(Error::UnknownAxis(other.into())),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Reflectors => "n_reflectors",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::HMaxOverLambda => "h_max_over_lambda",
            SweepAxis::KPeaks => "k_peaks",
            SweepAxis::Subcarriers => "k_subcarriers",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Trials => "trials",
        }
    }
}

/// Factor `n` into the squarest `rows x cols` grid with `rows <= cols`.
pub fn near_square_grid(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt().floor() as usize;
    rows = rows.max(1);
    while !n.is_multiple_of(rows) {
        rows -= 1;
    }
    (rows, n / rows)
}

/// Scenario with one parameter replaced by a swept value.
pub fn apply_axis<T: Scalar>(
    base: &ScenarioSpec<T>,
    axis: SweepAxis,
    value: f64,
) -> Result<ScenarioSpec<T>> {
    let mut spec = base.clone();
    match axis {
        SweepAxis::Reflectors => {
            let n = value as usize;
            if n == 0 || (value - n as f64).abs() > 0.0 {
                return Err(Error::InvalidSpec {
                    what: "sweep",
                    why: format!("n_reflectors must be a positive integer, got {value}"),
                });
            }
            let (rows, cols) = near_square_grid(n);
            let g = &base.channel.geometry;
            spec.channel.geometry =
                crate::channel::RisGeometry::new(rows, cols, g.d_h(), g.d_v(), g.carrier_hz())?;
        }
        SweepAxis::Epsilon => {
            spec.hwi.psn = Some(crate::hwi::PsnSpec::new(t::<T>(value))?);
        }
        SweepAxis::HMaxOverLambda => {
            let d = spec.hwi.deformation.unwrap_or(default_deformation());
            spec.hwi.deformation = Some(DeformationSpec {
                h_max_over_lambda: t::<T>(value),
                ..d
            });
        }
        SweepAxis::KPeaks => {
            let d = spec.hwi.deformation.unwrap_or(default_deformation());
            spec.hwi.deformation = Some(DeformationSpec {
                peak_k: t::<T>(value) * T::PI(),
                ..d
            });
        }
        SweepAxis::Subcarriers => {
            let k = value as usize;
            if k == 0 || (value - k as f64).abs() > 0.0 {
                return Err(Error::InvalidSpec {
                    what: "sweep",
                    why: format!("k_subcarriers must be a positive integer, got {value}"),
                });
            }
            spec.ofdm.k_subcarriers = k;
        }
        SweepAxis::Gamma => {
            spec.optimizer.learning_rate = t::<T>(value);
        }
        SweepAxis::Trials => {
            let trials = value as u64;
            if trials == 0 || (value - trials as f64).abs() > 0.0 {
                return Err(Error::InvalidSpec {
                    what: "sweep",
                    why: format!("trials must be a positive integer, got {value}"),
                });
            }
            spec.trials = trials;
        }
    }
    Ok(spec)
}

fn default_deformation<T: Scalar>() -> DeformationSpec<T> {
    DeformationSpec {
        h_max_over_lambda: T::zero(),
        peak_k: T::PI(),
        elevation_in: T::zero(),
        elevation_out: T::zero(),
        row_mode: RowMode::Floor,
    }
}

/// Run one scenario per swept value under a common seed policy, so only the
/// swept parameter varies between runs.
pub fn sweep<T: Scalar>(
    base: &ScenarioSpec<T>,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<(f64, ScenarioOutcome<T>)>> {
    values
        .iter()
        .map(|&value| Ok((value, run_scenario(&apply_axis(base, axis, value)?)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::RisGeometry;
    use crate::hwi::PsnSpec;

    pub(crate) fn desk_spec(n_rows: usize, n_cols: usize, trials: u64) -> ScenarioSpec<f64> {
        let geometry =
            RisGeometry::with_spacing_over_lambda(n_rows, n_cols, 0.25, 3.0e9).unwrap();
        ScenarioSpec {
            name: "test".into(),
            channel: ChannelSpec {
                geometry,
                ap_position: polar(50.0, -30f64.to_radians()),
                ue_position: polar(20.0, 40f64.to_radians()),
                paths_ap_ris: 7,
                paths_ris_ue: 5,
                paths_direct: 6,
                kappa_nlos: 0.1,
                direct_rel_db: -20.0,
            },
            ofdm: OfdmParams {
                k_subcarriers: 64,
                bandwidth: 10.5e6,
                noise_density: dbm_per_hz_to_w(-164.0),
                mean_power: dbm_to_w(30.0),
            },
            hwi: HwiSpec::none(),
            optimizer: OptimizerOptions::default(),
            init: CompensationInit::Stm,
            labels: vec![EvalLabel::IdealStm],
            trials,
            seed: 42,
            record_traces: false,
        }
    }

    fn polar(d: f64, az: f64) -> [f64; 3] {
        [d * az.sin(), d * az.cos(), 0.0]
    }

    fn dbm_to_w(dbm: f64) -> f64 {
        10f64.powf((dbm - 30.0) / 10.0)
    }

    fn dbm_per_hz_to_w(dbm: f64) -> f64 {
        dbm_to_w(dbm)
    }

    #[test]
    fn trial_is_deterministic() {
        let mut spec = desk_spec(4, 4, 1);
        spec.labels = vec![
            EvalLabel::IdealStm,
            EvalLabel::ImpairedStm,
            EvalLabel::Compensated,
            EvalLabel::RandomConfig,
            EvalLabel::RandomCompensator,
        ];
        spec.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
        let a = run_trial(&spec, 3).unwrap();
        let b = run_trial(&spec, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_imperfection_makes_impaired_equal_ideal() {
        let mut spec = desk_spec(4, 4, 1);
        spec.labels = vec![EvalLabel::IdealStm, EvalLabel::ImpairedStm];
        let record = run_trial(&spec, 0).unwrap();
        let ideal = record.outcome(EvalLabel::IdealStm).unwrap();
        let impaired = record.outcome(EvalLabel::ImpairedStm).unwrap();
        assert_eq!(ideal.rate_bps, impaired.rate_bps);
        assert_eq!(ideal.relative_rate, impaired.relative_rate);
    }

    #[test]
    fn label_subsets_share_draws() {
        // Evaluating extra labels must not change the draws any label sees.
        let mut all = desk_spec(4, 4, 1);
        all.labels = vec![
            EvalLabel::IdealStm,
            EvalLabel::ImpairedStm,
            EvalLabel::Compensated,
            EvalLabel::RandomConfig,
        ];
        all.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
        let mut only_ideal = all.clone();
        only_ideal.labels = vec![EvalLabel::IdealStm];
        let full = run_trial(&all, 7).unwrap();
        let lone = run_trial(&only_ideal, 7).unwrap();
        assert_eq!(
            full.outcome(EvalLabel::IdealStm),
            lone.outcome(EvalLabel::IdealStm)
        );
    }

    #[test]
    fn psn_degrades_most_trials() {
        let mut spec = desk_spec(4, 4, 1);
        spec.labels = vec![EvalLabel::IdealStm, EvalLabel::ImpairedStm];
        spec.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
        let trials = 200;
        let mut degraded = 0;
        for trial in 0..trials {
            let r = run_trial(&spec, trial).unwrap();
            let ideal = r.outcome(EvalLabel::IdealStm).unwrap().relative_rate;
            let impaired = r.outcome(EvalLabel::ImpairedStm).unwrap().relative_rate;
            if ideal >= impaired {
                degraded += 1;
            }
        }
        assert!(
            degraded as f64 >= 0.95 * trials as f64,
            "ideal >= impaired on only {degraded}/{trials} trials"
        );
    }

    #[test]
    fn random_compensation_degrades_an_ideal_configuration() {
        let mut spec = desk_spec(4, 4, 50);
        spec.hwi.psn = Some(PsnSpec::new(1.0).unwrap()); // imperfection-free base
        spec.labels = vec![EvalLabel::IdealStm, EvalLabel::RandomCompensator];
        let out = run_scenario(&spec).unwrap();
        let ideal = out.aggregate(EvalLabel::IdealStm).unwrap().mean_relative_rate;
        let random = out
            .aggregate(EvalLabel::RandomCompensator)
            .unwrap()
            .mean_relative_rate;
        assert!(
            random < ideal,
            "random compensator {random} should degrade ideal {ideal}"
        );
    }

    #[test]
    fn compensated_requires_ideal_reference() {
        let mut spec = desk_spec(2, 2, 1);
        spec.labels = vec![EvalLabel::Compensated];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn single_trial_aggregate_echoes_record() {
        let spec = desk_spec(3, 3, 1);
        let out = run_scenario(&spec).unwrap();
        assert_eq!(out.records.len(), 1);
        let agg = out.aggregate(EvalLabel::IdealStm).unwrap();
        let rec = out.records[0].outcome(EvalLabel::IdealStm).unwrap();
        assert_eq!(agg.mean_relative_rate, rec.relative_rate);
        assert_eq!(agg.se_relative_rate, 0.0);
    }

    #[test]
    fn standard_error_shrinks_with_trials() {
        let mut spec = desk_spec(4, 4, 120);
        spec.labels = vec![EvalLabel::IdealStm, EvalLabel::RandomConfig];
        let small = run_scenario(&spec).unwrap();
        spec.trials = 240;
        let large = run_scenario(&spec).unwrap();
        let se_small = small
            .aggregate(EvalLabel::RandomConfig)
            .unwrap()
            .se_relative_rate;
        let se_large = large
            .aggregate(EvalLabel::RandomConfig)
            .unwrap()
            .se_relative_rate;
        let ratio = se_large / se_small;
        // Expect roughly 1/sqrt(2), with slack for estimation noise.
        assert!(
            (0.5..0.95).contains(&ratio),
            "SE ratio {ratio} (small {se_small}, large {se_large})"
        );
    }

    #[test]
    fn outcome_is_thread_count_invariant() {
        let mut spec = desk_spec(4, 4, 24);
        spec.labels = vec![EvalLabel::IdealStm, EvalLabel::ImpairedStm];
        spec.hwi.psn = Some(PsnSpec::new(0.5).unwrap());
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_scenario(&spec))
            .unwrap();
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_scenario(&spec))
            .unwrap();
        assert_eq!(single, parallel);
    }

    #[test]
    fn sweep_varies_only_the_axis() {
        let spec = desk_spec(4, 4, 2);
        let swept = sweep(&spec, SweepAxis::Reflectors, &[16.0, 36.0]).unwrap();
        assert_eq!(swept.len(), 2);
        // Same seed: trial 0 channel streams coincide, so the direct-channel
        // draw (independent of N) yields the same direct rate ordering.
        assert_eq!(swept[0].1.records.len(), 2);
        assert_eq!(swept[1].1.records.len(), 2);
    }

    #[test]
    fn sweep_rejects_unknown_axis() {
        assert!(matches!(
            SweepAxis::parse("bananas"),
            Err(Error::UnknownAxis(_))
        ));
    }

    #[test]
    fn near_square_grid_factors() {
        assert_eq!(near_square_grid(16), (4, 4));
        assert_eq!(near_square_grid(100), (10, 10));
        assert_eq!(near_square_grid(12), (3, 4));
        assert_eq!(near_square_grid(13), (1, 13));
        assert_eq!(near_square_grid(1), (1, 1));
    }

    #[test]
    fn degenerate_trials_are_skipped_not_fatal() {
        // A direct way to exercise the policy: zero trials never happens in
        // practice, so check the counting path via the error contract.
        let spec = desk_spec(2, 2, 1);
        let out = run_scenario(&spec).unwrap();
        assert_eq!(out.degenerate_trials, 0);
    }
}
