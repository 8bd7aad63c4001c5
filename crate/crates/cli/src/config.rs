//! Strict JSON scenario configuration.
//!
//! Every section and key is optional and falls back to the desk-scale
//! defaults below; unknown keys are rejected so a typo cannot silently run
//! the wrong experiment. All dB/dBm quantities are converted to SI at this
//! boundary.

use anyhow::{anyhow, bail, Result};
use serde::Deserialize;

use ris_core::channel::{ChannelSpec, RisGeometry};
use ris_core::dbm_to_watts;
use ris_core::harness::{CompensationInit, EvalLabel, ScenarioSpec};
use ris_core::hwi::{DeformationSpec, HwiSpec, PsnSpec, RowMode};
use ris_core::ofdm::OfdmParams;
use ris_core::optim::{Method, OptimizerOptions};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub channel: Option<ChannelConfig>,
    pub ofdm: Option<OfdmConfig>,
    pub hwi: Option<HwiConfig>,
    pub optimizer: Option<OptimizerConfig>,
    pub labels: Option<Vec<String>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub n_rows: Option<usize>,
    pub n_cols: Option<usize>,
    pub d_over_lambda: Option<f64>,
    pub f_c_hz: Option<f64>,
    pub ap_pos_m: Option<[f64; 3]>,
    pub ue_pos_m: Option<[f64; 3]>,
    #[serde(rename = "L_a")]
    pub l_a: Option<usize>,
    #[serde(rename = "L_b")]
    pub l_b: Option<usize>,
    #[serde(rename = "L_d")]
    pub l_d: Option<usize>,
    pub kappa_nlos: Option<f64>,
    pub direct_rel_db: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmConfig {
    pub k_subcarriers: Option<usize>,
    pub b_hz: Option<f64>,
    pub n0_dbm_hz: Option<f64>,
    pub p_dbm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HwiConfig {
    /// PSN intensity; the literature also calls this `rho`.
    #[serde(alias = "rho")]
    pub epsilon: Option<f64>,
    pub h_max_over_lambda: Option<f64>,
    /// Deformation peak count in units of pi.
    pub k_peaks: Option<f64>,
    /// `floor` (whole rows deform together) or `round` (literal rounding).
    pub row_mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    /// `gd` or `adam`.
    pub optimizer: Option<String>,
    pub gamma: Option<f64>,
    pub max_iters: Option<usize>,
    pub stop_rel_tol: Option<f64>,
    pub stop_window: Option<usize>,
    /// `stm` (compensate an impaired STM configuration) or `zero`
    /// (configure from scratch).
    pub init: Option<String>,
}

/// Desk-scale defaults; `--paper-scale` switches the starred ones to the
/// full-size experiment (K = 700, L_a = 101, L_b = 51, L_d = 100).
pub mod defaults {
    pub const N_ROWS: usize = 10;
    pub const N_COLS: usize = 10;
    pub const D_OVER_LAMBDA: f64 = 0.25;
    pub const F_C_HZ: f64 = 3.0e9;
    pub const AP_DISTANCE_M: f64 = 50.0;
    pub const AP_AZIMUTH_DEG: f64 = -30.0;
    pub const UE_DISTANCE_M: f64 = 20.0;
    pub const UE_AZIMUTH_DEG: f64 = 40.0;
    pub const L_A: usize = 21;
    pub const L_B: usize = 11;
    pub const L_D: usize = 20;
    pub const KAPPA_NLOS: f64 = 0.1;
    pub const DIRECT_REL_DB: f64 = -20.0;
    pub const K_SUBCARRIERS: usize = 128;
    pub const B_HZ: f64 = 10.5e6;
    pub const N0_DBM_HZ: f64 = -164.0;
    pub const P_DBM: f64 = 30.0;
    pub const K_PEAKS: f64 = 1.0;
    pub const TRIALS: u64 = 100;
    pub const SEED: u64 = 42;

    pub const PAPER_K_SUBCARRIERS: usize = 700;
    pub const PAPER_L_A: usize = 101;
    pub const PAPER_L_B: usize = 51;
    pub const PAPER_L_D: usize = 100;

    pub fn position(distance_m: f64, azimuth_deg: f64) -> [f64; 3] {
        let az = azimuth_deg.to_radians();
        [distance_m * az.sin(), distance_m * az.cos(), 0.0]
    }
}

/// Effective per-run settings echoed into the CSV.
#[derive(Debug, Clone)]
pub struct Effective {
    pub scenario: String,
    pub n_reflectors: usize,
    pub k_subcarriers: usize,
    pub epsilon: f64,
    pub h_max_over_lambda: f64,
    pub k_peaks: f64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Resolve the configuration into a scenario, applying CLI overrides.
    pub fn to_scenario(
        &self,
        seed: Option<u64>,
        trials: Option<u64>,
        paper_scale: bool,
        record_traces: bool,
    ) -> Result<(ScenarioSpec<f64>, Effective)> {
        let ch = self.channel.clone().unwrap_or_default();
        let ofdm = self.ofdm.clone().unwrap_or_default();
        let hwi = self.hwi.clone().unwrap_or_default();
        let opt = self.optimizer.clone().unwrap_or_default();

        let f_c = ch.f_c_hz.unwrap_or(defaults::F_C_HZ);
        let geometry = RisGeometry::with_spacing_over_lambda(
            ch.n_rows.unwrap_or(defaults::N_ROWS),
            ch.n_cols.unwrap_or(defaults::N_COLS),
            ch.d_over_lambda.unwrap_or(defaults::D_OVER_LAMBDA),
            f_c,
        )?;
        let channel = ChannelSpec {
            geometry,
            ap_position: ch.ap_pos_m.unwrap_or(defaults::position(
                defaults::AP_DISTANCE_M,
                defaults::AP_AZIMUTH_DEG,
            )),
            ue_position: ch.ue_pos_m.unwrap_or(defaults::position(
                defaults::UE_DISTANCE_M,
                defaults::UE_AZIMUTH_DEG,
            )),
            paths_ap_ris: if paper_scale {
                defaults::PAPER_L_A
            } else {
                ch.l_a.unwrap_or(defaults::L_A)
            },
            paths_ris_ue: if paper_scale {
                defaults::PAPER_L_B
            } else {
                ch.l_b.unwrap_or(defaults::L_B)
            },
            paths_direct: if paper_scale {
                defaults::PAPER_L_D
            } else {
                ch.l_d.unwrap_or(defaults::L_D)
            },
            kappa_nlos: ch.kappa_nlos.unwrap_or(defaults::KAPPA_NLOS),
            direct_rel_db: ch.direct_rel_db.unwrap_or(defaults::DIRECT_REL_DB),
        };

        let ofdm_params = OfdmParams {
            k_subcarriers: if paper_scale {
                defaults::PAPER_K_SUBCARRIERS
            } else {
                ofdm.k_subcarriers.unwrap_or(defaults::K_SUBCARRIERS)
            },
            bandwidth: ofdm.b_hz.unwrap_or(defaults::B_HZ),
            noise_density: dbm_to_watts(ofdm.n0_dbm_hz.unwrap_or(defaults::N0_DBM_HZ)),
            mean_power: dbm_to_watts(ofdm.p_dbm.unwrap_or(defaults::P_DBM)),
        };

        let k_peaks = hwi.k_peaks.unwrap_or(defaults::K_PEAKS);
        let row_mode = match hwi.row_mode.as_deref() {
            None | Some("floor") => RowMode::Floor,
            Some("round") => RowMode::Round,
            Some(other) => bail!("unknown row_mode `{other}` (expected `floor` or `round`)"),
        };
        let hwi_spec = HwiSpec {
            psn: hwi.epsilon.map(PsnSpec::new).transpose()?,
            deformation: hwi
                .h_max_over_lambda
                .map(|h| {
                    // LOS elevations are filled in from geometry by the
                    // harness.
                    DeformationSpec::new(h, k_peaks * std::f64::consts::PI, 0.0, 0.0, row_mode)
                })
                .transpose()?,
        };

        let method = match opt.optimizer.as_deref() {
            None | Some("gd") => Method::Gd,
            Some("adam") => Method::Adam,
            Some(other) => bail!("unknown optimizer `{other}` (expected `gd` or `adam`)"),
        };
        let init = match opt.init.as_deref() {
            None | Some("stm") => CompensationInit::Stm,
            Some("zero") => CompensationInit::Zero,
            Some(other) => bail!("unknown init `{other}` (expected `stm` or `zero`)"),
        };
        let optimizer_defaults = OptimizerOptions::<f64>::default();
        let optimizer = OptimizerOptions {
            method,
            learning_rate: opt.gamma.unwrap_or(optimizer_defaults.learning_rate),
            max_iters: opt.max_iters.unwrap_or(optimizer_defaults.max_iters),
            stop_rel_tol: opt.stop_rel_tol.unwrap_or(optimizer_defaults.stop_rel_tol),
            stop_window: opt.stop_window.unwrap_or(optimizer_defaults.stop_window),
            ..optimizer_defaults
        };

        let labels = match &self.labels {
            Some(names) => names
                .iter()
                .map(|name| EvalLabel::parse(name).map_err(|e| anyhow!(e)))
                .collect::<Result<Vec<_>>>()?,
            None => EvalLabel::ALL.to_vec(),
        };

        let scenario = ScenarioSpec {
            name: self.scenario.clone().unwrap_or_else(|| "scenario".into()),
            channel,
            ofdm: ofdm_params,
            hwi: hwi_spec,
            optimizer,
            init,
            labels,
            trials: trials.or(self.trials).unwrap_or(defaults::TRIALS),
            seed: seed.or(self.seed).unwrap_or(defaults::SEED),
            record_traces,
        };
        scenario.validate()?;

        let effective = Effective {
            scenario: scenario.name.clone(),
            n_reflectors: scenario.channel.geometry.n_elements(),
            k_subcarriers: scenario.ofdm.k_subcarriers,
            epsilon: hwi.epsilon.unwrap_or(1.0),
            h_max_over_lambda: hwi.h_max_over_lambda.unwrap_or(0.0),
            k_peaks,
        };
        Ok((scenario, effective))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gets_desk_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        let (spec, eff) = cfg.to_scenario(None, None, false, false).unwrap();
        assert_eq!(spec.seed, 42);
        assert_eq!(spec.trials, 100);
        assert_eq!(eff.n_reflectors, 100);
        assert_eq!(eff.k_subcarriers, 128);
        assert_eq!(spec.labels.len(), 5);
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = RunConfig::from_json(r#"{"hwi": {"epsilonn": 0.5}}"#).unwrap_err();
        assert!(err.to_string().contains("epsilonn"), "{err}");
    }

    #[test]
    fn rho_aliases_epsilon() {
        let cfg = RunConfig::from_json(r#"{"hwi": {"rho": 0.4}}"#).unwrap();
        let (spec, eff) = cfg.to_scenario(None, None, false, false).unwrap();
        assert!(spec.hwi.psn.is_some());
        assert_eq!(eff.epsilon, 0.4);
    }

    #[test]
    fn paper_scale_overrides_sizes() {
        let cfg = RunConfig::from_json("{}").unwrap();
        let (spec, eff) = cfg.to_scenario(None, None, true, false).unwrap();
        assert_eq!(eff.k_subcarriers, 700);
        assert_eq!(spec.channel.paths_ap_ris, 101);
        assert_eq!(spec.channel.paths_ris_ue, 51);
        assert_eq!(spec.channel.paths_direct, 100);
    }

    #[test]
    fn cli_overrides_take_precedence() {
        let cfg = RunConfig::from_json(r#"{"seed": 7, "trials": 10}"#).unwrap();
        let (spec, _) = cfg.to_scenario(Some(99), Some(3), false, false).unwrap();
        assert_eq!(spec.seed, 99);
        assert_eq!(spec.trials, 3);
    }

    #[test]
    fn bad_label_is_a_config_error() {
        let cfg = RunConfig::from_json(r#"{"labels": ["ideal_stm", "nope"]}"#).unwrap();
        assert!(cfg.to_scenario(None, None, false, false).is_err());
    }
}
