//! Deterministic simulator and optimizer for RIS-aided wideband OFDM links
//! under hardware imperfections.
//!
//! The crate models a reconfigurable intelligent surface helping an access
//! point reach a user over a multipath channel, injects phase-shift noise
//! and surface deformation into the programmed configuration, and
//! compensates them with phase-only gradient descent. Experiments are
//! seed-reproducible Monte Carlo runs reporting the achievable rate
//! relative to the perfectly coherent combining bound.
//!
//! Modules follow the pipeline:
//!
//! - [`rng`]: counter-based splittable random streams;
//! - [`channel`]: path sampling and tap synthesis for the direct and
//!   composite channels;
//! - [`ofdm`]: DFT responses, water-filling, achievable rate, the coherent
//!   bound and the relative rate;
//! - [`hwi`]: phase-shift noise and surface deformation;
//! - [`configurator`]: strongest-tap maximization and random baselines;
//! - [`optim`]: objective, analytic gradient, GD/ADAM drivers and the
//!   finite-difference check;
//! - [`harness`]: Monte Carlo scenarios, trials and sweeps.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below pin the common entry points to double precision.

// Negated float comparisons like `!(x > 0.0)` are NaN-rejecting guards;
// `partial_cmp` would obscure that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod configurator;
pub mod harness;
pub mod hwi;
pub mod ofdm;
pub mod optim;
pub mod rng;
pub mod scalar;

mod error;

pub use error::{Error, Result};
pub use scalar::Scalar;

// Double-precision aliases for the main entry points.
pub type RisGeometry64 = channel::RisGeometry<f64>;
pub type ChannelSpec64 = channel::ChannelSpec<f64>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type OfdmParams64 = ofdm::OfdmParams<f64>;
pub type OfdmSpec64 = ofdm::OfdmSpec<f64>;
pub type HwiSpec64 = hwi::HwiSpec<f64>;
pub type PhaseConfig64 = configurator::PhaseConfig<f64>;
pub type OptimizerOptions64 = optim::OptimizerOptions<f64>;
pub type ScenarioSpec64 = harness::ScenarioSpec<f64>;
pub type ScenarioOutcome64 = harness::ScenarioOutcome<f64>;

// Single-precision variants of the heavy numerical types.
pub type ChannelRealization32 = channel::ChannelRealization<f32>;
pub type OfdmSpec32 = ofdm::OfdmSpec<f32>;
pub type OptimizerOptions32 = optim::OptimizerOptions<f32>;

/// Convert dBm to watts.
pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    let ten = T::from_f64_lossy(10.0);
    ten.powf((dbm - T::from_f64_lossy(30.0)) / ten)
}

/// Convert watts to dBm.
pub fn watts_to_dbm<T: Scalar>(watts: T) -> T {
    let ten = T::from_f64_lossy(10.0);
    ten * watts.log10() + T::from_f64_lossy(30.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        for dbm in [-164.0f64, -30.0, 0.0, 30.0] {
            let w = dbm_to_watts(dbm);
            assert!((watts_to_dbm(w) - dbm).abs() < 1e-12);
        }
        assert!((dbm_to_watts(30.0f64) - 1.0).abs() < 1e-12);
    }
}
