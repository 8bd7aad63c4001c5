//! Baseline RIS configurators: strongest-tap maximization, random
//! configuration, and the random compensator.
//!
//! Strongest-tap maximization aligns every reflector with the direct
//! channel at one time tap. For tap `m` the candidate phases are
//! `theta_n = arg(h_d[m]) - arg(V[n][m])`, which makes the aligned tap
//! magnitude `|h_d[m]| + sum_n |V[n][m]|`; the configuration keeps the tap
//! with the largest squared aligned magnitude.

use num_complex::Complex;

use crate::channel::{wrap_angle, ChannelRealization};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

/// Provenance of a phase configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigLabel {
    IdealStm,
    Random,
    Imperfect,
    Compensated,
}

/// Per-reflector phases and the reflection coefficients they program.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig<T> {
    phases: Vec<T>,
    coefficients: Vec<Complex<T>>,
    label: ConfigLabel,
}

impl<T: Scalar> PhaseConfig<T> {
    /// Wraps phases to `[-pi, pi)` and builds unit-modulus coefficients.
    pub fn from_phases(phases: Vec<T>, label: ConfigLabel) -> Self {
        let phases: Vec<T> = phases.into_iter().map(wrap_angle).collect();
        let coefficients = phases
            .iter()
            .map(|&theta| Complex::from_polar(T::one(), theta))
            .collect();
        Self {
            phases,
            coefficients,
            label,
        }
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn label(&self) -> ConfigLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Outcome of strongest-tap maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct StmResult<T> {
    pub config: PhaseConfig<T>,
    /// Selected tap index.
    pub m_star: usize,
    /// Aligned squared magnitude per candidate tap.
    pub tap_metric: Vec<T>,
    /// The direct channel was zero at the selected tap, so the alignment
    /// anchored to phase zero by convention.
    pub zero_direct_tap: bool,
}

/// Configure the surface by strongest-tap maximization.
///
/// Ties between taps break toward the smallest index. A zero direct tap
/// anchors to `arg(0) = 0`, keeping the operation total.
pub fn stm_configure<T: Scalar>(ch: &ChannelRealization<T>) -> Result<StmResult<T>> {
    let m_taps = ch.tap_count.max(1).min(ch.subcarriers());
    let mut tap_metric = Vec::with_capacity(m_taps);
    for m in 0..m_taps {
        let mut aligned = ch.direct_taps[m].norm();
        for row in &ch.composite_taps {
            aligned += row[m].norm();
        }
        tap_metric.push(aligned * aligned);
    }
    let mut m_star = 0;
    for (m, &metric) in tap_metric.iter().enumerate() {
        if metric > tap_metric[m_star] {
            m_star = m;
        }
    }
    if !(tap_metric[m_star] > T::zero()) {
        return Err(Error::AllZeroChannel);
    }
    let direct = ch.direct_taps[m_star];
    let direct_arg = direct.arg(); // arg(0) = 0 by atan2 convention
    let phases: Vec<T> = ch
        .composite_taps
        .iter()
        .map(|row| direct_arg - row[m_star].arg())
        .collect();
    Ok(StmResult {
        config: PhaseConfig::from_phases(phases, ConfigLabel::IdealStm),
        m_star,
        tap_metric,
        zero_direct_tap: direct == Complex::new(T::zero(), T::zero()),
    })
}

/// Uniformly random phase configuration (performance lower bound).
pub fn random_configure<T: Scalar>(
    n_elements: usize,
    stream: &mut RandomStream,
) -> Result<PhaseConfig<T>> {
    Ok(PhaseConfig::from_phases(
        random_phases(n_elements, stream)?,
        ConfigLabel::Random,
    ))
}

/// Uniformly random compensation phases (lower bound for the optimizer).
pub fn random_compensator<T: Scalar>(
    n_elements: usize,
    stream: &mut RandomStream,
) -> Result<Vec<T>> {
    random_phases(n_elements, stream)
}

fn random_phases<T: Scalar>(n_elements: usize, stream: &mut RandomStream) -> Result<Vec<T>> {
    if n_elements == 0 {
        return Err(Error::InvalidSpec {
            what: "random configuration",
            why: "needs at least one element".into(),
        });
    }
    (0..n_elements)
        .map(|_| stream.uniform(-T::PI(), T::PI()))
        .collect()
}
