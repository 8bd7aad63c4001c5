//! Hardware-imperfection models: phase-shift noise and surface deformation.
//!
//! Phase-shift noise blends the programmed reflection coefficients with a
//! real Gaussian vector, `w_hat = eps * w + v * sqrt(1 - eps^2)`, preserving
//! unit power in expectation. Surface deformation adds a deterministic
//! per-row phase offset shaped by a sinusoidal bump profile.

use num_complex::Complex;

use crate::channel::{wrap_angle, RisGeometry};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

fn t<T: Scalar>(x: f64) -> T {
    T::from_f64_lossy(x)
}

/// Phase-shift noise intensity.
///
/// `epsilon = 1` is the ideal surface, `epsilon = 0` fully uncorrelated
/// noise. The literature also writes `rho` for the same quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnSpec<T> {
    epsilon: T,
}

impl<T: Scalar> PsnSpec<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return Err(Error::EpsilonOutOfRange(
                epsilon.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }
}

/// How element indices map to deformation rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowMode {
    /// Whole rows deform together (`floor(n / n_cols)`), matching a surface
    /// that bends along horizontal lines.
    #[default]
    Floor,
    /// Literal nearest-integer `round(n / n_cols)`, ties away from zero;
    /// splits rows and lets the profile coordinate slightly exceed one.
    Round,
}

/// Sinusoidal surface-deformation profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationSpec<T> {
    /// Peak displacement as a multiple of the carrier wavelength.
    pub h_max_over_lambda: T,
    /// Peak-count parameter in radians (`pi` gives one central bump).
    pub peak_k: T,
    /// LOS elevation angles of the arrival and departure rays, radians.
    pub elevation_in: T,
    pub elevation_out: T,
    pub row_mode: RowMode,
}

impl<T: Scalar> DeformationSpec<T> {
    pub fn new(
        h_max_over_lambda: T,
        peak_k: T,
        elevation_in: T,
        elevation_out: T,
        row_mode: RowMode,
    ) -> Result<Self> {
        if h_max_over_lambda < T::zero() {
            return Err(Error::InvalidSpec {
                what: "deformation",
                why: "h_max must be non-negative".into(),
            });
        }
        Ok(Self {
            h_max_over_lambda,
            peak_k,
            elevation_in,
            elevation_out,
            row_mode,
        })
    }
}

/// Combined imperfection settings for a scenario; either stage may be absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwiSpec<T> {
    pub psn: Option<PsnSpec<T>>,
    pub deformation: Option<DeformationSpec<T>>,
}

impl<T> Default for HwiSpec<T> {
    fn default() -> Self {
        Self {
            psn: None,
            deformation: None,
        }
    }
}

impl<T: Scalar> HwiSpec<T> {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_ideal(&self) -> bool {
        self.psn.is_none() && self.deformation.is_none()
    }
}

/// Apply phase-shift noise to a reflection vector.
///
/// The noise vector is real, so the imperfect coefficients are generally
/// not unit-modulus; `E[|w_hat|^2] = 1` holds for every intensity, which is
/// how reflector passivity survives the model.
pub fn apply_psn<T: Scalar>(
    omega: &[Complex<T>],
    spec: &PsnSpec<T>,
    stream: &mut RandomStream,
) -> Vec<Complex<T>> {
    let eps = spec.epsilon();
    let noise_scale = (T::one() - eps * eps).sqrt();
    omega
        .iter()
        .map(|&w| {
            let v: T = stream.standard_normal();
            w * eps + Complex::new(v * noise_scale, T::zero())
        })
        .collect()
}

/// Per-element deformation phase offsets, radians.
///
/// `offset_n = 2 pi (h_max / lambda) sin(k psi_n) (cos el_in + cos el_out)`
/// where `psi_n = row(n) / (n_cols - 1)` walks the bump profile.
pub fn deformation_offsets<T: Scalar>(
    geom: &RisGeometry<T>,
    spec: &DeformationSpec<T>,
) -> Result<Vec<T>> {
    if geom.n_cols() < 2 {
        return Err(Error::TooFewColumns);
    }
    let slope = t::<T>((geom.n_cols() - 1) as f64);
    let illumination = spec.elevation_in.cos() + spec.elevation_out.cos();
    let amplitude = T::TAU() * spec.h_max_over_lambda * illumination;
    let offsets = (0..geom.n_elements())
        .map(|n| {
            let idx = match spec.row_mode {
                RowMode::Floor => t::<T>((n / geom.n_cols()) as f64),
                RowMode::Round => {
                    (t::<T>(n as f64) / t::<T>(geom.n_cols() as f64)).round()
                }
            };
            amplitude * (spec.peak_k * idx / slope).sin()
        })
        .collect();
    Ok(offsets)
}

/// Elementwise phase perturbation: `theta_hat = theta + offsets`.
pub fn apply_deformation<T: Scalar>(phases: &[T], offsets: &[T]) -> Result<Vec<T>> {
    if phases.len() != offsets.len() {
        return Err(Error::LengthMismatch {
            expected: phases.len(),
            actual: offsets.len(),
        });
    }
    Ok(phases
        .iter()
        .zip(offsets)
        .map(|(&theta, &d)| theta + d)
        .collect())
}

/// Imperfect reflection coefficients for an intended phase configuration.
///
/// Deformation perturbs the programmed phases first (it is geometric), then
/// phase-shift noise perturbs the realized coefficients; either stage is
/// skipped when its spec is absent. The PSN vector is drawn from `stream`
/// whenever PSN is configured, independent of the deformation settings.
pub fn compose_imperfections<T: Scalar>(
    phases: &[T],
    hwi: &HwiSpec<T>,
    geom: &RisGeometry<T>,
    stream: &mut RandomStream,
) -> Result<Vec<Complex<T>>> {
    let realized: Vec<T> = match &hwi.deformation {
        Some(spec) => apply_deformation(phases, &deformation_offsets(geom, spec)?)?,
        None => phases.to_vec(),
    };
    let omega: Vec<Complex<T>> = realized
        .iter()
        .map(|&theta| Complex::from_polar(T::one(), wrap_angle(theta)))
        .collect();
    Ok(match &hwi.psn {
        Some(spec) => apply_psn(&omega, spec, stream),
        None => omega,
    })
}
