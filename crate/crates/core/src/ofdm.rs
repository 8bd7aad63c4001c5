//! Frequency-domain evaluation: DFT responses, water-filling power
//! allocation, achievable rate, the coherent upper bound and the relative
//! rate metric.
//!
//! The achievable rate is
//! `R = (B / xi) * sum_i log2(1 + p_i |combined_i|^2 / (B N0))` with
//! `xi = K + M - 1` accounting for the cyclic-prefix loss.

use num_complex::Complex;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn t<T: Scalar>(x: f64) -> T {
    T::from_f64_lossy(x)
}

/// Link-level OFDM configuration (per-realization tap count not yet known).
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmParams<T> {
    /// Subcarrier count K.
    pub k_subcarriers: usize,
    /// Total bandwidth B, Hz.
    pub bandwidth: T,
    /// Noise power density N0, W/Hz.
    pub noise_density: T,
    /// Mean per-subcarrier transmit power P, W.
    pub mean_power: T,
}

impl<T: Scalar> OfdmParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.k_subcarriers == 0 {
            return Err(Error::InvalidSpec {
                what: "OFDM parameters",
                why: "needs at least one subcarrier".into(),
            });
        }
        for (what, value) in [
            ("bandwidth", self.bandwidth),
            ("noise density", self.noise_density),
            ("mean power", self.mean_power),
        ] {
            if !(value > T::zero()) {
                return Err(Error::NonPositive {
                    what,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// Attach the realization's tap count, fixing the cyclic-prefix loss.
    pub fn with_taps(&self, tap_count: usize) -> Result<OfdmSpec<T>> {
        self.validate()?;
        OfdmSpec::new(
            self.k_subcarriers,
            tap_count,
            self.bandwidth,
            self.noise_density,
            self.mean_power,
        )
    }
}

/// Full OFDM spec for one realization: K, M, B, N0, P.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmSpec<T> {
    k_subcarriers: usize,
    tap_count: usize,
    bandwidth: T,
    noise_density: T,
    mean_power: T,
}

impl<T: Scalar> OfdmSpec<T> {
    pub fn new(
        k_subcarriers: usize,
        tap_count: usize,
        bandwidth: T,
        noise_density: T,
        mean_power: T,
    ) -> Result<Self> {
        if tap_count == 0 || k_subcarriers < tap_count {
            return Err(Error::InvalidSpec {
                what: "OFDM spec",
                why: format!("needs K >= M >= 1, got K = {k_subcarriers}, M = {tap_count}"),
            });
        }
        let spec = Self {
            k_subcarriers,
            tap_count,
            bandwidth,
            noise_density,
            mean_power,
        };
        OfdmParams {
            k_subcarriers,
            bandwidth,
            noise_density,
            mean_power,
        }
        .validate()?;
        Ok(spec)
    }

    /// Grid-only spec for tap synthesis; noise and power are unit dummies.
    pub fn for_synthesis(k_subcarriers: usize, tap_count: usize, bandwidth: T) -> Result<Self> {
        Self::new(k_subcarriers, tap_count, bandwidth, T::one(), T::one())
    }

    pub fn subcarriers(&self) -> usize {
        self.k_subcarriers
    }

    pub fn tap_count(&self) -> usize {
        self.tap_count
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    pub fn noise_density(&self) -> T {
        self.noise_density
    }

    pub fn mean_power(&self) -> T {
        self.mean_power
    }

    /// Cyclic-prefix-corrected symbol length `xi = K + M - 1`.
    pub fn xi(&self) -> usize {
        self.k_subcarriers + self.tap_count - 1
    }

    /// Noise power per subcarrier band, `B * N0`.
    pub fn noise_power(&self) -> T {
        self.bandwidth * self.noise_density
    }
}

/// Forward DFT of a tap vector: `H[i] = sum_j taps[j] e^{-j 2 pi i j / K}`.
///
/// Zero entries are skipped, so padded channel vectors cost O(K*M).
pub fn dft_response<T: Scalar>(taps: &[Complex<T>]) -> Vec<Complex<T>> {
    let k = taps.len();
    let zero = Complex::new(T::zero(), T::zero());
    let step = -T::TAU() / t::<T>(k as f64);
    let mut out = vec![zero; k];
    for (j, &tap) in taps.iter().enumerate() {
        if tap == zero {
            continue;
        }
        for (i, acc) in out.iter_mut().enumerate() {
            // Modular index keeps the twiddle argument small.
            let idx = (i * j) % k;
            *acc += tap * Complex::from_polar(T::one(), step * t::<T>(idx as f64));
        }
    }
    out
}

/// Per-subcarrier responses of one realization under a reflection vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierResponse<T> {
    /// `direct[i] + sum_n per_element[n][i] * omega[n]` for the vector used
    /// to build the response.
    pub combined: Vec<Complex<T>>,
    /// DFT of the direct channel.
    pub direct: Vec<Complex<T>>,
    /// DFT of each reflector's composite channel, one row per element.
    pub per_element: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> SubcarrierResponse<T> {
    /// DFT both channels and combine them under `omega`.
    pub fn build(ch: &ChannelRealization<T>, omega: &[Complex<T>]) -> Result<Self> {
        if omega.len() != ch.n_elements() {
            return Err(Error::LengthMismatch {
                expected: ch.n_elements(),
                actual: omega.len(),
            });
        }
        let direct = dft_response(&ch.direct_taps);
        let per_element: Vec<Vec<Complex<T>>> = ch
            .composite_taps
            .iter()
            .map(|row| dft_response(row))
            .collect();
        let combined = combine(&direct, &per_element, omega)?;
        Ok(Self {
            combined,
            direct,
            per_element,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.direct.len()
    }

    pub fn n_elements(&self) -> usize {
        self.per_element.len()
    }

    /// Combined response under a different reflection vector, reusing the
    /// cached per-element DFTs.
    pub fn recombine(&self, omega: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        combine(&self.direct, &self.per_element, omega)
    }

    /// Squared magnitudes of [`Self::recombine`].
    pub fn recombined_gains(&self, omega: &[Complex<T>]) -> Result<Vec<T>> {
        Ok(self.recombine(omega)?.iter().map(|c| c.norm_sqr()).collect())
    }

    /// Per-subcarrier magnitude of a perfectly coherent combination:
    /// `|direct[i]| + sum_n |per_element[n][i]|`.
    pub fn coherent_magnitudes(&self) -> Vec<T> {
        let mut mags: Vec<T> = self.direct.iter().map(|c| c.norm()).collect();
        for row in &self.per_element {
            for (m, c) in mags.iter_mut().zip(row) {
                *m += c.norm();
            }
        }
        mags
    }
}

fn combine<T: Scalar>(
    direct: &[Complex<T>],
    per_element: &[Vec<Complex<T>>],
    omega: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if omega.len() != per_element.len() {
        return Err(Error::LengthMismatch {
            expected: per_element.len(),
            actual: omega.len(),
        });
    }
    let mut combined = direct.to_vec();
    for (row, &w) in per_element.iter().zip(omega) {
        if row.len() != direct.len() {
            return Err(Error::LengthMismatch {
                expected: direct.len(),
                actual: row.len(),
            });
        }
        for (acc, &c) in combined.iter_mut().zip(row) {
            *acc += c * w;
        }
    }
    Ok(combined)
}

/// Combined per-subcarrier response of a realization under `omega`
/// (convenience wrapper building the full [`SubcarrierResponse`]).
pub fn combined_response<T: Scalar>(
    ch: &ChannelRealization<T>,
    omega: &[Complex<T>],
) -> Result<SubcarrierResponse<T>> {
    SubcarrierResponse::build(ch, omega)
}

/// Water-filling power allocation over subcarrier gains.
///
/// Solves `p_i = max(0, mu - B N0 / g_i)` with the mean-power constraint
/// `<p> = P` by bisection on the water level, per the standard KKT system.
/// Subcarriers with zero gain stay unpowered.
pub fn water_fill<T: Scalar>(channel_gain_sq: &[T], spec: &OfdmSpec<T>) -> Result<Vec<T>> {
    if channel_gain_sq.len() != spec.subcarriers() {
        return Err(Error::LengthMismatch {
            expected: spec.subcarriers(),
            actual: channel_gain_sq.len(),
        });
    }
    let noise = spec.noise_power();
    let k = t::<T>(channel_gain_sq.len() as f64);
    let target = spec.mean_power();

    // Inverse SNR floor per subcarrier; infinite for dead subcarriers.
    let floors: Vec<T> = channel_gain_sq
        .iter()
        .map(|&g| {
            if g > T::zero() {
                noise / g
            } else {
                T::infinity()
            }
        })
        .collect();
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for &f in &floors {
        if f.is_finite() {
            lo = lo.min(f);
            hi = hi.max(f);
        }
    }
    if !lo.is_finite() {
        return Err(Error::AllGainsZero);
    }
    hi += k * target;

    let mean_power = |mu: T| -> T {
        floors
            .iter()
            .map(|&f| (mu - f).max(T::zero()))
            .sum::<T>()
            / k
    };

    // The contract is 1e-9 relative for f64; converge to a quarter of that
    // so downstream checks keep margin. f32 saturates at its epsilon.
    let tol = target * t::<T>(0.25e-9).max(T::epsilon() * t::<T>(8.0));
    let mut mu = (lo + hi) / t::<T>(2.0);
    for _ in 0..200 {
        mu = (lo + hi) / t::<T>(2.0);
        let mean = mean_power(mu);
        if (mean - target).abs() <= tol {
            break;
        }
        if mean < target {
            lo = mu;
        } else {
            hi = mu;
        }
    }
    Ok(floors.iter().map(|&f| (mu - f).max(T::zero())).collect())
}

/// Achievable rate in bits/s given a per-subcarrier power allocation.
pub fn achievable_rate<T: Scalar>(
    resp: &SubcarrierResponse<T>,
    power: &[T],
    spec: &OfdmSpec<T>,
) -> Result<T> {
    let gains: Vec<T> = resp.combined.iter().map(|c| c.norm_sqr()).collect();
    achievable_rate_from_gains(&gains, power, spec)
}

/// Achievable rate from squared subcarrier magnitudes.
pub fn achievable_rate_from_gains<T: Scalar>(
    gains_sq: &[T],
    power: &[T],
    spec: &OfdmSpec<T>,
) -> Result<T> {
    if power.len() != gains_sq.len() || gains_sq.len() != spec.subcarriers() {
        return Err(Error::LengthMismatch {
            expected: spec.subcarriers(),
            actual: power.len().min(gains_sq.len()),
        });
    }
    if let Some(index) = power.iter().position(|&p| p < T::zero()) {
        return Err(Error::NegativePower { index });
    }
    let noise = spec.noise_power();
    let two = t::<T>(2.0);
    let sum: T = gains_sq
        .iter()
        .zip(power)
        .map(|(&g, &p)| (T::one() + p * g / noise).ln() / two.ln())
        .sum();
    Ok(spec.bandwidth() / t::<T>(spec.xi() as f64) * sum)
}

/// Water-filled achievable rate of a combined response.
pub fn water_filled_rate<T: Scalar>(gains_sq: &[T], spec: &OfdmSpec<T>) -> Result<T> {
    let power = water_fill(gains_sq, spec)?;
    achievable_rate_from_gains(gains_sq, &power, spec)
}

/// Best achievable rate under perfectly coherent per-subcarrier combination,
/// water-filled on the coherent magnitudes. Unattainable jointly across
/// subcarriers in wideband operation; serves as the relative-rate reference.
pub fn coherent_upper_bound<T: Scalar>(
    ch: &ChannelRealization<T>,
    spec: &OfdmSpec<T>,
) -> Result<T> {
    let omega = vec![Complex::new(T::one(), T::zero()); ch.n_elements()];
    let resp = SubcarrierResponse::build(ch, &omega)?;
    coherent_upper_bound_from(&resp, spec)
}

/// Coherent upper bound reusing a prebuilt response table.
pub fn coherent_upper_bound_from<T: Scalar>(
    resp: &SubcarrierResponse<T>,
    spec: &OfdmSpec<T>,
) -> Result<T> {
    let gains: Vec<T> = resp.coherent_magnitudes().iter().map(|&m| m * m).collect();
    if gains.iter().all(|&g| !(g > T::zero())) {
        return Ok(T::zero());
    }
    water_filled_rate(&gains, spec)
}

/// Relative rate `actual / bound`, in `(0, 1]` for any reflection vector
/// with per-element magnitude at most one.
pub fn relative_rate<T: Scalar>(actual: T, bound: T) -> Result<T> {
    if !(bound > T::zero()) {
        return Err(Error::NonPositiveBound);
    }
    Ok(actual / bound)
}
