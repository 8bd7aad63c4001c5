//! Multipath channel synthesis for the direct (AP-UE) and composite
//! (AP-RIS-UE) links.
//!
//! One Monte Carlo draw produces a [`ChannelRealization`]: the direct
//! discrete-time impulse response `h_d` and the per-reflector composite
//! tap matrix `V`. Path delays, gains and scattering angles are drawn from
//! a [`RandomStream`]; everything downstream of the draw is deterministic.
//!
//! Conventions fixed here (the reference papers leave them open):
//! - LOS gain magnitude is free-space `lambda / (4 pi d)`; NLOS gains are
//!   circular complex Gaussian with total power `kappa` times the LOS power
//!   (cascade legs) or a configurable budget relative to the composite LOS
//!   product (direct link).
//! - Each path contributes `g * exp(-j 2 pi f_c tau)` at baseband; delays
//!   map to taps through a unit-energy windowed-sinc kernel.
//! - Tap 0 corresponds to the earliest arrival of each channel (its own
//!   minimum delay is subtracted).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ofdm::OfdmSpec;
use crate::rng::RandomStream;
use crate::scalar::Scalar;

/// Propagation speed used for delay/wavelength conversions, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Half-width of the delay-to-tap interpolation kernel, in taps.
pub const KERNEL_HALF_WIDTH: usize = 6;

/// Width of the raised-cosine edge taper at each end of the kernel, taps.
const KERNEL_TAPER: f64 = 2.0;

fn t<T: Scalar>(x: f64) -> T {
    T::from_f64_lossy(x)
}

// ---------------------------------------------------------------------------
// geometry

/// Planar RIS on the xz-plane, centered at the origin, outward normal +y.
///
/// Element `n = row * n_cols + col` (row-major) sits at
/// `((col - (n_cols-1)/2) * d_h, 0, (row - (n_rows-1)/2) * d_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RisGeometry<T> {
    n_rows: usize,
    n_cols: usize,
    d_h: T,
    d_v: T,
    carrier_hz: T,
}

impl<T: Scalar> RisGeometry<T> {
    pub fn new(n_rows: usize, n_cols: usize, d_h: T, d_v: T, carrier_hz: T) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidSpec {
                what: "RIS geometry",
                why: "needs at least one row and one column".into(),
            });
        }
        for (what, value) in [("d_h", d_h), ("d_v", d_v), ("carrier frequency", carrier_hz)] {
            if !(value > T::zero()) {
                return Err(Error::NonPositive {
                    what,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            d_h,
            d_v,
            carrier_hz,
        })
    }

    /// Square geometry with spacing given as a multiple of the wavelength.
    pub fn with_spacing_over_lambda(
        n_rows: usize,
        n_cols: usize,
        d_over_lambda: T,
        carrier_hz: T,
    ) -> Result<Self> {
        let lambda = t::<T>(SPEED_OF_LIGHT) / carrier_hz;
        let d = d_over_lambda * lambda;
        Self::new(n_rows, n_cols, d, d, carrier_hz)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_elements(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn carrier_hz(&self) -> T {
        self.carrier_hz
    }

    pub fn d_h(&self) -> T {
        self.d_h
    }

    pub fn d_v(&self) -> T {
        self.d_v
    }

    pub fn wavelength(&self) -> T {
        t::<T>(SPEED_OF_LIGHT) / self.carrier_hz
    }

    /// Position of element `n` in meters.
    pub fn element_position(&self, n: usize) -> Result<[T; 3]> {
        if n >= self.n_elements() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.n_elements(),
            });
        }
        let row = (n / self.n_cols) as f64;
        let col = (n % self.n_cols) as f64;
        let half = |count: usize| (count as f64 - 1.0) / 2.0;
        Ok([
            (t::<T>(col) - t::<T>(half(self.n_cols))) * self.d_h,
            T::zero(),
            (t::<T>(row) - t::<T>(half(self.n_rows))) * self.d_v,
        ])
    }
}

/// Azimuth/elevation pair in radians.
///
/// The unit direction is `(sin az cos el, cos az cos el, sin el)`, so
/// broadside (`az = el = 0`) points along +y, perpendicular to the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAngles<T> {
    pub azimuth: T,
    pub elevation: T,
}

impl<T: Scalar> PathAngles<T> {
    /// Wraps azimuth to `[-pi, pi]` and clamps elevation to `[-pi/2, pi/2]`.
    pub fn new(azimuth: T, elevation: T) -> Self {
        let half_pi = T::FRAC_PI_2();
        Self {
            azimuth: wrap_angle(azimuth),
            elevation: elevation.max(-half_pi).min(half_pi),
        }
    }

    pub fn direction(&self) -> [T; 3] {
        let (saz, caz) = (self.azimuth.sin(), self.azimuth.cos());
        let (sel, cel) = (self.elevation.sin(), self.elevation.cos());
        [saz * cel, caz * cel, sel]
    }

    /// Angles of the ray from the surface origin towards `pos`.
    pub fn towards(pos: [T; 3]) -> Self {
        let r = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
        let elevation = if r > T::zero() {
            (pos[2] / r).asin()
        } else {
            T::zero()
        };
        Self::new(pos[0].atan2(pos[1]), elevation)
    }
}

/// Wrap an angle to `[-pi, pi)`.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut x = theta % tau;
    if x >= T::PI() {
        x -= tau;
    } else if x < -T::PI() {
        x += tau;
    }
    x
}

// ---------------------------------------------------------------------------
// path sets

/// Delays, complex gains and angles for one propagation leg.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet<T> {
    pub delays: Vec<T>,
    pub gains: Vec<Complex<T>>,
    pub angles: Vec<PathAngles<T>>,
    /// Index of the LOS path, when the leg has one.
    pub los_index: Option<usize>,
}

impl<T: Scalar> PathSet<T> {
    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn min_delay(&self) -> T {
        self.delays.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_delay(&self) -> T {
        self.delays.iter().copied().fold(T::zero(), T::max)
    }
}

/// Scenario-level channel description: geometry, terminal positions and
/// stochastic path-population parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec<T> {
    pub geometry: RisGeometry<T>,
    /// AP position in the RIS frame, meters.
    pub ap_position: [T; 3],
    /// UE position in the RIS frame, meters.
    pub ue_position: [T; 3],
    /// Path counts: AP-RIS leg, RIS-UE leg, direct link.
    pub paths_ap_ris: usize,
    pub paths_ris_ue: usize,
    pub paths_direct: usize,
    /// Total NLOS power of each cascade leg relative to its LOS power.
    pub kappa_nlos: T,
    /// Direct-link power budget in dB relative to the composite LOS product.
    pub direct_rel_db: T,
}

impl<T: Scalar> ChannelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.paths_ap_ris == 0 || self.paths_ris_ue == 0 || self.paths_direct == 0 {
            return Err(Error::InvalidSpec {
                what: "channel spec",
                why: "every link needs at least one path".into(),
            });
        }
        if self.kappa_nlos < T::zero() {
            return Err(Error::InvalidSpec {
                what: "channel spec",
                why: "kappa_nlos must be non-negative".into(),
            });
        }
        Ok(())
    }

    fn distance(p: [T; 3], q: [T; 3]) -> T {
        let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn ap_distance(&self) -> T {
        Self::distance(self.ap_position, [T::zero(); 3])
    }

    pub fn ue_distance(&self) -> T {
        Self::distance(self.ue_position, [T::zero(); 3])
    }

    pub fn direct_distance(&self) -> T {
        Self::distance(self.ap_position, self.ue_position)
    }

    /// LOS delay of the AP-RIS leg, seconds.
    pub fn los_delay_ap_ris(&self) -> T {
        self.ap_distance() / t::<T>(SPEED_OF_LIGHT)
    }

    /// LOS delay of the RIS-UE leg, seconds.
    pub fn los_delay_ris_ue(&self) -> T {
        self.ue_distance() / t::<T>(SPEED_OF_LIGHT)
    }

    /// LOS delay of the direct AP-UE link, seconds.
    pub fn los_delay_direct(&self) -> T {
        self.direct_distance() / t::<T>(SPEED_OF_LIGHT)
    }

    /// Arrival angles of the AP-RIS LOS ray at the surface.
    pub fn los_angles_arrival(&self) -> PathAngles<T> {
        PathAngles::towards(self.ap_position)
    }

    /// Departure angles of the RIS-UE LOS ray from the surface.
    pub fn los_angles_departure(&self) -> PathAngles<T> {
        PathAngles::towards(self.ue_position)
    }

    /// Free-space LOS gain magnitude `lambda / (4 pi d)`.
    fn los_gain(&self, distance: T) -> T {
        self.geometry.wavelength() / (t::<T>(4.0) * T::PI() * distance)
    }

    /// Total mean power of the direct link.
    pub fn direct_power_budget(&self) -> T {
        let product = self.los_gain(self.ap_distance()) * self.los_gain(self.ue_distance());
        let scale = t::<T>(10.0).powf(self.direct_rel_db / t::<T>(10.0));
        scale * product * product
    }
}

/// Scattering offsets around the LOS ray, radians (per the scenario model:
/// azimuth within +-40 degrees, elevation within +-10 degrees).
const AZIMUTH_SPREAD_DEG: f64 = 40.0;
const ELEVATION_SPREAD_DEG: f64 = 10.0;

/// Draw the direct-link path population.
///
/// All paths are NLOS: delays uniform in `[tau_d, 2 tau_d]` where `tau_d`
/// is the AP-UE LOS propagation time, gains circular complex Gaussian
/// splitting the configured power budget evenly. Angles are unused for the
/// direct link and set to zero.
pub fn sample_direct_paths<T: Scalar>(
    spec: &ChannelSpec<T>,
    stream: &mut RandomStream,
) -> Result<PathSet<T>> {
    spec.validate()?;
    let tau_d = spec.los_delay_direct();
    if !(tau_d > T::zero()) {
        return Err(Error::NonPositive {
            what: "direct LOS delay",
            value: tau_d.to_f64().unwrap_or(f64::NAN),
        });
    }
    let count = spec.paths_direct;
    let var = spec.direct_power_budget() / t::<T>(count as f64);
    let mut delays = Vec::with_capacity(count);
    let mut gains = Vec::with_capacity(count);
    for _ in 0..count {
        delays.push(stream.uniform(tau_d, tau_d + tau_d)?);
        gains.push(stream.complex_normal(var));
    }
    Ok(PathSet {
        delays,
        gains,
        angles: vec![PathAngles::new(T::zero(), T::zero()); count],
        los_index: None,
    })
}

/// Draw one cascade leg: path 0 is the LOS ray at the geometric delay with
/// the free-space gain, the rest are NLOS scatterers.
fn sample_cascade_leg<T: Scalar>(
    spec: &ChannelSpec<T>,
    los_delay: T,
    los_angles: PathAngles<T>,
    los_gain: T,
    count: usize,
    stream: &mut RandomStream,
) -> Result<PathSet<T>> {
    if !(los_delay > T::zero()) {
        return Err(Error::NonPositive {
            what: "cascade LOS delay",
            value: los_delay.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut delays = Vec::with_capacity(count);
    let mut gains = Vec::with_capacity(count);
    let mut angles = Vec::with_capacity(count);
    delays.push(los_delay);
    gains.push(Complex::new(los_gain, T::zero()));
    angles.push(los_angles);

    if count > 1 {
        let var = spec.kappa_nlos * los_gain * los_gain / t::<T>((count - 1) as f64);
        let az = t::<T>(AZIMUTH_SPREAD_DEG.to_radians());
        let el = t::<T>(ELEVATION_SPREAD_DEG.to_radians());
        for _ in 1..count {
            delays.push(stream.uniform(los_delay, los_delay + los_delay)?);
            // The LOS magnitude must stay strictly largest; at the default
            // kappa a redraw is a once-in-a-lifetime event.
            let gain = loop {
                let g = stream.complex_normal(var);
                if g.norm() < los_gain {
                    break g;
                }
            };
            gains.push(gain);
            angles.push(PathAngles::new(
                los_angles.azimuth + stream.uniform(-az, az)?,
                los_angles.elevation + stream.uniform(-el, el)?,
            ));
        }
    }
    Ok(PathSet {
        delays,
        gains,
        angles,
        los_index: Some(0),
    })
}

/// Draw both cascade legs (AP-RIS and RIS-UE).
pub fn sample_cascade_paths<T: Scalar>(
    spec: &ChannelSpec<T>,
    stream: &mut RandomStream,
) -> Result<(PathSet<T>, PathSet<T>)> {
    spec.validate()?;
    let leg_a = sample_cascade_leg(
        spec,
        spec.los_delay_ap_ris(),
        spec.los_angles_arrival(),
        spec.los_gain(spec.ap_distance()),
        spec.paths_ap_ris,
        stream,
    )?;
    let leg_b = sample_cascade_leg(
        spec,
        spec.los_delay_ris_ue(),
        spec.los_angles_departure(),
        spec.los_gain(spec.ue_distance()),
        spec.paths_ris_ue,
        stream,
    )?;
    Ok((leg_a, leg_b))
}

/// Phase rotation imposed by element `n` on a ray arriving from `incoming`
/// and departing towards `outgoing`: `(2 pi / lambda) * p_n . (u_in + u_out)`.
///
/// The element at the surface origin returns 0 for any angles.
pub fn array_phase<T: Scalar>(
    geom: &RisGeometry<T>,
    n: usize,
    incoming: &PathAngles<T>,
    outgoing: &PathAngles<T>,
) -> Result<T> {
    let p = geom.element_position(n)?;
    let u = incoming.direction();
    let v = outgoing.direction();
    let dot = p[0] * (u[0] + v[0]) + p[1] * (u[1] + v[1]) + p[2] * (u[2] + v[2]);
    Ok(T::TAU() / geom.wavelength() * dot)
}

// ---------------------------------------------------------------------------
// delay-to-tap kernel

/// Raised-cosine edge taper: flat inside, rolls off to zero at `|x| = W`.
fn edge_taper(x: f64) -> f64 {
    let w = KERNEL_HALF_WIDTH as f64;
    let a = x.abs();
    if a <= w - KERNEL_TAPER {
        1.0
    } else if a >= w {
        0.0
    } else {
        let phase = std::f64::consts::FRAC_PI_2 * (a - (w - KERNEL_TAPER)) / KERNEL_TAPER;
        let c = phase.cos();
        c * c
    }
}

/// Tapered truncated sinc; exact Kronecker delta at integer arguments.
fn sinc_windowed(x: f64) -> f64 {
    if x.abs() >= KERNEL_HALF_WIDTH as f64 {
        return 0.0;
    }
    if x == x.round() {
        return if x == 0.0 { 1.0 } else { 0.0 };
    }
    let px = std::f64::consts::PI * x;
    px.sin() / px * edge_taper(x)
}

/// Kernel weights of a path centered at fractional tap `center`, restricted
/// to `[0, m_taps)` and normalized to unit energy over the retained taps, so
/// band-limited interpolation preserves per-path power.
fn kernel_weights(center: f64, m_taps: usize) -> Vec<(usize, f64)> {
    let lo = (center - KERNEL_HALF_WIDTH as f64).ceil().max(0.0) as usize;
    let hi = ((center + KERNEL_HALF_WIDTH as f64).floor() as usize).min(m_taps.saturating_sub(1));
    let mut taps = Vec::with_capacity(hi.saturating_sub(lo) + 1);
    let mut energy = 0.0;
    for m in lo..=hi {
        let w = sinc_windowed(m as f64 - center);
        if w != 0.0 {
            energy += w * w;
            taps.push((m, w));
        }
    }
    if energy > 0.0 && energy != 1.0 {
        let scale = energy.sqrt().recip();
        for (_, w) in &mut taps {
            *w *= scale;
        }
    }
    taps
}

fn check_spread<T: Scalar>(spread_taps: T, m_taps: usize) -> Result<()> {
    let capacity = m_taps.saturating_sub(2 * KERNEL_HALF_WIDTH);
    if spread_taps.to_f64().unwrap_or(f64::INFINITY) > capacity as f64 {
        return Err(Error::DelaySpreadExceedsWindow {
            spread_taps: spread_taps.to_f64().unwrap_or(f64::NAN),
            capacity,
        });
    }
    Ok(())
}

/// Number of taps needed for a delay spread of `spread` seconds.
pub fn tap_count<T: Scalar>(spread: T, bandwidth: T) -> usize {
    let spread_taps = (spread * bandwidth).to_f64().unwrap_or(0.0).max(0.0);
    spread_taps.ceil() as usize + 2 * KERNEL_HALF_WIDTH + 1
}

/// Baseband contribution of one path: gain times the carrier phasor.
fn path_phasor<T: Scalar>(gain: Complex<T>, carrier_hz: T, delay: T) -> Complex<T> {
    gain * Complex::from_polar(T::one(), -T::TAU() * carrier_hz * delay)
}

/// Direct-channel taps `h_d` (length K, entries beyond the tap window zero).
///
/// `h_d[m] = sum_l g_l exp(-j 2 pi f_c tau_l) kernel(m - (tau_l - tau_min) B)`
pub fn synthesize_direct_taps<T: Scalar>(
    paths: &PathSet<T>,
    carrier_hz: T,
    ofdm: &OfdmSpec<T>,
) -> Result<Vec<Complex<T>>> {
    let m_taps = ofdm.tap_count();
    let tau_min = paths.min_delay();
    check_spread((paths.max_delay() - tau_min) * ofdm.bandwidth(), m_taps)?;
    let mut taps = vec![Complex::new(T::zero(), T::zero()); ofdm.subcarriers()];
    for (&delay, &gain) in paths.delays.iter().zip(&paths.gains) {
        let phasor = path_phasor(gain, carrier_hz, delay);
        let center = ((delay - tau_min) * ofdm.bandwidth()).to_f64().unwrap_or(0.0);
        for (m, w) in kernel_weights(center, m_taps) {
            taps[m] += phasor * t::<T>(w);
        }
    }
    Ok(taps)
}

/// Composite tap matrix `V` (N rows of length K).
///
/// Every pair of cascade paths `(l, q)` contributes to each element `n` with
/// the element's array phase for that pair and the summed delay.
pub fn synthesize_composite_taps<T: Scalar>(
    leg_a: &PathSet<T>,
    leg_b: &PathSet<T>,
    geom: &RisGeometry<T>,
    ofdm: &OfdmSpec<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    let m_taps = ofdm.tap_count();
    let tau_min = leg_a.min_delay() + leg_b.min_delay();
    let spread = leg_a.max_delay() + leg_b.max_delay() - tau_min;
    check_spread(spread * ofdm.bandwidth(), m_taps)?;

    let n_elements = geom.n_elements();
    let two_pi_over_lambda = T::TAU() / geom.wavelength();
    // Per-element phasors factor over the two legs.
    let leg_phasors = |set: &PathSet<T>| -> Result<Vec<Vec<Complex<T>>>> {
        set.angles
            .iter()
            .map(|angles| {
                let u = angles.direction();
                (0..n_elements)
                    .map(|n| {
                        let p = geom.element_position(n)?;
                        let dot = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
                        Ok(Complex::from_polar(T::one(), two_pi_over_lambda * dot))
                    })
                    .collect()
            })
            .collect()
    };
    let phasors_a = leg_phasors(leg_a)?;
    let phasors_b = leg_phasors(leg_b)?;

    let mut v = vec![vec![Complex::new(T::zero(), T::zero()); ofdm.subcarriers()]; n_elements];
    for (l, (&tau_a, &gain_a)) in leg_a.delays.iter().zip(&leg_a.gains).enumerate() {
        for (q, (&tau_b, &gain_b)) in leg_b.delays.iter().zip(&leg_b.gains).enumerate() {
            let delay = tau_a + tau_b;
            let phasor = path_phasor(gain_a * gain_b, geom.carrier_hz(), delay);
            let center = ((delay - tau_min) * ofdm.bandwidth()).to_f64().unwrap_or(0.0);
            let weights = kernel_weights(center, m_taps);
            for (row, (pa, pb)) in v.iter_mut().zip(phasors_a[l].iter().zip(&phasors_b[q])) {
                let c = phasor * pa * pb;
                for &(m, w) in &weights {
                    row[m] += c * t::<T>(w);
                }
            }
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// realization

/// One Monte Carlo channel draw: direct taps and composite tap matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    /// Direct impulse response, length K; entries beyond the tap window zero.
    pub direct_taps: Vec<Complex<T>>,
    /// Composite impulse responses, one row of length K per reflector.
    pub composite_taps: Vec<Vec<Complex<T>>>,
    /// Number of taps that may be nonzero (shared by both channels).
    pub tap_count: usize,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn n_elements(&self) -> usize {
        self.composite_taps.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.direct_taps.len()
    }

    /// Total tap-domain energy of the direct and composite channels.
    pub fn total_energy(&self) -> T {
        let direct: T = self.direct_taps.iter().map(|c| c.norm_sqr()).sum();
        let composite: T = self
            .composite_taps
            .iter()
            .flat_map(|row| row.iter().map(|c| c.norm_sqr()))
            .sum();
        direct + composite
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.total_energy() > T::zero())
    }

    /// Scales both channels by `factor` in place.
    pub fn scale(&mut self, factor: T) {
        for c in &mut self.direct_taps {
            *c *= factor;
        }
        for row in &mut self.composite_taps {
            for c in row {
                *c *= factor;
            }
        }
    }
}

/// Draw one full realization: path populations, shared tap window, taps.
///
/// The tap window is `ceil(B * spread) + 2W + 1` over the wider of the two
/// channels, and must fit in K.
pub fn realize<T: Scalar>(
    spec: &ChannelSpec<T>,
    k_subcarriers: usize,
    bandwidth: T,
    stream: &mut RandomStream,
) -> Result<ChannelRealization<T>> {
    let direct = sample_direct_paths(spec, stream)?;
    let (leg_a, leg_b) = sample_cascade_paths(spec, stream)?;

    let spread_direct = direct.max_delay() - direct.min_delay();
    let spread_cascade =
        leg_a.max_delay() + leg_b.max_delay() - leg_a.min_delay() - leg_b.min_delay();
    let m_taps = tap_count(spread_direct.max(spread_cascade), bandwidth);
    if m_taps > k_subcarriers {
        return Err(Error::InvalidSpec {
            what: "channel realization",
            why: format!("tap window {m_taps} exceeds K = {k_subcarriers} subcarriers"),
        });
    }

    let ofdm = OfdmSpec::for_synthesis(k_subcarriers, m_taps, bandwidth)?;
    let direct_taps = synthesize_direct_taps(&direct, spec.geometry.carrier_hz(), &ofdm)?;
    let composite_taps = synthesize_composite_taps(&leg_a, &leg_b, &spec.geometry, &ofdm)?;
    Ok(ChannelRealization {
        direct_taps,
        composite_taps,
        tap_count: m_taps,
    })
}
