//! Birefringent dephasing of the two-photon polarization state.
//!
//! A photon of angular frequency `w` crossing a birefringent plate with
//! retardation `x` (path-length difference between the ordinary and
//! extraordinary rays) picks up the relative phase `x w / c` between `|H>` and
//! `|V>`. Tracing over the frequency distribution `f(w)` multiplies the
//! coherences by the decoherence parameter
//!
//! ```text
//! kappa(x) = integral f(w) exp(i x w / c) dw
//! ```
//!
//! which is computed here in closed form for Gaussian mixtures and by
//! trapezoid quadrature for sampled spectra. A `sigma_x` on photon b swaps
//! `|H>` and `|V>`, so retardation accumulated afterwards runs against the
//! phase collected before it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::correlations::{CorrelationError, CorrelationSet, KappaPair};
use crate::qstate::{BellSpectrum, Matrix4c, QStateError, TwoQubitState};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Central wavelength of the down-converted photons, m.
pub const DEFAULT_LAMBDA0: f64 = 780e-9;

const NORMALIZATION_TOL: f64 = 1e-9;
const SAMPLED_NORMALIZATION_TOL: f64 = 1e-6;
const KAPPA_MODULUS_TOL: f64 = 1e-9;
const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DephasingError {
    #[error("retardation must be finite and non-negative, got {0}")]
    NegativeRetardation(f64),
    #[error("Gaussian component needs positive amplitude and width (amplitude {amplitude}, width {width})")]
    InvalidComponent { amplitude: f64, width: f64 },
    #[error("spectral weights sum to {0} instead of 1")]
    NormalizationError(f64),
    #[error("invalid sampled spectrum: {0}")]
    InvalidGrid(String),
    #[error("frequency grid too coarse for retardation {retardation:e} m: spacing {spacing:e} rad/s exceeds {limit:e} rad/s")]
    UnderResolvedGrid { retardation: f64, spacing: f64, limit: f64 },
    #[error("sigma_x points must be non-negative and strictly increasing")]
    ScheduleError,
    #[error("decoherence parameter modulus {0} exceeds 1")]
    InvalidKappa(f64),
    #[error("invalid sweep: {0}")]
    InvalidSweep(&'static str),
    #[error("no bracketing samples for the requested crossing")]
    NotFound,
    #[error(transparent)]
    State(#[from] QStateError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Optical path-length difference `L * dn`, in meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Retardation(f64);

impl Retardation {
    pub const ZERO: Retardation = Retardation(0.0);

    pub fn new(meters: f64) -> Result<Self, DephasingError> {
        if !meters.is_finite() || meters < 0.0 {
            return Err(DephasingError::NegativeRetardation(meters));
        }
        Ok(Self(meters))
    }

    pub fn from_wavelengths(units: f64, lambda0: f64) -> Result<Self, DephasingError> {
        Self::new(units * lambda0)
    }

    pub fn meters(&self) -> f64 {
        self.0
    }

    pub fn in_wavelengths(&self, lambda0: f64) -> f64 {
        self.0 / lambda0
    }
}

/// Angular frequency of light with vacuum wavelength `lambda`.
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Width parameter `sigma` of `f(w) ~ exp(-4 (w - w0)^2 / sigma^2)` for a
/// filter of wavelength FWHM `fwhm` around `lambda0`.
///
/// The wavelength FWHM is mapped linearly onto angular frequency and used
/// directly as `sigma`.
pub fn fwhm_to_sigma(fwhm: f64, lambda0: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * fwhm / (lambda0 * lambda0)
}

/// `exp(-(x/c)^2 sigma^2 / 16 + i (x/c) w0)` for signed `x`.
fn gaussian_kappa_signed(x: f64, sigma: f64, omega0: f64) -> Complex64 {
    let t = x / SPEED_OF_LIGHT;
    let decay = -(t * t) * sigma * sigma / 16.0;
    Complex64::from_polar(decay.exp(), t * omega0)
}

/// Decoherence parameter of a single Gaussian spectrum.
pub fn kappa_gaussian(x: Retardation, sigma: f64, omega0: f64) -> Complex64 {
    gaussian_kappa_signed(x.0, sigma, omega0)
}

/// One weighted Gaussian of a frequency distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    amplitude: f64,
    center: f64,
    width: f64,
}

impl GaussianComponent {
    /// `center` and `width` in rad/s.
    pub fn new(amplitude: f64, center: f64, width: f64) -> Result<Self, DephasingError> {
        if !(amplitude > 0.0 && width > 0.0 && amplitude.is_finite() && width.is_finite() && center.is_finite()) {
            return Err(DephasingError::InvalidComponent { amplitude, width });
        }
        Ok(Self { amplitude, center, width })
    }

    /// Component specified by center wavelength and wavelength FWHM, both in
    /// meters, with the width calibrated at `lambda0`.
    pub fn from_wavelength(
        amplitude: f64,
        center_wavelength: f64,
        fwhm: f64,
        lambda0: f64,
    ) -> Result<Self, DephasingError> {
        Self::new(amplitude, angular_frequency(center_wavelength), fwhm_to_sigma(fwhm, lambda0))
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Normalized density `2 / (sqrt(pi) sigma) exp(-4 (w - w0)^2 / sigma^2)`.
    fn unit_density(&self, omega: f64) -> f64 {
        let d = (omega - self.center) / self.width;
        2.0 / (PI.sqrt() * self.width) * (-4.0 * d * d).exp()
    }
}

fn check_normalization(components: &[GaussianComponent]) -> Result<(), DephasingError> {
    let total: f64 = components.iter().map(|c| c.amplitude).sum();
    if components.is_empty() || (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(DephasingError::NormalizationError(total));
    }
    Ok(())
}

fn multi_kappa_signed(x: f64, components: &[GaussianComponent]) -> Complex64 {
    components
        .iter()
        .map(|c| gaussian_kappa_signed(x, c.width, c.center) * c.amplitude)
        .sum()
}

/// Decoherence parameter of a normalized Gaussian mixture.
pub fn kappa_multi_gaussian(
    x: Retardation,
    components: &[GaussianComponent],
) -> Result<Complex64, DephasingError> {
    check_normalization(components)?;
    Ok(multi_kappa_signed(x.0, components))
}

/// Frequency density tabulated on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    omega: Vec<f64>,
    density: Vec<f64>,
}

impl SampledSpectrum {
    pub fn new(omega: Vec<f64>, density: Vec<f64>) -> Result<Self, DephasingError> {
        if omega.len() != density.len() || omega.len() < 2 {
            return Err(DephasingError::InvalidGrid(
                "need at least two (omega, density) pairs".into(),
            ));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DephasingError::InvalidGrid("omega must be strictly increasing".into()));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(DephasingError::InvalidGrid("densities must be finite and non-negative".into()));
        }
        let s = Self { omega, density };
        let norm = s.trapezoid(|_| Complex64::new(1.0, 0.0)).re;
        if (norm - 1.0).abs() > SAMPLED_NORMALIZATION_TOL {
            return Err(DephasingError::NormalizationError(norm));
        }
        Ok(s)
    }

    /// Tabulate a Gaussian mixture on `points` equally spaced frequencies
    /// spanning `half_widths` widths beyond the outermost centers.
    pub fn from_components(
        components: &[GaussianComponent],
        points: usize,
        half_widths: f64,
    ) -> Result<Self, DephasingError> {
        check_normalization(components)?;
        let lo = components
            .iter()
            .map(|c| c.center - half_widths * c.width)
            .fold(f64::INFINITY, f64::min);
        let hi = components
            .iter()
            .map(|c| c.center + half_widths * c.width)
            .fold(f64::NEG_INFINITY, f64::max);
        let n = points.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let omega: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
        let density = omega
            .iter()
            .map(|&w| components.iter().map(|c| c.amplitude * c.unit_density(w)).sum())
            .collect();
        Self::new(omega, density)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    fn max_spacing(&self) -> f64 {
        self.omega.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    fn trapezoid(&self, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.omega
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(w, f)| (g(w[0]) * f[0] + g(w[1]) * f[1]) * (0.5 * (w[1] - w[0])))
            .sum()
    }

    fn kappa_signed(&self, x: f64) -> Result<Complex64, DephasingError> {
        let ax = x.abs();
        if ax > 0.0 {
            let limit = 2.0 * PI * SPEED_OF_LIGHT / ax / MIN_SAMPLES_PER_PERIOD;
            let spacing = self.max_spacing();
            if spacing > limit {
                return Err(DephasingError::UnderResolvedGrid { retardation: ax, spacing, limit });
            }
        }
        let t = x / SPEED_OF_LIGHT;
        // Factor out the phase at the first sample to keep arguments small.
        let w0 = self.omega[0];
        let inner = self.trapezoid(|w| Complex64::from_polar(1.0, t * (w - w0)));
        Ok(inner * Complex64::from_polar(1.0, t * w0))
    }
}

/// Trapezoid-rule decoherence parameter of a sampled spectrum.
pub fn kappa_numeric(x: Retardation, spectrum: &SampledSpectrum) -> Result<Complex64, DephasingError> {
    spectrum.kappa_signed(x.0)
}

/// Photon frequency distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralModel {
    SingleGaussian { sigma: f64, omega0: f64 },
    MultiGaussian(Vec<GaussianComponent>),
    Sampled(SampledSpectrum),
}

impl SpectralModel {
    pub fn single_gaussian(sigma: f64, omega0: f64) -> Result<Self, DephasingError> {
        GaussianComponent::new(1.0, omega0, sigma)?;
        Ok(Self::SingleGaussian { sigma, omega0 })
    }

    /// Gaussian filter of wavelength FWHM `fwhm` centered on `lambda0`.
    pub fn filter(fwhm: f64, lambda0: f64) -> Result<Self, DephasingError> {
        Self::single_gaussian(fwhm_to_sigma(fwhm, lambda0), angular_frequency(lambda0))
    }

    pub fn multi_gaussian(components: Vec<GaussianComponent>) -> Result<Self, DephasingError> {
        check_normalization(&components)?;
        Ok(Self::MultiGaussian(components))
    }

    /// `kappa` at a signed retardation; negative values run the phase backwards.
    pub fn kappa_signed(&self, x: f64) -> Result<Complex64, DephasingError> {
        match self {
            Self::SingleGaussian { sigma, omega0 } => Ok(gaussian_kappa_signed(x, *sigma, *omega0)),
            Self::MultiGaussian(components) => Ok(multi_kappa_signed(x, components)),
            Self::Sampled(s) => s.kappa_signed(x),
        }
    }

    pub fn kappa(&self, x: Retardation) -> Result<Complex64, DephasingError> {
        self.kappa_signed(x.0)
    }
}

/// Retardations at which photon b gets a `sigma_x`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EchoSchedule {
    points: Vec<Retardation>,
}

impl EchoSchedule {
    pub fn new(points: Vec<Retardation>) -> Result<Self, DephasingError> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(DephasingError::ScheduleError);
        }
        Ok(Self { points })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[Retardation] {
        &self.points
    }
}

/// Net phase-accumulating retardation after `x` of plate, in meters.
///
/// Each `sigma_x` flips the sign with which subsequent retardation adds up.
pub fn effective_retardation(x: Retardation, schedule: &EchoSchedule) -> f64 {
    let mut eff = 0.0;
    let mut sign = 1.0;
    let mut prev = 0.0;
    for p in &schedule.points {
        if x.0 < p.0 {
            break;
        }
        eff += sign * (p.0 - prev);
        prev = p.0;
        sign = -sign;
    }
    eff + sign * (x.0 - prev)
}

/// Both retardations and the resulting decoherence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingPoint {
    pub x_a: Retardation,
    pub x_b: Retardation,
    pub kappa_a: Complex64,
    pub kappa_b: Complex64,
}

impl DephasingPoint {
    pub fn new(
        x_a: Retardation,
        x_b: Retardation,
        kappa_a: Complex64,
        kappa_b: Complex64,
    ) -> Result<Self, DephasingError> {
        for k in [kappa_a, kappa_b] {
            if !(k.norm() <= 1.0 + KAPPA_MODULUS_TOL) {
                return Err(DephasingError::InvalidKappa(k.norm()));
            }
        }
        Ok(Self { x_a, x_b, kappa_a, kappa_b })
    }

    /// Point with only the decoherence parameters set.
    pub fn from_kappas(kappa_a: Complex64, kappa_b: Complex64) -> Result<Self, DephasingError> {
        Self::new(Retardation::ZERO, Retardation::ZERO, kappa_a, kappa_b)
    }

    pub fn kappa_pair(&self) -> Result<KappaPair, DephasingError> {
        Ok(KappaPair::from_complex(self.kappa_a, self.kappa_b)?)
    }
}

/// Polarization state after dephasing, starting from
/// `(|HH> + |HV> + |VH> - |VV>) / 2`.
pub fn evolve_state(k: &DephasingPoint) -> Result<TwoQubitState, DephasingError> {
    let a = k.kappa_a;
    let b = k.kappa_b;
    let ac = a.conj();
    let bc = b.conj();
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let m = Matrix4c::new(
        one,         bc,       ac,      -ac * bc,
        b,           one,      ac * b,  -ac,
        a,           a * bc,   one,     -bc,
        -a * b,      -a,       -b,      one,
    );
    Ok(TwoQubitState::new(m.scale(0.25))?)
}

/// Fixed arm-a dephasing plus a retardation scan in arm b.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub x_a: Retardation,
    pub spectrum_a: SpectralModel,
    pub spectrum_b: SpectralModel,
    pub echo: EchoSchedule,
    /// Largest arm-b retardation, m.
    pub x_b_max: f64,
    /// Scan step, m.
    pub step: f64,
}

/// One evaluated scan position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x_b: f64,
    pub point: DephasingPoint,
    pub spectrum: BellSpectrum,
    pub correlations: CorrelationSet,
}

/// Scan positions `0, step, 2 step, ...` up to `x_b_max`.
pub fn sweep_positions(x_b_max: f64, step: f64) -> Result<Vec<f64>, DephasingError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(DephasingError::InvalidSweep("step must be positive"));
    }
    if !(x_b_max >= 0.0 && x_b_max.is_finite()) {
        return Err(DephasingError::InvalidSweep("range must be non-negative"));
    }
    let n = (x_b_max / step * (1.0 + 1e-12)).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// Evaluate one arm-b retardation.
pub fn evaluate_point(
    config: &SweepConfig,
    kappa_a: Complex64,
    x_b: f64,
) -> Result<SweepPoint, DephasingError> {
    let xb = Retardation::new(x_b)?;
    let kappa_b = config.spectrum_b.kappa_signed(effective_retardation(xb, &config.echo))?;
    let point = DephasingPoint::new(config.x_a, xb, kappa_a, kappa_b)?;
    let state = evolve_state(&point)?;
    let spectrum = BellSpectrum::of_state(&state)?;
    Ok(SweepPoint {
        x_b,
        point,
        spectrum,
        correlations: CorrelationSet::from_spectrum(&spectrum),
    })
}

/// Evaluate the scan in parallel; output keeps increasing `x_b` order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>, DephasingError> {
    let kappa_a = config.spectrum_a.kappa(config.x_a)?;
    sweep_positions(config.x_b_max, config.step)?
        .into_par_iter()
        .map(|x| evaluate_point(config, kappa_a, x))
        .collect()
}

/// Quantity tracked along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    KappaA,
    KappaB,
    /// `|kappa_b| - |kappa_a|`.
    KappaGap,
    /// Eigenvalue by rank, 0 = largest.
    Lambda(usize),
    TotalI,
    ClassicalC,
    QuantumQ,
    Ree,
}

impl Observable {
    pub fn value(&self, p: &SweepPoint) -> f64 {
        match self {
            Self::KappaA => p.point.kappa_a.norm(),
            Self::KappaB => p.point.kappa_b.norm(),
            Self::KappaGap => p.point.kappa_b.norm() - p.point.kappa_a.norm(),
            Self::Lambda(i) => p.spectrum.lambdas()[(*i).min(3)],
            Self::TotalI => p.correlations.total_i,
            Self::ClassicalC => p.correlations.classical_c,
            Self::QuantumQ => p.correlations.quantum_q,
            Self::Ree => p.correlations.ree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

/// First crossing of `level` at or after `after`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingQuery {
    pub level: f64,
    pub direction: Direction,
    pub after: f64,
}

/// Locate the first crossing in a tabulated series by linear interpolation
/// between the bracketing samples.
///
/// A falling crossing needs `y[i] > level >= y[i+1]`, a rising one
/// `y[i] < level <= y[i+1]`.
pub fn find_crossing(xs: &[f64], ys: &[f64], query: &CrossingQuery) -> Result<f64, DephasingError> {
    let n = xs.len().min(ys.len());
    for i in 0..n.saturating_sub(1) {
        if xs[i + 1] < query.after {
            continue;
        }
        let (y0, y1) = (ys[i] - query.level, ys[i + 1] - query.level);
        let falling = y0 > 0.0 && y1 <= 0.0;
        let rising = y0 < 0.0 && y1 >= 0.0;
        let hit = match query.direction {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Either => rising || falling,
        };
        if hit {
            let x = xs[i] + (xs[i + 1] - xs[i]) * y0 / (y0 - y1);
            if x >= query.after {
                return Ok(x);
            }
        }
    }
    Err(DephasingError::NotFound)
}

/// [`find_crossing`] over a sweep.
pub fn find_sweep_crossing(
    series: &[SweepPoint],
    observable: Observable,
    query: &CrossingQuery,
) -> Result<f64, DephasingError> {
    let xs: Vec<f64> = series.iter().map(|p| p.x_b).collect();
    let ys: Vec<f64> = series.iter().map(|p| observable.value(p)).collect();
    find_crossing(&xs, &ys, query)
}
