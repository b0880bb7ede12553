//! Time evolution by direct quadrature of the positive-energy Fourier integral
//!
//! ```text
//! psi(t, x) = (2 pi hbar)^{-1/2} \int dp e^{ipx/hbar} e^{-i E_p t/hbar} C(p)
//! ```
//!
//! with the trapezoid rule on the spectrum's uniform momentum grid.
//!
//! Two evaluators compute the same trapezoid sum. [`Evaluator::Direct`] sums
//! over momenta separately at every spatial point (pairwise, fixed order) and
//! works on any spatial grid. [`Evaluator::Fft`] applies when the spatial grid
//! is aligned with the momentum grid (`dx_grid * dp = 2 pi hbar / M`); the sum
//! at all `M` points of the period is then one inverse DFT of length `M`.
//! Grids built by [`EvolutionConfig::new`] are always aligned.

use std::f64::consts::PI;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::SpatialGrid;
use crate::spectra::{build_spectrum, MomentumSpectrum, SpectrumOptions};
use crate::sum::{pairwise_sum_by, trapezoid};
use crate::units::{dispersion_energy, schrodinger_energy, PhysicalUnits};
use crate::wavepacket::{Shape, WavepacketSpec};

pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-6;

/// Reporting floor ("numerical zero") per shape.
pub fn default_numeric_floor(shape: Shape) -> f64 {
    match shape {
        Shape::CosPow(m) if m >= 8 => 1e-20,
        _ => 1e-13,
    }
}

/// Spatial margin beyond the light cone: `max(10 lambda_C, 5 delta_x)`.
pub fn default_margin(spec: &WavepacketSpec, units: &PhysicalUnits) -> f64 {
    (10.0 * units.compton_wavelength()).max(5.0 * spec.delta_x)
}

/// Largest spatial step: `min(pi delta_x / 40, lambda_C / 10)`.
pub fn default_max_spacing(spec: &WavepacketSpec, units: &PhysicalUnits) -> f64 {
    (PI * spec.delta_x / 40.0).min(units.compton_wavelength() / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    Direct,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    Salpeter,
    Schrodinger,
}

/// Optional overrides for the grids built by [`EvolutionConfig::new`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub cutoff_ratio: Option<f64>,
    pub margin: Option<f64>,
    pub max_spatial_spacing: Option<f64>,
    pub momentum_spacing: Option<f64>,
    pub numeric_floor: Option<f64>,
    pub norm_tolerance: Option<f64>,
    pub max_momentum_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub spectrum: MomentumSpectrum,
    pub spatial: SpatialGrid,
    pub times: Vec<f64>,
    pub numeric_floor: f64,
    pub norm_tolerance: f64,
    pub units: PhysicalUnits,
    /// Light-cone margin the spatial grid was sized with.
    pub margin: f64,
    /// FFT length when `spatial` is aligned with the momentum grid.
    fft_len: Option<usize>,
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times", "every time must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "times must be sorted ascending"));
    }
    Ok(())
}

impl EvolutionConfig {
    /// Builds spectrum and aligned spatial grid for a run over `times`.
    /// The grids are sized for the largest time (at least `horizon`, if given).
    pub fn new(spec: &WavepacketSpec, units: &PhysicalUnits, times: Vec<f64>, settings: &GridSettings) -> Result<Self> {
        let horizon = times.iter().copied().fold(0.0, f64::max);
        Self::with_horizon(spec, units, times, horizon, settings)
    }

    pub fn with_horizon(
        spec: &WavepacketSpec,
        units: &PhysicalUnits,
        times: Vec<f64>,
        horizon: f64,
        settings: &GridSettings,
    ) -> Result<Self> {
        spec.validate()?;
        units.validate()?;
        validate_times(&times)?;
        let horizon = times.iter().copied().fold(horizon, f64::max);
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(invalid("horizon", "must be finite and >= 0"));
        }
        let margin = settings.margin.unwrap_or_else(|| default_margin(spec, units));
        let max_dx = settings
            .max_spatial_spacing
            .unwrap_or_else(|| default_max_spacing(spec, units));
        if !(margin > 0.0 && max_dx > 0.0) {
            return Err(invalid("margin", "margin and spatial spacing must be > 0"));
        }
        let half = spec.half_width() + units.c * horizon + margin;
        let extent = 2.0 * half;
        let dp = settings
            .momentum_spacing
            .unwrap_or(2.0 * PI * units.hbar / (4.0 * extent));

        let mut options = SpectrumOptions::for_shape(spec.shape).with_max_spacing(dp);
        if let Some(r) = settings.cutoff_ratio {
            options = options.with_cutoff(r);
        }
        if let Some(n) = settings.max_momentum_points {
            options.max_points = n;
        }
        let spectrum = build_spectrum(spec, units, &options)?;
        let dp = spectrum.grid.spacing();
        let period = 2.0 * PI * units.hbar / dp;
        if period < 2.0 * extent {
            return Err(invalid(
                "momentum_spacing",
                format!("period {period} of the momentum sum is shorter than twice the grid extent {extent}"),
            ));
        }
        // density is band-limited to twice the spectrum half-width: sample at its Nyquist rate
        let n_p = spectrum.len();
        let min_len = (2 * n_p).max((period / max_dx).ceil() as usize);
        let fft_len = min_len.next_power_of_two();
        let h = period / fft_len as f64;
        let j = (half / h).ceil() as usize;
        if 2 * j + 1 > fft_len {
            return Err(invalid("margin", "spatial window exceeds one period"));
        }
        let spatial = SpatialGrid::new(spec.x0 - j as f64 * h, spec.x0 + j as f64 * h, 2 * j + 1)?;

        Ok(Self {
            numeric_floor: settings
                .numeric_floor
                .unwrap_or_else(|| default_numeric_floor(spec.shape)),
            norm_tolerance: settings.norm_tolerance.unwrap_or(DEFAULT_NORM_TOLERANCE),
            spectrum,
            spatial,
            times,
            units: *units,
            margin,
            fft_len: Some(fft_len),
        })
    }

    /// Config on a caller-supplied spatial grid, evaluated directly.
    pub fn with_grids(
        spectrum: MomentumSpectrum,
        spatial: SpatialGrid,
        times: Vec<f64>,
        numeric_floor: f64,
        units: &PhysicalUnits,
    ) -> Result<Self> {
        validate_times(&times)?;
        if !(numeric_floor > 0.0 && numeric_floor < 1.0) {
            return Err(invalid(
                "numeric_floor",
                format!("must lie in (0, 1), got {numeric_floor}"),
            ));
        }
        let spec = spectrum.spec;
        let (lo, hi) = spec.support();
        Ok(Self {
            spectrum,
            margin: (spatial.x_max - hi).min(lo - spatial.x_min),
            spatial,
            times,
            numeric_floor,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            units: *units,
            fft_len: None,
        })
    }

    pub fn spec(&self) -> &WavepacketSpec {
        &self.spectrum.spec
    }

    pub fn fft_len(&self) -> Option<usize> {
        self.fft_len
    }

    /// Largest time whose light cone plus margin still fits inside the grid.
    pub fn horizon(&self) -> f64 {
        let spec = self.spec();
        let reach = (self.spatial.x_max - spec.x0).min(spec.x0 - self.spatial.x_min);
        ((reach - spec.half_width() - self.margin) / self.units.c).max(0.0)
    }

    pub fn evaluator(&self) -> Evaluator {
        if self.fft_len.is_some() {
            Evaluator::Fft
        } else {
            Evaluator::Direct
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySnapshot {
    pub t: f64,
    pub grid: SpatialGrid,
    pub amplitude: Vec<Complex64>,
    pub density: Vec<f64>,
    pub numeric_floor: f64,
}

impl DensitySnapshot {
    pub fn from_amplitude(t: f64, grid: SpatialGrid, amplitude: Vec<Complex64>, numeric_floor: f64) -> Self {
        let density = amplitude.iter().map(|a| a.norm_sqr()).collect();
        Self {
            t,
            grid,
            amplitude,
            density,
            numeric_floor,
        }
    }

    /// The analytic initial state sampled on `grid`.
    pub fn initial(spec: &WavepacketSpec, grid: SpatialGrid, units: &PhysicalUnits, numeric_floor: f64) -> Self {
        let amplitude = grid.points().into_iter().map(|x| spec.amplitude(x, units)).collect();
        Self::from_amplitude(0.0, grid, amplitude, numeric_floor)
    }

    pub fn norm(&self) -> f64 {
        trapezoid(&self.density, self.grid.spacing())
    }

    pub fn below_floor(&self, i: usize) -> bool {
        self.density[i] < self.numeric_floor
    }

    pub fn below_floor_count(&self) -> usize {
        (0..self.density.len()).filter(|&i| self.below_floor(i)).count()
    }

    /// Largest density at points with `|x - center| > half`.
    pub fn max_density_beyond(&self, center: f64, half: f64) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.density)
            .filter(|(x, _)| (**x - center).abs() > half)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
    }
}

/// Relative L2 distance `||a - b|| / ||b||` between amplitudes on one grid.
pub fn relative_l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = pairwise_sum_by(a.len(), &|i| (a[i] - b[i]).norm_sqr());
    let reference = pairwise_sum_by(b.len(), &|i| b[i].norm_sqr());
    (diff / reference).sqrt()
}

/// Absolute L2 distance between two real fields sampled on `grid`.
pub fn l2_distance(a: &[f64], b: &[f64], grid: &SpatialGrid) -> f64 {
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    trapezoid(&sq, grid.spacing()).sqrt()
}

fn phase_weights(config: &EvolutionConfig, t: f64, dynamics: Dynamics) -> Vec<Complex64> {
    let sp = &config.spectrum;
    let units = &config.units;
    let weight = |k: usize| -> Complex64 {
        let p = sp.grid.point(k);
        let energy = match dynamics {
            Dynamics::Salpeter => dispersion_energy(p, units),
            Dynamics::Schrodinger => schrodinger_energy(p, units),
        };
        sp.grid.trapezoid_weight(k) * sp.values[k] * Complex64::from_polar(1.0, -energy * t / units.hbar)
    };
    #[cfg(feature = "parallel")]
    {
        (0..sp.len()).into_par_iter().map(weight).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..sp.len()).map(weight).collect()
    }
}

fn evaluate_direct(config: &EvolutionConfig, weights: &[Complex64]) -> Vec<Complex64> {
    let sp = &config.spectrum;
    let hbar = config.units.hbar;
    let center = sp.grid.center();
    let scale = sp.grid.spacing() / (2.0 * PI * hbar).sqrt();
    let at = |x: f64| -> Complex64 {
        let s = pairwise_sum_by(weights.len(), &|k| {
            weights[k] * Complex64::from_polar(1.0, sp.grid.offset(k) * x / hbar)
        });
        s * Complex64::from_polar(scale, center * x / hbar)
    };
    let xs = config.spatial.points();
    #[cfg(feature = "parallel")]
    {
        xs.par_iter().map(|&x| at(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| at(x)).collect()
    }
}

fn evaluate_fft(config: &EvolutionConfig, weights: &[Complex64], m: usize) -> Vec<Complex64> {
    let sp = &config.spectrum;
    let hbar = config.units.hbar;
    let x0 = config.spec().x0;
    let dp = sp.grid.spacing();
    let p_min = sp.grid.point(0);
    let h = 2.0 * PI * hbar / (dp * m as f64);

    // x_j = x0 + (j - m/2) h, so e^{i k dp x_j} = e^{i k dp x0} (-1)^k e^{2 pi i k j / m}
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, (b, w)) in buf.iter_mut().zip(weights).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let shift = if x0 == 0.0 {
            Complex64::new(sign, 0.0)
        } else {
            Complex64::from_polar(sign, k as f64 * dp * x0 / hbar)
        };
        *b = w * shift;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(m).process(&mut buf);

    let scale = dp / (2.0 * PI * hbar).sqrt();
    let half_pts = (config.spatial.n_points - 1) / 2;
    let first = m / 2 - half_pts;
    (0..config.spatial.n_points)
        .map(|i| {
            let j = first + i;
            let x = x0 + (j as f64 - (m / 2) as f64) * h;
            buf[j] * Complex64::from_polar(scale, p_min * x / hbar)
        })
        .collect()
}

fn evolve_with(config: &EvolutionConfig, t: f64, dynamics: Dynamics, evaluator: Evaluator) -> Result<DensitySnapshot> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let weights = phase_weights(config, t, dynamics);
    let amplitude = match (evaluator, config.fft_len) {
        (Evaluator::Fft, Some(m)) => evaluate_fft(config, &weights, m),
        (Evaluator::Fft, None) => {
            return Err(invalid(
                "evaluator",
                "spatial grid is not aligned for the FFT evaluator",
            ))
        }
        (Evaluator::Direct, _) => evaluate_direct(config, &weights),
    };
    let snap = DensitySnapshot::from_amplitude(t, config.spatial, amplitude, config.numeric_floor);
    let norm = snap.norm();
    if !((norm - 1.0).abs() <= config.norm_tolerance) {
        return Err(Error::UnderResolved {
            t,
            norm,
            tolerance: config.norm_tolerance,
        });
    }
    Ok(snap)
}

/// Salpeter evolution to time `t`.
pub fn evolve_momentum(config: &EvolutionConfig, t: f64) -> Result<DensitySnapshot> {
    evolve_with(config, t, Dynamics::Salpeter, config.evaluator())
}

/// Same quadrature with an explicitly chosen evaluator.
pub fn evolve_momentum_using(config: &EvolutionConfig, t: f64, evaluator: Evaluator) -> Result<DensitySnapshot> {
    evolve_with(config, t, Dynamics::Salpeter, evaluator)
}

/// Non-relativistic reference: phase `e^{-i (m c^2 + p^2/2m) t / hbar}`.
pub fn evolve_schrodinger(config: &EvolutionConfig, t: f64) -> Result<DensitySnapshot> {
    evolve_with(config, t, Dynamics::Schrodinger, config.evaluator())
}

/// Snapshots at every requested time on the config's shared grid.
pub fn heatmap(config: &EvolutionConfig, times: &[f64]) -> Result<Vec<DensitySnapshot>> {
    if times.is_empty() {
        return Err(invalid("times", "need at least one time"));
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    if t_max > config.horizon() * (1.0 + 1e-12) {
        let spec = config.spec();
        let reach = spec.half_width() + config.units.c * t_max;
        return Err(Error::Coverage {
            x_min: config.spatial.x_min,
            x_max: config.spatial.x_max,
            left: spec.x0 - reach,
            right: spec.x0 + reach,
            margin: config.margin,
        });
    }
    map_times(times, |t| evolve_momentum(config, t), config.fft_len.unwrap_or(0))
}

/// Runs `f` over `times`, in parallel when each evaluation is small enough
/// that concurrent FFT buffers stay cheap. Output order follows `times`.
pub(crate) fn map_times<T, F>(times: &[f64], f: F, fft_len: usize) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if fft_len < 1 << 20 {
        return times.par_iter().map(|&t| f(t)).collect();
    }
    let _ = fft_len;
    times.iter().map(|&t| f(t)).collect()
}
