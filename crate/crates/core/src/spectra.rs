//! Momentum-space amplitudes of the compact initial states.
//!
//! With `k = (p - p0) / hbar` and `a = pi * delta_x / 2`, the profile transform
//! `F(k) = \int f(x) e^{-ikx} dx` has the closed forms
//!
//! * rect: `2 sin(k a) / k`
//! * cos^m: `(-1)^{m/2} (2 m! / delta_x^m) sin(k a) / (k prod_n (k - 2n/dx)(k + 2n/dx))`
//!
//! and the normalized spectrum is `C(p) = N F(k) e^{-i k x0}`. Every root of
//! the cos^m denominator is also a zero of `sin(k a)`. Near a root `r` the
//! evaluation divides out the vanishing factor exactly:
//! `sin(k a) / (k - r) = (-1)^n a sinc(a (k - r))`, with `sinc` expanded as a
//! Taylor series for tiny arguments, so the result is finite and smooth
//! across every removable singularity.

use std::f64::consts::PI;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::MomentumGrid;
use crate::sum::pairwise_sum_by;
use crate::units::PhysicalUnits;
use crate::wavepacket::{Shape, WavepacketSpec};

/// Half-width of the neighbourhood around each denominator root in which the
/// cancelled form is mandatory, in units of the root spacing `2 / delta_x`.
pub const POLE_EPSILON: f64 = 1e-6;

const SINC_SERIES_BELOW: f64 = 1e-3;

/// Default `|C(p_end)| / max|C|` for the cosine shapes.
pub const COSPOW_CUTOFF: f64 = 1e-12;
/// Default endpoint ratio for the rectangular shape. Its spectrum decays only
/// as `1/k`, so the grid grows as `1 / ratio`.
pub const RECT_CUTOFF: f64 = 1e-4;

const MAX_CUTOFF_EXPANSIONS: usize = 200;

pub fn default_cutoff(shape: Shape) -> f64 {
    match shape {
        Shape::Rect => RECT_CUTOFF,
        Shape::CosPow(_) => COSPOW_CUTOFF,
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < SINC_SERIES_BELOW {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0)
    } else {
        z.sin() / z
    }
}

/// Index of the sine zero nearest to `k`: `k a = n pi` at `k = 2n / delta_x`.
fn nearest_zero(k: f64, delta_x: f64) -> (f64, f64) {
    let n = (k * delta_x / 2.0).round();
    (n, 2.0 * n / delta_x)
}

fn parity(n: f64) -> f64 {
    if n.rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `F(k)` for the flat profile.
pub fn rect_transform(k: f64, delta_x: f64) -> f64 {
    let a = PI * delta_x / 2.0;
    // 2 sin(ka)/k with the argument reduced around the nearest sine zero
    let (n, r) = nearest_zero(k, delta_x);
    if n == 0.0 {
        return 2.0 * a * sinc(k * a);
    }
    2.0 * parity(n) * (a * (k - r)).sin() / k
}

/// Signed prefactor `(-1)^{m/2} 2 m! / delta_x^m`.
fn cospow_prefactor(m: u32, delta_x: f64) -> f64 {
    let mut v = 2.0;
    for j in 1..=m {
        v *= j as f64 / delta_x;
    }
    if (m / 2) % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `F(k)` for `cos^m(x / delta_x)` on its window.
pub fn cospow_transform(k: f64, m: u32, delta_x: f64) -> f64 {
    let a = PI * delta_x / 2.0;
    let half = (m / 2) as i64;
    let (n, r) = nearest_zero(k, delta_x);
    let delta = k - r;
    // sin(k a) / (k - r), finite for delta -> 0
    let reduced = parity(n) * a * sinc(a * delta);
    let root_index = n as i64;
    if root_index.abs() > half {
        // r is not a denominator root; the factor (k - r) is not in D(k)
        let mut den = k;
        for j in 1..=half {
            let b = 2.0 * j as f64 / delta_x;
            den *= (k - b) * (k + b);
        }
        return cospow_prefactor(m, delta_x) * reduced * delta / den;
    }
    let mut others = 1.0;
    for j in -half..=half {
        if j != root_index {
            others *= k - 2.0 * j as f64 / delta_x;
        }
    }
    cospow_prefactor(m, delta_x) * reduced / others
}

/// Profile transform `F(k)` for any supported shape.
pub fn profile_transform(k: f64, spec: &WavepacketSpec) -> f64 {
    match spec.shape {
        Shape::Rect => rect_transform(k, spec.delta_x),
        Shape::CosPow(m) => cospow_transform(k, m, spec.delta_x),
    }
}

/// Upper envelope of `|F(k)|` obtained by replacing `|sin|` with 1; valid and
/// decreasing beyond the outermost denominator root.
pub fn transform_envelope(k: f64, spec: &WavepacketSpec) -> f64 {
    let k = k.abs();
    match spec.shape {
        Shape::Rect => 2.0 / k,
        Shape::CosPow(m) => {
            let mut den = k;
            for j in 1..=m / 2 {
                let b = 2.0 * j as f64 / spec.delta_x;
                den *= (k * k - b * b).abs();
            }
            cospow_prefactor(m, spec.delta_x).abs() / den
        }
    }
}

fn wavenumber(p: f64, spec: &WavepacketSpec, units: &PhysicalUnits) -> f64 {
    (p - spec.p0) / units.hbar
}

fn center_phase(k: f64, spec: &WavepacketSpec) -> Complex64 {
    if spec.x0 == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -k * spec.x0)
    }
}

/// Un-normalized rectangular spectrum `2 sin(k a)/k e^{-i k x0}`.
pub fn eval_spectrum_rect(p: f64, spec: &WavepacketSpec, units: &PhysicalUnits) -> Result<Complex64> {
    if spec.shape != Shape::Rect {
        return Err(invalid("shape", format!("expected rect, got {}", spec.shape)));
    }
    let k = wavenumber(p, spec, units);
    Ok(rect_transform(k, spec.delta_x) * center_phase(k, spec))
}

/// Un-normalized cos^m spectrum (closed form, finite at every root).
pub fn eval_spectrum_cospow(p: f64, spec: &WavepacketSpec, units: &PhysicalUnits) -> Result<Complex64> {
    let Shape::CosPow(m) = spec.shape else {
        return Err(invalid("shape", format!("expected a cosine power, got {}", spec.shape)));
    };
    let k = wavenumber(p, spec, units);
    Ok(cospow_transform(k, m, spec.delta_x) * center_phase(k, spec))
}

/// Normalized closed-form amplitude `(2 pi hbar)^{-1/2} F(k) e^{-ikx0} / ||f||`,
/// consistent with [`WavepacketSpec::amplitude`].
pub fn analytic_spectrum(p: f64, spec: &WavepacketSpec, units: &PhysicalUnits) -> Complex64 {
    let k = wavenumber(p, spec, units);
    let scale = 1.0 / ((2.0 * PI * units.hbar).sqrt() * spec.profile_norm_sq().sqrt());
    scale * profile_transform(k, spec) * center_phase(k, spec)
}

/// Brute-force Fourier transform of the normalized initial amplitude,
/// `(2 pi hbar)^{-1/2} \int psi(0,x) e^{-ipx/hbar} dx`, by the trapezoid rule on
/// `quad_points` intervals with two Richardson steps. Reference values for tests.
pub fn oracle_spectrum(p: f64, spec: &WavepacketSpec, units: &PhysicalUnits, quad_points: usize) -> Result<Complex64> {
    if quad_points < 1000 {
        return Err(invalid("quad_points", format!("need at least 1000, got {quad_points}")));
    }
    let (lo, hi) = spec.support();
    let norm = 1.0 / spec.profile_norm_sq().sqrt();
    // Integrate the window interior; the endpoint values are the one-sided limits.
    let f = |x: f64| -> Complex64 {
        let u = (x - spec.x0).clamp(-spec.half_width(), spec.half_width());
        let prof = match spec.shape {
            Shape::Rect => 1.0,
            Shape::CosPow(m) => (u / spec.delta_x).cos().powi(m as i32),
        };
        Complex64::from_polar(norm * prof, (spec.p0 - p) * x / units.hbar)
    };
    let trap = |n: usize| -> Complex64 {
        let h = (hi - lo) / n as f64;
        let interior = pairwise_sum_by(n - 1, &|i| f(lo + (i + 1) as f64 * h));
        (interior + 0.5 * (f(lo) + f(hi))) * h
    };
    let n = quad_points.div_ceil(4) * 4;
    let (t1, t2, t4) = (trap(n / 4), trap(n / 2), trap(n));
    let r1 = (4.0 * t2 - t1) / 3.0;
    let r2 = (4.0 * t4 - t2) / 3.0;
    let romberg = (16.0 * r2 - r1) / 15.0;
    Ok(romberg / (2.0 * PI * units.hbar).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Endpoint condition `|C(p_end)| <= cutoff_ratio * max|C|`.
    pub cutoff_ratio: f64,
    /// Minimum number of grid points.
    pub target_points: usize,
    /// Upper bound on the momentum spacing, if any.
    pub max_spacing: Option<f64>,
    /// Refuse grids larger than this.
    pub max_points: usize,
}

impl SpectrumOptions {
    pub fn for_shape(shape: Shape) -> Self {
        Self {
            cutoff_ratio: default_cutoff(shape),
            target_points: 1024,
            max_spacing: None,
            max_points: 1 << 24,
        }
    }

    pub fn with_cutoff(mut self, cutoff_ratio: f64) -> Self {
        self.cutoff_ratio = cutoff_ratio;
        self
    }

    pub fn with_max_spacing(mut self, dp: f64) -> Self {
        self.max_spacing = Some(dp);
        self
    }
}

/// Sampled, normalized momentum amplitude on a grid symmetric about `p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum {
    pub spec: WavepacketSpec,
    pub grid: MomentumGrid,
    pub values: Vec<Complex64>,
    /// Multiplies the closed-form `F(k) e^{-ikx0}` to give `values`.
    pub norm_constant: f64,
    /// Achieved `|C(p_end)| / max|C|` envelope bound.
    pub cutoff_ratio: f64,
}

impl MomentumSpectrum {
    /// Trapezoid `\int |C|^2 dp` over the grid.
    pub fn norm(&self) -> f64 {
        let n = self.values.len();
        let s = pairwise_sum_by(n, &|k| self.grid.trapezoid_weight(k) * self.values[k].norm_sqr());
        s * self.grid.spacing()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Smallest wavenumber beyond which the envelope stays below `ratio * F(0)`.
pub fn cutoff_wavenumber(spec: &WavepacketSpec, ratio: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(invalid("cutoff_ratio", format!("must lie in (0, 1), got {ratio}")));
    }
    let peak = profile_transform(0.0, spec).abs();
    let outermost = match spec.shape {
        Shape::Rect => 0.0,
        Shape::CosPow(m) => m as f64 / spec.delta_x,
    };
    let below = |k: f64| transform_envelope(k, spec) <= ratio * peak;
    let mut hi = outermost + 2.0 / spec.delta_x;
    let mut lo = outermost;
    let mut grown = 0;
    while !below(hi) {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > MAX_CUTOFF_EXPANSIONS {
            return Err(Error::CutoffNotMet {
                achieved: transform_envelope(hi, spec) / peak,
                requested: ratio,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Builds the normalized spectrum on a grid centred on `p0` whose endpoints
/// satisfy the cutoff condition.
pub fn build_spectrum(
    spec: &WavepacketSpec,
    units: &PhysicalUnits,
    options: &SpectrumOptions,
) -> Result<MomentumSpectrum> {
    spec.validate()?;
    units.validate()?;
    if options.target_points < 64 {
        return Err(invalid(
            "target_points",
            format!("need at least 64, got {}", options.target_points),
        ));
    }
    let k_cut = cutoff_wavenumber(spec, options.cutoff_ratio)?;
    let half = units.hbar * k_cut;
    let mut dp = 2.0 * half / (options.target_points - 1) as f64;
    if let Some(max_dp) = options.max_spacing {
        if !(max_dp > 0.0) {
            return Err(invalid("max_spacing", "must be > 0"));
        }
        dp = dp.min(max_dp);
    }
    let needed = 2.0 * (half / dp).ceil() + 1.0;
    if needed > options.max_points as f64 {
        let affordable = 0.5 * (options.max_points as f64 - 1.0) * dp / units.hbar;
        let peak = profile_transform(0.0, spec).abs();
        return Err(Error::CutoffNotMet {
            achieved: transform_envelope(affordable, spec) / peak,
            requested: options.cutoff_ratio,
        });
    }
    let grid = MomentumGrid::centered(spec.p0, half, dp)?;
    let raw = |k: usize| -> Complex64 {
        let kk = grid.offset(k) / units.hbar;
        profile_transform(kk, spec) * center_phase(kk, spec)
    };
    #[cfg(feature = "parallel")]
    let mut values: Vec<Complex64> = (0..grid.n_points).into_par_iter().map(raw).collect();
    #[cfg(not(feature = "parallel"))]
    let mut values: Vec<Complex64> = (0..grid.n_points).map(raw).collect();

    let norm = pairwise_sum_by(grid.n_points, &|k| grid.trapezoid_weight(k) * values[k].norm_sqr()) * grid.spacing();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(invalid("spectrum", format!("non-finite norm {norm}")));
    }
    let norm_constant = 1.0 / norm.sqrt();
    for v in &mut values {
        *v *= norm_constant;
    }
    let peak = profile_transform(0.0, spec).abs();
    Ok(MomentumSpectrum {
        spec: *spec,
        grid,
        values,
        norm_constant,
        cutoff_ratio: transform_envelope(k_cut, spec) / peak,
    })
}
