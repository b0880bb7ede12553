//! Positive-energy propagator
//!
//! ```text
//! K(dt, dx) = (2 pi hbar)^{-1} \int dp e^{i p dx / hbar} e^{-i E_p dt / hbar}
//! ```
//!
//! so that `psi(t, x) = \int dx' K(t, x - x') psi(0, x')`. Outside the light
//! cone, with `s = sqrt(dx^2 - c^2 dt^2)`,
//!
//! ```text
//! K(dt, dx) = i m c^2 dt / (pi hbar s) K1(m c s / hbar)
//! ```
//!
//! which is purely imaginary with positive imaginary part for `dt > 0`. The
//! constant and the factor `i` are pinned by agreement with the regulated
//! momentum integral ([`kernel_numeric`]).
//!
//! The momentum integral does not converge absolutely. [`kernel_numeric`]
//! damps it with `e^{-(p/P)^2}`, which smooths `K` with a Gaussian of variance
//! `2 hbar^2 / P^2`; the error is a series in `1/P^2` and three regulator
//! values are Richardson-extrapolated. [`kernel_band_limited`] instead cuts the
//! integral at `|p| <= B`; that is the exact propagator for states sampled at
//! spacing `pi hbar / B`, and drives [`evolve_convolution`].

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_k1_flagged;
use crate::error::{invalid, Error, Result};
use crate::evolve::DensitySnapshot;
use crate::grid::MomentumGrid;
use crate::sum::pairwise_sum_by;
use crate::units::{dispersion_energy, PhysicalUnits};

/// Regulator multiples used for the Richardson extrapolation.
const REGULATOR_STEPS: [f64; 3] = [1.0, 2.0, 4.0];
/// Momentum range, in units of the largest regulator scale.
const REGULATOR_RANGE: f64 = 6.5;
/// Required `e^{-(p_end/P)^2}` at the grid ends.
const ENDPOINT_ENVELOPE: f64 = 1e-8;
const GAUSS_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    SpaceLike,
    TimeLike,
    LightCone,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::SpaceLike => "spacelike",
            Region::TimeLike => "timelike",
            Region::LightCone => "lightcone",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub dt: f64,
    pub dx: f64,
    /// `None` inside the light-cone band, where the kernel is not evaluated.
    pub value: Option<Complex64>,
    pub region: Region,
}

/// Band around the cone, in `s^2` units: `1e-6 lambda_C^2`.
pub fn lightcone_band(units: &PhysicalUnits) -> f64 {
    1e-6 * units.compton_wavelength().powi(2)
}

/// `dx^2 - c^2 dt^2`.
pub fn interval(dt: f64, dx: f64, units: &PhysicalUnits) -> f64 {
    let cdt = units.c * dt;
    (dx - cdt) * (dx + cdt)
}

pub fn classify(dt: f64, dx: f64, units: &PhysicalUnits) -> Region {
    let s2 = interval(dt, dx, units);
    if s2.abs() < lightcone_band(units) {
        Region::LightCone
    } else if s2 > 0.0 {
        Region::SpaceLike
    } else {
        Region::TimeLike
    }
}

fn check_args(dt: f64, dx: f64, units: &PhysicalUnits) -> Result<()> {
    units.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    if !dx.is_finite() {
        return Err(invalid("dx", "must be finite"));
    }
    Ok(())
}

/// Closed Bessel form; space-like separations only.
pub fn kernel_closed_form(dt: f64, dx: f64, units: &PhysicalUnits) -> Result<KernelSample> {
    check_args(dt, dx, units)?;
    if classify(dt, dx, units) != Region::SpaceLike {
        return Err(Error::NotSpaceLike { dt, dx });
    }
    let s = interval(dt, dx, units).sqrt();
    let (k1, _) = bessel_k1_flagged(units.compton_momentum() * s / units.hbar)?;
    let im = units.m * units.c * units.c * dt / (PI * units.hbar * s) * k1;
    Ok(KernelSample {
        dt,
        dx,
        value: Some(Complex64::new(0.0, im)),
        region: Region::SpaceLike,
    })
}

/// Regulated trapezoid sum for one regulator scale on a grid symmetric about
/// zero. Terms at `+p` and `-p` are paired, which makes the result exactly
/// even in `dx`.
pub fn kernel_regulated(dt: f64, dx: f64, units: &PhysicalUnits, grid: &MomentumGrid, scale: f64) -> Result<Complex64> {
    check_args(dt, dx, units)?;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(invalid("scale", "regulator scale must be finite and > 0"));
    }
    if grid.n_points.is_multiple_of(2) || grid.center().abs() > 1e-12 * grid.half_width() {
        return Err(invalid(
            "grid",
            "kernel grid must be symmetric about p = 0 with odd length",
        ));
    }
    let p_end = grid.half_width();
    let envelope = (-(p_end / scale).powi(2)).exp();
    if envelope > ENDPOINT_ENVELOPE {
        return Err(Error::Convergence(format!(
            "regulated integrand at p = {p_end} is {envelope:e} of its peak (need <= {ENDPOINT_ENVELOPE:e})"
        )));
    }
    let half = (grid.n_points - 1) / 2;
    let dp = grid.spacing();
    let hbar = units.hbar;
    let sum = pairwise_sum_by(half + 1, &|k: usize| {
        let p = k as f64 * dp;
        // k = 0 appears once; the two endpoints carry half weight each
        let w = if k == 0 || k == half { 1.0 } else { 2.0 };
        let damp = (-(p / scale).powi(2)).exp();
        let phase = Complex64::from_polar(1.0, -dispersion_energy(p, units) * dt / hbar);
        phase * (w * damp * (p * dx / hbar).cos())
    });
    Ok(sum * (dp / (2.0 * PI * hbar)))
}

/// Distance in `dx` from the cone `|dx| = c dt`.
fn cone_distance(dt: f64, dx: f64, units: &PhysicalUnits) -> f64 {
    (dx.abs() - units.c * dt).abs()
}

/// Regulated momentum integral extrapolated to `P -> infinity`. Valid on both
/// sides of the cone; inside the band it is not evaluated.
pub fn kernel_numeric(dt: f64, dx: f64, units: &PhysicalUnits) -> Result<KernelSample> {
    check_args(dt, dx, units)?;
    let region = classify(dt, dx, units);
    if region == Region::LightCone {
        return Ok(KernelSample {
            dt,
            dx,
            value: None,
            region,
        });
    }
    let hbar = units.hbar;
    let lambda = units.compton_wavelength();
    let d = cone_distance(dt, dx, units);
    let base = 40.0 * (units.compton_momentum()).max(hbar / d);
    let p_end = REGULATOR_RANGE * base * REGULATOR_STEPS[2];
    let period = 2.0 * (dx.abs() + units.c * dt) + 60.0 * lambda;
    let grid = MomentumGrid::centered(0.0, p_end, 2.0 * PI * hbar / period)?;

    let mut v = [Complex64::new(0.0, 0.0); 3];
    for (slot, step) in v.iter_mut().zip(REGULATOR_STEPS) {
        *slot = kernel_regulated(dt, dx, units, &grid, base * step)?;
    }
    // error ~ a/P^2 + b/P^4
    let r1 = (4.0 * v[1] - v[0]) / 3.0;
    let r2 = (4.0 * v[2] - v[1]) / 3.0;
    let value = (16.0 * r2 - r1) / 15.0;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Convergence(format!("non-finite kernel at dt={dt}, dx={dx}")));
    }
    Ok(KernelSample {
        dt,
        dx,
        value: Some(value),
        region,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Momentum nodes/weights on [0, band] for phases up to `max_phase_rate`.
fn band_rule(band: f64, max_phase_rate: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = ((band * max_phase_rate / PI).ceil() as usize).max(1) + 4;
    let width = band / panels as f64;
    let (z, w) = gauss_legendre(GAUSS_NODES);
    let mut nodes = Vec::with_capacity(panels * GAUSS_NODES);
    let mut weights = Vec::with_capacity(panels * GAUSS_NODES);
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * width;
        for (zi, wi) in z.iter().zip(&w) {
            nodes.push(mid + 0.5 * width * zi);
            weights.push(0.5 * width * wi);
        }
    }
    (nodes, weights)
}

fn band_sum(dt: f64, dx: f64, units: &PhysicalUnits, nodes: &[f64], weights: &[f64]) -> Complex64 {
    let hbar = units.hbar;
    let s = pairwise_sum_by(nodes.len(), &|k| {
        let p = nodes[k];
        Complex64::from_polar(
            weights[k] * (p * dx / hbar).cos(),
            -dispersion_energy(p, units) * dt / hbar,
        )
    });
    s / (PI * hbar)
}

/// Propagator restricted to `|p| <= band`.
pub fn kernel_band_limited(dt: f64, dx: f64, units: &PhysicalUnits, band: f64) -> Result<Complex64> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(invalid("dt", format!("must be finite and >= 0, got {dt}")));
    }
    if !(band.is_finite() && band > 0.0) {
        return Err(invalid("band", "must be finite and > 0"));
    }
    let (nodes, weights) = band_rule(band, (dx.abs() + units.c * dt) / units.hbar);
    Ok(band_sum(dt, dx, units, &nodes, &weights))
}

/// `psi(t, x_i) = h sum_j K_B(t, x_i - x_j) psi(0, x_j)` with the band-limited
/// kernel at the grid's Nyquist band `B = pi hbar / h`.
pub fn evolve_convolution(initial: &DensitySnapshot, t: f64, units: &PhysicalUnits) -> Result<DensitySnapshot> {
    units.validate()?;
    if initial.t != 0.0 {
        return Err(invalid("initial", "convolution starts from a t = 0 snapshot"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be finite and > 0, got {t}")));
    }
    let n = initial.amplitude.len();
    let edge = initial.density[0].max(initial.density[n - 1]);
    if edge > initial.numeric_floor {
        return Err(invalid("initial", "initial state must vanish at both grid ends"));
    }
    let h = initial.grid.spacing();
    let band = PI * units.hbar / h;
    let max_lag = (n - 1) as f64 * h;
    let (nodes, weights) = band_rule(band, (max_lag + units.c * t) / units.hbar);

    let lag = |l: usize| band_sum(t, l as f64 * h, units, &nodes, &weights);
    #[cfg(feature = "parallel")]
    let kernel: Vec<Complex64> = (0..n).into_par_iter().map(lag).collect();
    #[cfg(not(feature = "parallel"))]
    let kernel: Vec<Complex64> = (0..n).map(lag).collect();

    let psi0 = &initial.amplitude;
    let at = |i: usize| -> Complex64 { pairwise_sum_by(n, &|j| kernel[i.abs_diff(j)] * psi0[j]) * h };
    #[cfg(feature = "parallel")]
    let amplitude: Vec<Complex64> = (0..n).into_par_iter().map(at).collect();
    #[cfg(not(feature = "parallel"))]
    let amplitude: Vec<Complex64> = (0..n).map(at).collect();

    Ok(DensitySnapshot::from_amplitude(
        t,
        initial.grid,
        amplitude,
        initial.numeric_floor,
    ))
}

/// Exponential decay rate of the space-like kernel: least-squares slope of
/// `ln(|K| s^{3/2})` against `s` over `[s_min, s_max]` at fixed `dt`,
/// returned as a positive rate. The `s^{-3/2}` factor is the algebraic part
/// of the closed form's asymptote; the rate itself tends to `m c / hbar`.
pub fn decay_rate(dt: f64, s_min: f64, s_max: f64, samples: usize, units: &PhysicalUnits) -> Result<f64> {
    if !(s_min > 0.0 && s_max > s_min && samples >= 2) {
        return Err(invalid("s_max", "need 0 < s_min < s_max and at least two samples"));
    }
    let cdt = units.c * dt;
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = s_min + (s_max - s_min) * i as f64 / (samples - 1) as f64;
        let dx = (s * s + cdt * cdt).sqrt();
        let k = kernel_closed_form(dt, dx, units)?
            .value
            .map(|v| v.norm())
            .unwrap_or(0.0);
        if !(k > 0.0) {
            return Err(Error::Convergence(format!("kernel underflows at s = {s}")));
        }
        pts.push((s, k.ln() + 1.5 * s.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    Ok(-sxy / sxx)
}

/// One row of a kernel lattice: both evaluation paths where defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRow {
    pub dt: f64,
    pub dx: f64,
    pub region: Region,
    pub numeric: Option<Complex64>,
    pub closed: Option<Complex64>,
}

impl LatticeRow {
    pub fn relative_difference(&self) -> Option<f64> {
        match (self.numeric, self.closed) {
            (Some(a), Some(b)) => Some((a - b).norm() / b.norm()),
            _ => None,
        }
    }
}

/// Evaluates every `(dt, dx)` pair, `dt` outermost. Output order is fixed.
pub fn kernel_lattice(dts: &[f64], dxs: &[f64], units: &PhysicalUnits) -> Result<Vec<LatticeRow>> {
    let pairs: Vec<(f64, f64)> = dts.iter().flat_map(|&dt| dxs.iter().map(move |&dx| (dt, dx))).collect();
    let row = |&(dt, dx): &(f64, f64)| -> Result<LatticeRow> {
        let numeric = kernel_numeric(dt, dx, units)?;
        let closed = match numeric.region {
            Region::SpaceLike => kernel_closed_form(dt, dx, units)?.value,
            _ => None,
        };
        Ok(LatticeRow {
            dt,
            dx,
            region: numeric.region,
            numeric: numeric.value,
            closed,
        })
    };
    #[cfg(feature = "parallel")]
    {
        pairs.par_iter().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs.iter().map(row).collect()
    }
}
