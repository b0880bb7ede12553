//! Browser bindings: one density snapshot, an outside-fraction curve, and the
//! space-like propagator profile. The plain functions are usable (and tested)
//! on any target; the `#[wasm_bindgen]` wrappers only convert errors.

use lightcone_core::analysis::{fraction_series, light_cone_edges, log_times};
use lightcone_core::kernel::{classify, kernel_closed_form, Region};
use lightcone_core::{
    evolve_momentum, EvolutionConfig, FractionConvention, GridSettings, PhysicalUnits, Result, Shape, WavepacketSpec,
};
use wasm_bindgen::prelude::*;

/// Densities above this many grid points are decimated for plotting.
const MAX_PLOT_POINTS: usize = 4000;

fn packet(shape: &str, delta_x: f64, p0: f64) -> Result<WavepacketSpec> {
    WavepacketSpec::new(shape.parse::<Shape>()?, delta_x, p0)
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Snapshot {
    x: Vec<f64>,
    density: Vec<f64>,
    floor: f64,
    norm: f64,
    left: f64,
    right: f64,
}

#[wasm_bindgen]
impl Snapshot {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }
    /// Reporting floor: values below it are numerical zero.
    #[wasm_bindgen(getter)]
    pub fn floor(&self) -> f64 {
        self.floor
    }
    #[wasm_bindgen(getter)]
    pub fn norm(&self) -> f64 {
        self.norm
    }
    /// Left light-cone edge at this time.
    #[wasm_bindgen(getter)]
    pub fn left(&self) -> f64 {
        self.left
    }
    #[wasm_bindgen(getter)]
    pub fn right(&self) -> f64 {
        self.right
    }
}

/// Density at time `t` in natural units, on a window extending `view` beyond the light cone.
pub fn compute_snapshot(shape: &str, delta_x: f64, p0: f64, t: f64, view: f64) -> Result<Snapshot> {
    let units = PhysicalUnits::natural();
    let spec = packet(shape, delta_x, p0)?;
    let config = EvolutionConfig::new(&spec, &units, vec![t], &GridSettings::default())?;
    let snap = evolve_momentum(&config, t)?;
    let (left, right) = light_cone_edges(&spec, t, &units);
    let keep: Vec<usize> = (0..snap.grid.n_points)
        .filter(|&i| {
            let x = snap.grid.point(i);
            x >= left - view && x <= right + view
        })
        .collect();
    let stride = keep.len().div_ceil(MAX_PLOT_POINTS).max(1);
    let picked: Vec<usize> = keep.into_iter().step_by(stride).collect();
    Ok(Snapshot {
        x: picked.iter().map(|&i| snap.grid.point(i)).collect(),
        density: picked.iter().map(|&i| snap.density[i]).collect(),
        floor: snap.numeric_floor,
        norm: snap.norm(),
        left,
        right,
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Series {
    times: Vec<f64>,
    fractions: Vec<f64>,
}

#[wasm_bindgen]
impl Series {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn fractions(&self) -> Vec<f64> {
        self.fractions.clone()
    }
}

/// Per-edge outside fraction at `n` log-spaced times on `[t_min, t_max]`.
pub fn compute_fraction(shape: &str, delta_x: f64, p0: f64, t_min: f64, t_max: f64, n: usize) -> Result<Series> {
    let units = PhysicalUnits::natural();
    let spec = packet(shape, delta_x, p0)?;
    let times = log_times(t_min, t_max, n)?;
    let config = EvolutionConfig::new(&spec, &units, times, &GridSettings::default())?;
    let series = fraction_series(&config, FractionConvention::PerEdge)?;
    Ok(Series {
        times: series.times,
        fractions: series.fractions,
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct KernelProfile {
    dx: Vec<f64>,
    magnitude: Vec<f64>,
}

#[wasm_bindgen]
impl KernelProfile {
    #[wasm_bindgen(getter)]
    pub fn dx(&self) -> Vec<f64> {
        self.dx.clone()
    }
    /// `|K|` on the space-like side; `NaN` inside or on the cone.
    #[wasm_bindgen(getter)]
    pub fn magnitude(&self) -> Vec<f64> {
        self.magnitude.clone()
    }
}

/// Closed-form propagator magnitude at fixed `dt` for `n` separations on `[0, dx_max]`, mass `m`.
pub fn compute_kernel(dt: f64, dx_max: f64, n: usize, m: f64) -> Result<KernelProfile> {
    let units = PhysicalUnits::new(1.0, 1.0, m)?;
    let n = n.max(2);
    let mut dx = Vec::with_capacity(n);
    let mut magnitude = Vec::with_capacity(n);
    for i in 0..n {
        let x = dx_max * i as f64 / (n - 1) as f64;
        let v = match classify(dt, x, &units) {
            Region::SpaceLike => kernel_closed_form(dt, x, &units)?.value.map_or(f64::NAN, |k| k.norm()),
            _ => f64::NAN,
        };
        dx.push(x);
        magnitude.push(v);
    }
    Ok(KernelProfile { dx, magnitude })
}

fn js(e: lightcone_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn snapshot(shape: &str, delta_x: f64, p0: f64, t: f64, view: f64) -> std::result::Result<Snapshot, JsError> {
    compute_snapshot(shape, delta_x, p0, t, view).map_err(js)
}

#[wasm_bindgen]
pub fn fraction(
    shape: &str,
    delta_x: f64,
    p0: f64,
    t_min: f64,
    t_max: f64,
    n: usize,
) -> std::result::Result<Series, JsError> {
    compute_fraction(shape, delta_x, p0, t_min, t_max, n).map_err(js)
}

#[wasm_bindgen]
pub fn kernel(dt: f64, dx_max: f64, n: usize, m: f64) -> std::result::Result<KernelProfile, JsError> {
    compute_kernel(dt, dx_max, n, m).map_err(js)
}
