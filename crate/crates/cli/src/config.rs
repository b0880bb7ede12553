//! Run configuration: TOML is parsed into raw sections, validated once, and
//! handed to the commands as a read-only [`RunConfig`].

use std::path::{Path, PathBuf};

use lightcone_core::analysis::{default_series_times, standard_rows, ScanOptions, TableKind, TableRow};
use lightcone_core::{FractionConvention, GridSettings, PhysicalUnits, Shape, WavepacketSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A scalar or a list; scalars behave as one-element lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// A list of values or an evenly spaced range with both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, n: usize },
}

impl Axis {
    fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let v = match *self {
            Axis::List(ref v) => v.clone(),
            Axis::Range { start, stop, n } => {
                if n == 0 {
                    return Err(CliError::config(field, "range needs n >= 1"));
                }
                if n == 1 {
                    vec![start]
                } else {
                    (0..n)
                        .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                        .collect()
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::config(field, "must not be empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(field, "values must be finite"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    out: Option<PathBuf>,
    #[serde(default)]
    units: RawUnits,
    wavepacket: Option<RawWavepacket>,
    #[serde(default)]
    grid: GridSettings,
    evolve: Option<RawEvolve>,
    fraction: Option<RawFraction>,
    table: Option<RawTable>,
    kernel: Option<RawKernel>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawUnits {
    hbar: f64,
    c: f64,
    m: f64,
}

impl Default for RawUnits {
    fn default() -> Self {
        let n = PhysicalUnits::natural();
        Self {
            hbar: n.hbar,
            c: n.c,
            m: n.m,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWavepacket {
    shape: Shape,
    delta_x: f64,
    #[serde(default = "zero")]
    p0: OneOrMany,
    #[serde(default)]
    x0: f64,
}

fn zero() -> OneOrMany {
    OneOrMany::One(0.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolve {
    times: Vec<f64>,
    #[serde(default)]
    dynamics: DynamicsName,
    #[serde(default)]
    heatmap: bool,
    #[serde(default = "yes")]
    spectrum: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsName {
    #[default]
    Salpeter,
    Schrodinger,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawFraction {
    times: Option<Vec<f64>>,
    convention: FractionConvention,
    scan: Option<bool>,
    threshold: Option<f64>,
    refine_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    kind: TableKind,
    #[serde(default)]
    rows: Option<Vec<RawRow>>,
    #[serde(default)]
    scan: ScanOptions,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    shape: Shape,
    delta_x: f64,
    #[serde(default)]
    p0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    dt: Axis,
    dx: Axis,
    #[serde(default)]
    decay: Option<DecaySweep>,
}

/// Mass sweep for the space-like decay rate, fitted at fixed `dt` over `s` in `[s_min, s_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySweep {
    pub masses: Vec<f64>,
    #[serde(default = "one")]
    pub dt: f64,
    #[serde(default = "two")]
    pub s_min: f64,
    #[serde(default = "twelve")]
    pub s_max: f64,
    #[serde(default = "samples")]
    pub samples: usize,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn twelve() -> f64 {
    12.0
}
fn samples() -> usize {
    41
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveSection {
    pub times: Vec<f64>,
    pub dynamics: DynamicsName,
    pub heatmap: bool,
    pub spectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionSection {
    pub times: Vec<f64>,
    pub convention: FractionConvention,
    pub scan: bool,
    pub threshold: f64,
    pub refine_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSection {
    pub kind: TableKind,
    pub rows: Vec<TableRow>,
    pub scan: ScanOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSection {
    pub dt: Vec<f64>,
    pub dx: Vec<f64>,
    pub decay: Option<DecaySweep>,
}

/// A validated configuration with every default filled in. Serializing it
/// gives the effective configuration echoed into metadata sidecars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub units: PhysicalUnits,
    /// One spec per requested `p0`.
    pub wavepackets: Vec<WavepacketSpec>,
    pub grid: GridSettings,
    pub evolve: Option<EvolveSection>,
    pub fraction: Option<FractionSection>,
    pub table: Option<TableSection>,
    pub kernel: Option<KernelSection>,
}

fn positive(field: &str, x: Option<f64>) -> Result<(), CliError> {
    match x {
        Some(v) if !(v.is_finite() && v > 0.0) => Err(CliError::config(field, format!("must be > 0, got {v}"))),
        _ => Ok(()),
    }
}

fn check_times(field: &str, times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() {
        return Err(CliError::config(field, "at least one time is required"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::config(field, "every time must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(field, "times must be strictly increasing"));
    }
    Ok(())
}

fn core_config(field: &str, e: lightcone_core::Error) -> CliError {
    match e {
        lightcone_core::Error::InvalidParameter { name, reason } => {
            CliError::config(&format!("{field}.{name}"), reason)
        }
        other => CliError::config(field, other.to_string()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::validate(raw)
    }

    fn validate(raw: RawConfig) -> Result<Self, CliError> {
        let units =
            PhysicalUnits::new(raw.units.hbar, raw.units.c, raw.units.m).map_err(|e| core_config("units", e))?;

        let mut wavepackets = Vec::new();
        if let Some(w) = raw.wavepacket {
            let p0s = w.p0.into_vec();
            if p0s.is_empty() {
                return Err(CliError::config("wavepacket.p0", "must not be empty"));
            }
            for p0 in p0s {
                let spec = WavepacketSpec::new(w.shape, w.delta_x, p0)
                    .and_then(|s| s.with_center(w.x0))
                    .map_err(|e| core_config("wavepacket", e))?;
                wavepackets.push(spec);
            }
        }

        let g = raw.grid;
        positive("grid.cutoff_ratio", g.cutoff_ratio)?;
        positive("grid.margin", g.margin)?;
        positive("grid.max_spatial_spacing", g.max_spatial_spacing)?;
        positive("grid.momentum_spacing", g.momentum_spacing)?;
        positive("grid.numeric_floor", g.numeric_floor)?;
        positive("grid.norm_tolerance", g.norm_tolerance)?;
        if g.cutoff_ratio.is_some_and(|r| r >= 1.0) {
            return Err(CliError::config("grid.cutoff_ratio", "must be < 1"));
        }
        if g.max_momentum_points == Some(0) {
            return Err(CliError::config("grid.max_momentum_points", "must be >= 1"));
        }

        let needs_wavepacket = |section: &str| -> Result<(), CliError> {
            if wavepackets.is_empty() {
                Err(CliError::config("wavepacket", format!("required by [{section}]")))
            } else {
                Ok(())
            }
        };

        let evolve = match raw.evolve {
            Some(e) => {
                needs_wavepacket("evolve")?;
                check_times("evolve.times", &e.times)?;
                Some(EvolveSection {
                    times: e.times,
                    dynamics: e.dynamics,
                    heatmap: e.heatmap,
                    spectrum: e.spectrum,
                })
            }
            None => None,
        };

        let fraction = match raw.fraction {
            Some(f) => {
                needs_wavepacket("fraction")?;
                let times = f.times.unwrap_or_else(default_series_times);
                check_times("fraction.times", &times)?;
                let threshold = f.threshold.unwrap_or(ScanOptions::default().threshold);
                let refine_tol = f.refine_tol.unwrap_or(ScanOptions::default().refine_tol);
                if !(threshold > 0.0 && threshold < 1.0) {
                    return Err(CliError::config("fraction.threshold", "must lie in (0, 1)"));
                }
                positive("fraction.refine_tol", Some(refine_tol))?;
                Some(FractionSection {
                    scan: f.scan.unwrap_or(times.len() >= 3),
                    times,
                    convention: f.convention,
                    threshold,
                    refine_tol,
                })
            }
            None => None,
        };
        if fraction.as_ref().is_some_and(|f| f.scan && f.times.len() < 3) {
            return Err(CliError::config("fraction.scan", "a scan needs at least 3 times"));
        }

        let table = match raw.table {
            Some(t) => {
                let rows = match t.rows {
                    Some(rows) => rows
                        .into_iter()
                        .map(|r| TableRow::new(r.shape, r.delta_x, r.p0))
                        .collect(),
                    None => standard_rows(),
                };
                if rows.is_empty() {
                    return Err(CliError::config("table.rows", "must not be empty"));
                }
                for (i, r) in rows.iter().enumerate() {
                    r.spec().map_err(|e| core_config(&format!("table.rows[{i}]"), e))?;
                }
                let s = t.scan;
                if !(s.threshold > 0.0 && s.threshold < 1.0) {
                    return Err(CliError::config("table.scan.threshold", "must lie in (0, 1)"));
                }
                positive("table.scan.refine_tol", Some(s.refine_tol))?;
                positive("table.scan.max_horizon", Some(s.max_horizon))?;
                if s.extension_points == 0 {
                    return Err(CliError::config("table.scan.extension_points", "must be >= 1"));
                }
                Some(TableSection {
                    kind: t.kind,
                    rows,
                    scan: s,
                })
            }
            None => None,
        };

        let kernel = match raw.kernel {
            Some(k) => {
                let dt = k.dt.values("kernel.dt")?;
                let dx = k.dx.values("kernel.dx")?;
                if dt.iter().any(|&t| t <= 0.0) {
                    return Err(CliError::config("kernel.dt", "every dt must be > 0"));
                }
                if let Some(d) = &k.decay {
                    if d.masses.is_empty() || d.masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                        return Err(CliError::config(
                            "kernel.decay.masses",
                            "need at least one mass, all > 0",
                        ));
                    }
                    positive("kernel.decay.dt", Some(d.dt))?;
                    positive("kernel.decay.s_min", Some(d.s_min))?;
                    if !(d.s_max > d.s_min) {
                        return Err(CliError::config("kernel.decay.s_max", "must exceed s_min"));
                    }
                    if d.samples < 2 {
                        return Err(CliError::config("kernel.decay.samples", "must be >= 2"));
                    }
                }
                Some(KernelSection { dt, dx, decay: k.decay })
            }
            None => None,
        };

        Ok(Self {
            out: raw.out,
            units,
            wavepackets,
            grid: g,
            evolve,
            fraction,
            table,
            kernel,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let c = RunConfig::parse("[wavepacket]\nshape = \"cos8\"\ndelta_x = 1.0\n[fraction]\n").unwrap();
        let f = c.fraction.unwrap();
        assert_eq!(f.times, default_series_times());
        assert!(f.scan);
        assert_eq!(c.units, PhysicalUnits::natural());
        assert_eq!(c.wavepackets.len(), 1);
    }

    #[test]
    fn p0_list_expands() {
        let c = RunConfig::parse("[wavepacket]\nshape = \"cos8\"\ndelta_x = 1.0\np0 = [0.0, 1.0, 10.0]\n").unwrap();
        let p: Vec<f64> = c.wavepackets.iter().map(|w| w.p0).collect();
        assert_eq!(p, vec![0.0, 1.0, 10.0]);
    }

    #[test]
    fn range_axis() {
        let c = RunConfig::parse("[kernel]\ndt = 1.0e0\ndx = { start = 0.0, stop = 4.0, n = 5 }\n");
        assert!(c.is_err(), "scalar dt is not an axis");
        let c = RunConfig::parse("[kernel]\ndt = [1.0]\ndx = { start = 0.0, stop = 4.0, n = 5 }\n").unwrap();
        assert_eq!(c.kernel.unwrap().dx, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_values() {
        for (text, field) in [
            (
                "[wavepacket]\nshape = \"cos8\"\ndelta_x = 1.0\n[evolve]\ntimes = []\n",
                "evolve.times",
            ),
            ("[wavepacket]\nshape = \"cos3\"\ndelta_x = 1.0\n", "shape"),
            ("[units]\nm = -1.0\n", "units"),
            ("[grid]\ncutoff_ratio = 2.0\n", "grid.cutoff_ratio"),
            ("[evolve]\ntimes = [1.0]\n", "wavepacket"),
            ("bogus = 1\n", "bogus"),
        ] {
            let e = RunConfig::parse(text).unwrap_err().to_string();
            assert!(e.contains(field), "{text:?} -> {e}");
        }
    }

    #[test]
    fn echo_round_trips_through_toml() {
        let c = RunConfig::parse(
            "[wavepacket]\nshape = \"rect\"\ndelta_x = 2.0\n[table]\nkind = \"peak-table\"\n[kernel]\ndt = [1.0]\ndx = [3.0]\n",
        )
        .unwrap();
        let text = toml::to_string(&c).unwrap();
        assert!(text.contains("peak-table"));
        assert!(text.contains("shape = \"rect\""));
    }

    #[test]
    fn shipped_configs_validate() {
        for (name, text) in [
            ("evolve_cos8", include_str!("../../../configs/evolve_cos8.toml")),
            ("heatmap_cos8", include_str!("../../../configs/heatmap_cos8.toml")),
            (
                "fraction_momentum_sweep",
                include_str!("../../../configs/fraction_momentum_sweep.toml"),
            ),
            ("peak_table", include_str!("../../../configs/peak_table.toml")),
            ("threshold_table", include_str!("../../../configs/threshold_table.toml")),
            ("kernel_lattice", include_str!("../../../configs/kernel_lattice.toml")),
        ] {
            RunConfig::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
