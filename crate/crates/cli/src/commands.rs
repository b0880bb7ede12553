use lightcone_core::analysis::{
    fraction_series, run_cell, scan, CellStatus, GridInfo, ScanResult, TableKind, TableOptions, TableReport,
};
use lightcone_core::evolve::{evolve_schrodinger, heatmap};
use lightcone_core::export::{
    write_kernel, write_series, write_snapshots, write_spectrum, write_table, KERNEL_HEADER, SERIES_HEADER,
    SNAPSHOT_HEADER, SPECTRUM_HEADER, TABLE_HEADER,
};
use lightcone_core::kernel::{decay_rate, kernel_lattice, Region};
use lightcone_core::{DensitySnapshot, EvolutionConfig, FractionConvention, PhysicalUnits, WavepacketSpec};
use serde::Serialize;

use crate::config::{DynamicsName, RunConfig};
use crate::error::{classify, CliError};
use crate::output::Artifact;

/// What a command was asked to do, beyond the config file.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Invocation {
    pub command: &'static str,
    pub long_running: bool,
    /// Worker threads used; results do not depend on it.
    pub threads: usize,
}

#[derive(Serialize)]
struct RunInfo<'a> {
    tool: &'static str,
    version: &'static str,
    artifact: &'a str,
    header: &'a str,
    #[serde(flatten)]
    invocation: Invocation,
}

#[derive(Serialize)]
struct Sidecar<'a, D: Serialize> {
    run: RunInfo<'a>,
    details: D,
    config: &'a RunConfig,
}

/// The artifact followed by its `<name>.meta.toml` sidecar.
fn with_sidecar<D: Serialize>(
    out: &mut Vec<Artifact>,
    name: String,
    header: &str,
    bytes: Vec<u8>,
    details: D,
    inv: Invocation,
    config: &RunConfig,
) {
    let sidecar = Sidecar {
        run: RunInfo {
            tool: "lightcone",
            version: env!("CARGO_PKG_VERSION"),
            artifact: &name,
            header,
            invocation: inv,
        },
        details,
        config,
    };
    let text = toml::to_string(&sidecar).expect("sidecar serializes");
    let meta = format!("{name}.meta.toml");
    out.push(Artifact::new(name, bytes));
    out.push(Artifact::new(meta, text.into_bytes()));
}

fn csv<F>(f: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

/// File-name prefix distinguishing the `p0` values of a sweep.
fn prefix(spec: &WavepacketSpec, sweep: bool) -> String {
    if sweep {
        format!("p0_{}_", spec.p0)
    } else {
        String::new()
    }
}

#[derive(Serialize)]
struct SpatialInfo {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    spacing: f64,
}

#[derive(Serialize)]
struct SnapshotInfo {
    t: f64,
    norm: f64,
    below_floor_points: usize,
}

impl SnapshotInfo {
    fn of(s: &DensitySnapshot) -> Self {
        Self {
            t: s.t,
            norm: s.norm(),
            below_floor_points: s.below_floor_count(),
        }
    }
}

#[derive(Serialize)]
struct EvolveDetails {
    spec: WavepacketSpec,
    units: PhysicalUnits,
    dynamics: DynamicsName,
    numeric_floor: f64,
    grid: GridInfo,
    spatial: SpatialInfo,
    snapshots: Vec<SnapshotInfo>,
}

#[derive(Serialize)]
struct SpectrumDetails {
    spec: WavepacketSpec,
    units: PhysicalUnits,
    grid: GridInfo,
    norm: f64,
}

pub fn evolve(config: &RunConfig, inv: Invocation) -> Result<Vec<Artifact>, CliError> {
    let section = config
        .evolve
        .as_ref()
        .ok_or_else(|| CliError::config("evolve", "section required by `evolve`"))?;
    let sweep = config.wavepackets.len() > 1;
    let mut out = Vec::new();
    for spec in &config.wavepackets {
        let pre = prefix(spec, sweep);
        let cfg = EvolutionConfig::new(spec, &config.units, section.times.clone(), &config.grid).map_err(classify)?;
        let snapshots = match section.dynamics {
            DynamicsName::Salpeter => heatmap(&cfg, &section.times).map_err(classify)?,
            DynamicsName::Schrodinger => section
                .times
                .iter()
                .map(|&t| evolve_schrodinger(&cfg, t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(classify)?,
        };
        let grid = GridInfo::of(&cfg);
        let details = |snaps: &[DensitySnapshot]| EvolveDetails {
            spec: *spec,
            units: config.units,
            dynamics: section.dynamics,
            numeric_floor: cfg.numeric_floor,
            grid,
            spatial: SpatialInfo {
                x_min: cfg.spatial.x_min,
                x_max: cfg.spatial.x_max,
                n_points: cfg.spatial.n_points,
                spacing: cfg.spatial.spacing(),
            },
            snapshots: snaps.iter().map(SnapshotInfo::of).collect(),
        };
        if section.spectrum {
            let bytes = csv(|w| write_spectrum(w, &cfg.spectrum));
            let d = SpectrumDetails {
                spec: *spec,
                units: config.units,
                grid,
                norm: cfg.spectrum.norm(),
            };
            with_sidecar(
                &mut out,
                format!("{pre}spectrum.csv"),
                SPECTRUM_HEADER,
                bytes,
                d,
                inv,
                config,
            );
        }
        if section.heatmap {
            let bytes = csv(|w| write_snapshots(w, &snapshots));
            let d = details(&snapshots);
            with_sidecar(
                &mut out,
                format!("{pre}heatmap.csv"),
                SNAPSHOT_HEADER,
                bytes,
                d,
                inv,
                config,
            );
        } else {
            for (k, s) in snapshots.iter().enumerate() {
                let one = std::slice::from_ref(s);
                let bytes = csv(|w| write_snapshots(w, one));
                let d = details(one);
                with_sidecar(
                    &mut out,
                    format!("{pre}snapshot_{k:03}.csv"),
                    SNAPSHOT_HEADER,
                    bytes,
                    d,
                    inv,
                    config,
                );
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct FractionDetails {
    spec: WavepacketSpec,
    units: PhysicalUnits,
    convention: FractionConvention,
    numeric_floor: f64,
    grid: GridInfo,
    scan: Option<ScanResult>,
}

pub fn fraction(config: &RunConfig, inv: Invocation) -> Result<Vec<Artifact>, CliError> {
    let section = config
        .fraction
        .as_ref()
        .ok_or_else(|| CliError::config("fraction", "section required by `fraction`"))?;
    let sweep = config.wavepackets.len() > 1;
    let mut out = Vec::new();
    for spec in &config.wavepackets {
        let cfg = EvolutionConfig::new(spec, &config.units, section.times.clone(), &config.grid).map_err(classify)?;
        let series = fraction_series(&cfg, section.convention).map_err(classify)?;
        let result = if section.scan {
            Some(scan(&cfg, &series, section.threshold, section.refine_tol).map_err(classify)?)
        } else {
            None
        };
        let details = FractionDetails {
            spec: *spec,
            units: config.units,
            convention: section.convention,
            numeric_floor: series.floor,
            grid: GridInfo::of(&cfg),
            scan: result,
        };
        let bytes = csv(|w| write_series(w, &series));
        let name = format!("{}fraction.csv", prefix(spec, sweep));
        with_sidecar(&mut out, name, SERIES_HEADER, bytes, details, inv, config);
    }
    Ok(out)
}

/// Table artifacts plus the number of cells that failed.
pub fn table(config: &RunConfig, inv: Invocation) -> Result<(Vec<Artifact>, usize), CliError> {
    let section = config
        .table
        .as_ref()
        .ok_or_else(|| CliError::config("table", "section required by `table`"))?;
    let options = TableOptions {
        scan: section.scan,
        grid: config.grid,
        long_running: inv.long_running,
    };
    let mut cells = Vec::with_capacity(section.rows.len());
    for (i, row) in section.rows.iter().enumerate() {
        let cell = run_cell(section.kind, row, &config.units, &options);
        eprintln!(
            "[{}/{}] {}/dx={}/p0={}: {} ({:.1} s)",
            i + 1,
            section.rows.len(),
            row.shape,
            row.delta_x,
            row.p0,
            cell.status,
            cell.runtime_s
        );
        cells.push(cell);
    }
    let report = TableReport {
        kind: section.kind,
        options: section.scan,
        cells,
    };
    let failed = report
        .cells
        .iter()
        .filter(|c| matches!(c.status, CellStatus::Failed(_)))
        .count();
    let stem = match section.kind {
        TableKind::PeakTable => "peak_table",
        TableKind::ThresholdTable => "threshold_table",
    };
    let mut out = Vec::new();
    let bytes = csv(|w| write_table(w, &report));
    with_sidecar(
        &mut out,
        format!("{stem}.csv"),
        TABLE_HEADER,
        bytes,
        &report,
        inv,
        config,
    );
    let text = report.render().into_bytes();
    with_sidecar(&mut out, format!("{stem}.txt"), "", text, &report, inv, config);
    Ok((out, failed))
}

#[derive(Serialize)]
struct DecayEntry {
    m: f64,
    rate: f64,
    rate_ratio: f64,
    mass_ratio: f64,
}

#[derive(Serialize)]
struct KernelSummary {
    units: PhysicalUnits,
    rows: usize,
    space_like: usize,
    time_like: usize,
    light_cone: usize,
    /// Largest relative disagreement between the numeric and closed-form paths.
    max_rel_diff: Option<f64>,
    decay: Vec<DecayEntry>,
}

pub fn kernel(config: &RunConfig, inv: Invocation) -> Result<Vec<Artifact>, CliError> {
    let section = config
        .kernel
        .as_ref()
        .ok_or_else(|| CliError::config("kernel", "section required by `kernel`"))?;
    let rows = kernel_lattice(&section.dt, &section.dx, &config.units).map_err(classify)?;
    let count = |r: Region| rows.iter().filter(|x| x.region == r).count();
    let max_rel_diff = rows
        .iter()
        .filter_map(|r| r.relative_difference())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let mut decay = Vec::new();
    if let Some(d) = &section.decay {
        let mut base = None;
        for &m in &d.masses {
            let units = PhysicalUnits::new(config.units.hbar, config.units.c, m).map_err(classify)?;
            let rate = decay_rate(d.dt, d.s_min, d.s_max, d.samples, &units).map_err(classify)?;
            let (m0, r0) = *base.get_or_insert((m, rate));
            decay.push(DecayEntry {
                m,
                rate,
                rate_ratio: rate / r0,
                mass_ratio: m / m0,
            });
        }
    }
    let summary = KernelSummary {
        units: config.units,
        rows: rows.len(),
        space_like: count(Region::SpaceLike),
        time_like: count(Region::TimeLike),
        light_cone: count(Region::LightCone),
        max_rel_diff,
        decay,
    };
    let mut out = Vec::new();
    let bytes = csv(|w| write_kernel(w, &rows));
    with_sidecar(
        &mut out,
        "kernel.csv".into(),
        KERNEL_HEADER,
        bytes,
        &summary,
        inv,
        config,
    );
    let text = toml::to_string(&summary).expect("summary serializes").into_bytes();
    with_sidecar(&mut out, "kernel_summary.toml".into(), "", text, &summary, inv, config);
    Ok(out)
}
