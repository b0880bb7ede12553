//! Probability outside the light cone, peak/threshold scans and table runs.
//!
//! The light cone of the initial support at time `t` is
//! `|x - x0| <= pi delta_x / 2 + c t`. [`fraction_outside`] returns the
//! probability beyond each edge separately. Series and tables report one of
//! two tallies, selected by [`FractionConvention`]: the total `left + right`,
//! or the per-edge value `(left + right) / 2`, which is the convention of the
//! reference peak and threshold tables.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evolve::{evolve_momentum, map_times, DensitySnapshot, EvolutionConfig, GridSettings};
use crate::sum::trapezoid;
use crate::units::PhysicalUnits;
use crate::wavepacket::{Shape, WavepacketSpec};

pub const DEFAULT_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_REFINE_TOL: f64 = 0.005;
/// All reference peaks lie in [0.6, 1.0].
pub const PEAK_TIME_ESTIMATE: f64 = 1.0;
pub const DEFAULT_SERIES_POINTS: usize = 60;
/// Spectral cutoff used by threshold scans of cosine shapes. The reported
/// quantity sits at 1e-4, far above what the tighter default resolves, and
/// long horizons make the default grid prohibitively large.
pub const THRESHOLD_SCAN_COSPOW_CUTOFF: f64 = 1e-9;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

pub fn light_cone_edges(spec: &WavepacketSpec, t: f64, units: &PhysicalUnits) -> (f64, f64) {
    let reach = spec.half_width() + units.c * t;
    (spec.x0 - reach, spec.x0 + reach)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FractionConvention {
    Total,
    #[default]
    PerEdge,
}

impl fmt::Display for FractionConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FractionConvention::Total => "total",
            FractionConvention::PerEdge => "per-edge",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutsideFraction {
    pub left: f64,
    pub right: f64,
}

impl OutsideFraction {
    pub fn total(&self) -> f64 {
        self.left + self.right
    }

    pub fn value(&self, convention: FractionConvention) -> f64 {
        match convention {
            FractionConvention::Total => self.total(),
            FractionConvention::PerEdge => 0.5 * self.total(),
        }
    }
}

/// Linear interpolation of the density at `x` inside cell `i`.
fn density_at(snapshot: &DensitySnapshot, i: usize, x: f64) -> f64 {
    let g = &snapshot.grid;
    let (x0, h) = (g.point(i), g.spacing());
    let w = ((x - x0) / h).clamp(0.0, 1.0);
    (1.0 - w) * snapshot.density[i] + w * snapshot.density[i + 1]
}

/// Probability beyond each light-cone edge, with the straddling cell split by
/// linear interpolation. The grid must extend at least `10 lambda_C` beyond
/// both edges.
pub fn fraction_outside(
    snapshot: &DensitySnapshot,
    spec: &WavepacketSpec,
    units: &PhysicalUnits,
) -> Result<OutsideFraction> {
    let (lo, hi) = light_cone_edges(spec, snapshot.t, units);
    let g = &snapshot.grid;
    let margin = 10.0 * units.compton_wavelength();
    if g.x_min > lo - margin || g.x_max < hi + margin {
        return Err(Error::Coverage {
            x_min: g.x_min,
            x_max: g.x_max,
            left: lo,
            right: hi,
            margin,
        });
    }
    let h = g.spacing();
    let d = &snapshot.density;
    let n = d.len();

    // cell i spans [x_i, x_{i+1}]; clamp so the edge always falls in a cell
    let cell = |x: f64| (((x - g.x_min) / h).floor().max(0.0) as usize).min(n - 2);

    let i = cell(hi);
    let rho = density_at(snapshot, i, hi);
    let right = 0.5 * (g.point(i + 1) - hi) * (rho + d[i + 1]) + trapezoid(&d[i + 1..], h);

    let j = cell(lo);
    let rho = density_at(snapshot, j, lo);
    let left = trapezoid(&d[..=j], h) + 0.5 * (lo - g.point(j)) * (d[j] + rho);

    Ok(OutsideFraction {
        left: left.clamp(0.0, 1.0),
        right: right.clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionSeries {
    pub times: Vec<f64>,
    pub fractions: Vec<f64>,
    pub spec: WavepacketSpec,
    pub floor: f64,
    pub convention: FractionConvention,
}

impl FractionSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index and value of the largest sample.
    pub fn max(&self) -> Option<(usize, f64)> {
        self.fractions
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, f)| match best {
                Some((_, b)) if b >= f => best,
                _ => Some((i, f)),
            })
    }

    fn append(&mut self, other: FractionSeries) {
        self.times.extend(other.times);
        self.fractions.extend(other.fractions);
    }
}

/// Outside fraction at one time.
pub fn fraction_at(config: &EvolutionConfig, t: f64, convention: FractionConvention) -> Result<f64> {
    let snap = evolve_momentum(config, t)?;
    Ok(fraction_outside(&snap, config.spec(), &config.units)?.value(convention))
}

/// One evolution per configured time.
pub fn fraction_series(config: &EvolutionConfig, convention: FractionConvention) -> Result<FractionSeries> {
    if config.times.is_empty() {
        return Err(invalid("times", "need at least one time"));
    }
    let fractions = map_times(
        &config.times,
        |t| fraction_at(config, t, convention),
        config.fft_len().unwrap_or(0),
    )?;
    Ok(FractionSeries {
        times: config.times.clone(),
        fractions,
        spec: *config.spec(),
        floor: config.numeric_floor,
        convention,
    })
}

/// `n` log-spaced times in `[t_min, t_max]`.
pub fn log_times(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && n >= 2) {
        return Err(invalid("times", "need 0 < t_min < t_max and n >= 2"));
    }
    let ratio = (t_max / t_min).ln();
    let mut v: Vec<f64> = (0..n)
        .map(|i| t_min * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[n - 1] = t_max;
    Ok(v)
}

/// The default scan sampling: 60 log-spaced points in `[0.01, 10]`.
pub fn default_series_times() -> Vec<f64> {
    log_times(0.01, 10.0 * PEAK_TIME_ESTIMATE, DEFAULT_SERIES_POINTS).expect("valid constants")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub t_peak: f64,
    pub f_peak: f64,
    /// Last downward crossing of `threshold`, if the series has one.
    pub t_threshold: Option<f64>,
    pub threshold: f64,
    /// Series still above `threshold` at its last sample.
    pub open_ended: bool,
    /// Last sampled time.
    pub t_end: f64,
}

impl ScanResult {
    pub fn below_threshold(&self) -> bool {
        self.f_peak < self.threshold
    }
}

/// Maximizes `f` on `[a, b]` to width `tol`, reusing the known interior value.
fn golden_max<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Last index `i` with `fractions[i] >= threshold` followed only by values below it.
fn last_crossing(series: &FractionSeries, threshold: f64) -> Option<usize> {
    let n = series.len();
    if n == 0 || series.fractions[n - 1] >= threshold {
        return None;
    }
    series.fractions.iter().rposition(|&f| f >= threshold)
}

fn refine_crossing<F>(f: &F, mut lo: f64, mut hi: f64, threshold: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi - lo > tol.max(1e-3 * hi) {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_scan_args(series: &FractionSeries, threshold: f64, refine_tol: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(invalid("threshold", format!("must lie in (0, 1), got {threshold}")));
    }
    if !(refine_tol > 0.0) {
        return Err(invalid("refine_tol", "must be > 0"));
    }
    if series.len() < 3 {
        return Err(invalid("series", "need at least 3 samples"));
    }
    Ok(())
}

fn peak_of(config: &EvolutionConfig, series: &FractionSeries, refine_tol: f64) -> Result<(f64, f64)> {
    let (i, f_max) = series.max().expect("non-empty series");
    let n = series.len();
    if i == 0 || i == n - 1 {
        return Ok((series.times[i], f_max));
    }
    let f = |t: f64| fraction_at(config, t, series.convention);
    let (t, v) = golden_max(&f, series.times[i - 1], series.times[i + 1], refine_tol)?;
    Ok(if v >= f_max { (t, v) } else { (series.times[i], f_max) })
}

/// Peak by golden-section refinement around the coarse maximum; threshold time
/// as the last downward crossing, refined by bisection. `config` must be the
/// configuration that produced `series`.
pub fn scan(config: &EvolutionConfig, series: &FractionSeries, threshold: f64, refine_tol: f64) -> Result<ScanResult> {
    check_scan_args(series, threshold, refine_tol)?;
    let (t_peak, f_peak) = peak_of(config, series, refine_tol)?;
    let f = |t: f64| fraction_at(config, t, series.convention);
    let n = series.len();
    let t_threshold = match last_crossing(series, threshold) {
        Some(i) => Some(refine_crossing(
            &f,
            series.times[i],
            series.times[i + 1],
            threshold,
            refine_tol,
        )?),
        None => None,
    };
    Ok(ScanResult {
        t_peak,
        f_peak,
        t_threshold,
        threshold,
        open_ended: series.fractions[n - 1] >= threshold,
        t_end: series.times[n - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    pub threshold: f64,
    pub refine_tol: f64,
    pub convention: FractionConvention,
    /// Threshold scans double their horizon until the series ends below the
    /// threshold or this time is reached.
    pub max_horizon: f64,
    /// Samples added per horizon doubling.
    pub extension_points: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            refine_tol: DEFAULT_REFINE_TOL,
            convention: FractionConvention::default(),
            max_horizon: 640.0,
            extension_points: 24,
        }
    }
}

/// Grid metadata recorded per evaluated configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub horizon: f64,
    pub momentum_points: usize,
    pub momentum_spacing: f64,
    pub spatial_points: usize,
    pub spatial_spacing: f64,
    pub fft_len: Option<usize>,
    pub cutoff_ratio: f64,
}

impl GridInfo {
    pub fn of(config: &EvolutionConfig) -> Self {
        Self {
            horizon: config.horizon(),
            momentum_points: config.spectrum.len(),
            momentum_spacing: config.spectrum.grid.spacing(),
            spatial_points: config.spatial.n_points,
            spatial_spacing: config.spatial.spacing(),
            fft_len: config.fft_len(),
            cutoff_ratio: config.spectrum.cutoff_ratio,
        }
    }
}

/// Default series plus peak and threshold refinement on one grid.
pub fn peak_scan(
    spec: &WavepacketSpec,
    units: &PhysicalUnits,
    settings: &GridSettings,
    options: &ScanOptions,
) -> Result<(ScanResult, FractionSeries, GridInfo)> {
    let config = EvolutionConfig::new(spec, units, default_series_times(), settings)?;
    let series = fraction_series(&config, options.convention)?;
    let result = scan(&config, &series, options.threshold, options.refine_tol)?;
    Ok((result, series, GridInfo::of(&config)))
}

fn threshold_settings(spec: &WavepacketSpec, settings: &GridSettings) -> GridSettings {
    let mut s = *settings;
    if s.cutoff_ratio.is_none() {
        if let Shape::CosPow(_) = spec.shape {
            s.cutoff_ratio = Some(THRESHOLD_SCAN_COSPOW_CUTOFF);
        }
    }
    s
}

/// Peak scan followed by horizon doubling until the fraction has dropped below
/// the threshold for good (or `max_horizon` is reached). Each horizon gets a
/// grid sized for it.
pub fn threshold_scan(
    spec: &WavepacketSpec,
    units: &PhysicalUnits,
    settings: &GridSettings,
    options: &ScanOptions,
) -> Result<(ScanResult, FractionSeries, GridInfo)> {
    let settings = threshold_settings(spec, settings);
    let (peak, mut series, mut info) = peak_scan(spec, units, &settings, options)?;
    if peak.below_threshold() {
        return Ok((peak, series, info));
    }
    let mut horizon = *series.times.last().expect("non-empty");
    let mut config = None;
    while series.fractions.last().is_some_and(|&f| f >= options.threshold) && horizon < options.max_horizon {
        let next = (2.0 * horizon).min(options.max_horizon);
        let times: Vec<f64> = log_times(horizon, next, options.extension_points + 1)?
            .into_iter()
            .skip(1)
            .collect();
        let cfg = EvolutionConfig::new(spec, units, times, &settings)?;
        series.append(fraction_series(&cfg, options.convention)?);
        info = GridInfo::of(&cfg);
        config = Some(cfg);
        horizon = next;
    }
    let n = series.len();
    let mut result = ScanResult {
        open_ended: series.fractions[n - 1] >= options.threshold,
        t_end: series.times[n - 1],
        ..peak
    };
    if let Some(i) = last_crossing(&series, options.threshold) {
        let (lo, hi) = (series.times[i], series.times[i + 1]);
        let reuse = config.as_ref().filter(|c| c.horizon() >= hi);
        let built;
        let cfg = match reuse {
            Some(c) if lo >= 0.5 * c.horizon() => c,
            _ => {
                built = EvolutionConfig::with_horizon(spec, units, vec![hi], hi, &settings)?;
                &built
            }
        };
        let f = |t: f64| fraction_at(cfg, t, options.convention);
        result.t_threshold = Some(refine_crossing(&f, lo, hi, options.threshold, options.refine_tol)?);
    }
    Ok((result, series, info))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    /// Time and value of the peak outside fraction.
    PeakTable,
    /// Time the fraction stays above the threshold.
    ThresholdTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "detail")]
pub enum CellStatus {
    Ok,
    /// The fraction never reaches the threshold.
    BelowThreshold,
    /// Still above the threshold at the largest horizon scanned.
    OpenEnded,
    /// Long-running cell not requested.
    Skipped,
    Failed(String),
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Ok => f.write_str("ok"),
            CellStatus::BelowThreshold => f.write_str("below-threshold"),
            CellStatus::OpenEnded => f.write_str("open-ended"),
            CellStatus::Skipped => f.write_str("skipped-long-running"),
            CellStatus::Failed(e) => write!(f, "failed: {e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub shape: Shape,
    pub delta_x: f64,
    pub p0: f64,
}

impl TableRow {
    pub fn new(shape: Shape, delta_x: f64, p0: f64) -> Self {
        Self { shape, delta_x, p0 }
    }

    pub fn spec(&self) -> Result<WavepacketSpec> {
        WavepacketSpec::new(self.shape, self.delta_x, self.p0)
    }
}

/// Threshold cells whose fraction decays over thousands of time units
/// (rectangular packets narrower than `delta_x = 5`).
pub fn is_long_running(kind: TableKind, row: &TableRow) -> bool {
    kind == TableKind::ThresholdTable && row.shape == Shape::Rect && row.delta_x < 5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub row: TableRow,
    pub status: CellStatus,
    pub scan: Option<ScanResult>,
    pub grid: Option<GridInfo>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub kind: TableKind,
    pub options: ScanOptions,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TableOptions {
    pub scan: ScanOptions,
    pub grid: GridSettings,
    pub long_running: bool,
}

/// The standard grid of cells: `cos8`, `cos2`, `rect` at `delta_x` in {10, 2, 1, 0.1}, `p0 = 0`.
pub fn standard_rows() -> Vec<TableRow> {
    let mut rows = Vec::new();
    for shape in [Shape::CosPow(8), Shape::CosPow(2), Shape::Rect] {
        for dx in [10.0, 2.0, 1.0, 0.1] {
            rows.push(TableRow::new(shape, dx, 0.0));
        }
    }
    rows
}

pub fn run_cell(kind: TableKind, row: &TableRow, units: &PhysicalUnits, options: &TableOptions) -> CellReport {
    let start = Instant::now();
    if is_long_running(kind, row) && !options.long_running {
        return CellReport {
            row: *row,
            status: CellStatus::Skipped,
            scan: None,
            grid: None,
            runtime_s: 0.0,
        };
    }
    let outcome = row.spec().and_then(|spec| match kind {
        TableKind::PeakTable => peak_scan(&spec, units, &options.grid, &options.scan),
        TableKind::ThresholdTable => threshold_scan(&spec, units, &options.grid, &options.scan),
    });
    let runtime_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((scan, _, grid)) => {
            let status = if scan.below_threshold() && kind == TableKind::ThresholdTable {
                CellStatus::BelowThreshold
            } else if scan.open_ended && kind == TableKind::ThresholdTable {
                CellStatus::OpenEnded
            } else {
                CellStatus::Ok
            };
            CellReport {
                row: *row,
                status,
                scan: Some(scan),
                grid: Some(grid),
                runtime_s,
            }
        }
        Err(e) => CellReport {
            row: *row,
            status: CellStatus::Failed(e.to_string()),
            scan: None,
            grid: None,
            runtime_s,
        },
    }
}

/// Runs every cell in order; a failing cell is reported and the run continues.
/// Cells run one after another since each parallelizes internally and large
/// cells hold sizable buffers.
pub fn table_run(kind: TableKind, rows: &[TableRow], units: &PhysicalUnits, options: &TableOptions) -> TableReport {
    TableReport {
        kind,
        options: options.scan,
        cells: rows.iter().map(|r| run_cell(kind, r, units, options)).collect(),
    }
}

impl TableReport {
    /// Text table: one line per shape/momentum, one column per width.
    pub fn render(&self) -> String {
        let mut widths: Vec<f64> = Vec::new();
        let mut lines: Vec<(Shape, f64)> = Vec::new();
        for c in &self.cells {
            if !widths.contains(&c.row.delta_x) {
                widths.push(c.row.delta_x);
            }
            if !lines.contains(&(c.row.shape, c.row.p0)) {
                lines.push((c.row.shape, c.row.p0));
            }
        }
        let col = 22;
        let mut out = format!("{:<16}", "wavefunction");
        for w in &widths {
            out += &format!("| {:<width$}", format!("dx = {w}"), width = col);
        }
        out.push('\n');
        for (shape, p0) in lines {
            out += &format!("{:<16}", format!("{shape}, p0={p0}"));
            for w in &widths {
                let cell = self
                    .cells
                    .iter()
                    .find(|c| c.row.shape == shape && c.row.p0 == p0 && c.row.delta_x == *w);
                out += &format!(
                    "| {:<width$}",
                    cell.map(|c| self.cell_text(c)).unwrap_or_default(),
                    width = col
                );
            }
            out.push('\n');
        }
        out
    }

    fn cell_text(&self, c: &CellReport) -> String {
        match (&c.status, &c.scan, self.kind) {
            (CellStatus::Failed(_), _, _) => "error".into(),
            (CellStatus::Skipped, _, _) => "(long-running)".into(),
            (CellStatus::BelowThreshold, _, _) => "-".into(),
            (CellStatus::OpenEnded, Some(s), _) => format!("t > {:.0}", s.t_end),
            (_, Some(s), TableKind::PeakTable) => format!("t~{:.2} {:.3e}", s.t_peak, s.f_peak),
            (_, Some(s), TableKind::ThresholdTable) => match s.t_threshold {
                Some(t) => format!("t~{t:.3}"),
                None => "-".into(),
            },
            _ => String::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use num_complex::Complex64;

    fn nat() -> PhysicalUnits {
        PhysicalUnits::natural()
    }

    #[test]
    fn edges() {
        let u = nat();
        let s = WavepacketSpec::new(Shape::CosPow(8), 1.0, 0.0).unwrap();
        let h = std::f64::consts::FRAC_PI_2;
        assert_eq!(light_cone_edges(&s, 0.0, &u), (-h, h));
        assert_eq!(light_cone_edges(&s, 2.0, &u), (-(h + 2.0), h + 2.0));
        let s2 = WavepacketSpec::new(Shape::Rect, 2.0, 0.0).unwrap();
        let pi = std::f64::consts::PI;
        assert_eq!(light_cone_edges(&s2, 0.0, &u), (-pi, pi));
    }

    #[test]
    fn edge_cell_is_split_linearly() {
        // constant density 0.01 on [-20, 20]: outside mass is exact for any edge position
        let u = nat();
        let spec = WavepacketSpec::new(Shape::Rect, 1.0, 0.0).unwrap();
        let grid = SpatialGrid::new(-20.0, 20.0, 401).unwrap();
        let amp = vec![Complex64::new(0.1, 0.0); 401];
        for t in [0.0, 0.123, 1.05, 3.7] {
            let snap = DensitySnapshot::from_amplitude(t, grid, amp.clone(), 1e-13);
            let f = fraction_outside(&snap, &spec, &u).unwrap();
            let (lo, hi) = light_cone_edges(&spec, t, &u);
            assert!((f.right - 0.01 * (20.0 - hi)).abs() < 1e-14);
            assert!((f.left - 0.01 * (lo + 20.0)).abs() < 1e-14);
        }
        let snap = DensitySnapshot::from_amplitude(15.0, grid, amp, 1e-13);
        assert!(matches!(
            fraction_outside(&snap, &spec, &u),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn series_scan_cos8() {
        let u = nat();
        let spec = WavepacketSpec::new(Shape::CosPow(8), 1.0, 0.0).unwrap();
        let times = log_times(0.05, 5.0, 40).unwrap();
        let cfg = EvolutionConfig::new(&spec, &u, times, &GridSettings::default()).unwrap();
        let series = fraction_series(&cfg, FractionConvention::PerEdge).unwrap();
        assert!(series.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
        let r = scan(&cfg, &series, 1e-4, DEFAULT_REFINE_TOL).unwrap();
        assert!((r.t_peak - 0.84).abs() < 0.05, "{r:?}");
        assert!(r.below_threshold());
        assert_eq!(r.t_threshold, None);
        assert!(!r.open_ended);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let f = |t: f64| -> Result<f64> { Ok(1.0 - (t - 0.731).powi(2)) };
        let (t, v) = golden_max(&f, 0.0, 2.0, 1e-6).unwrap();
        assert!((t - 0.731).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_is_the_last_one() {
        let spec = WavepacketSpec::new(Shape::Rect, 1.0, 0.0).unwrap();
        let s = FractionSeries {
            times: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            fractions: vec![0.5, 0.05, 0.5, 0.5, 0.05, 0.01],
            spec,
            floor: 1e-13,
            convention: FractionConvention::Total,
        };
        assert_eq!(last_crossing(&s, 0.1), Some(3));
        let mut open = s.clone();
        open.fractions[5] = 0.2;
        assert_eq!(last_crossing(&open, 0.1), None);
    }

    #[test]
    fn log_time_grid() {
        let t = log_times(0.01, 10.0, 60).unwrap();
        assert_eq!(t.len(), 60);
        assert_eq!(t[0], 0.01);
        assert_eq!(t[59], 10.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!(log_times(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn empty_table_and_skips() {
        let u = nat();
        let opts = TableOptions::default();
        let r = table_run(TableKind::PeakTable, &[], &u, &opts);
        assert!(r.cells.is_empty());
        let row = TableRow::new(Shape::Rect, 0.1, 0.0);
        let c = run_cell(TableKind::ThresholdTable, &row, &u, &opts);
        assert_eq!(c.status, CellStatus::Skipped);
        let bad = TableRow::new(Shape::Rect, -1.0, 0.0);
        let c = run_cell(TableKind::PeakTable, &bad, &u, &opts);
        assert!(matches!(c.status, CellStatus::Failed(_)));
        assert!(r.render().starts_with("wavefunction"));
    }
}
