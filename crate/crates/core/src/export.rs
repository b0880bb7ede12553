//! CSV writers. Floats are written with 17 significant digits so every value
//! round-trips exactly.

use std::io::{self, Write};

use crate::analysis::{FractionSeries, TableReport};
use crate::evolve::DensitySnapshot;
use crate::kernel::LatticeRow;
use crate::spectra::MomentumSpectrum;

pub const SPECTRUM_HEADER: &str = "p,re,im,abs2";
pub const SNAPSHOT_HEADER: &str = "t,x,re,im,density";
pub const SERIES_HEADER: &str = "t,fraction";
pub const TABLE_HEADER: &str = "shape,delta_x,p0,t_peak,f_peak,t_threshold,status";
pub const KERNEL_HEADER: &str = "dt,dx,region,re,im,closed_re,closed_im,rel_diff";

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_spectrum<W: Write>(mut w: W, spectrum: &MomentumSpectrum) -> io::Result<()> {
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for (k, c) in spectrum.values.iter().enumerate() {
        let p = spectrum.grid.point(k);
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(p),
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(c.norm_sqr())
        )?;
    }
    Ok(())
}

/// Snapshots concatenated in order; a single snapshot is the plain snapshot file.
pub fn write_snapshots<W: Write>(mut w: W, snapshots: &[DensitySnapshot]) -> io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for s in snapshots {
        let t = fmt_f64(s.t);
        for (i, (a, d)) in s.amplitude.iter().zip(&s.density).enumerate() {
            writeln!(
                w,
                "{t},{},{},{},{}",
                fmt_f64(s.grid.point(i)),
                fmt_f64(a.re),
                fmt_f64(a.im),
                fmt_f64(*d)
            )?;
        }
    }
    Ok(())
}

pub fn write_series<W: Write>(mut w: W, series: &FractionSeries) -> io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for (t, f) in series.times.iter().zip(&series.fractions) {
        writeln!(w, "{},{}", fmt_f64(*t), fmt_f64(*f))?;
    }
    Ok(())
}

/// Missing values are empty fields; the status column never contains commas.
pub fn write_table<W: Write>(mut w: W, report: &TableReport) -> io::Result<()> {
    writeln!(w, "{TABLE_HEADER}")?;
    for c in &report.cells {
        let status = c.status.to_string().replace([',', '\n', '\r'], ";");
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            c.row.shape,
            fmt_f64(c.row.delta_x),
            fmt_f64(c.row.p0),
            fmt_opt(c.scan.map(|s| s.t_peak)),
            fmt_opt(c.scan.map(|s| s.f_peak)),
            fmt_opt(c.scan.and_then(|s| s.t_threshold)),
            status
        )?;
    }
    Ok(())
}

/// Leading `dt,dx,region,re,im` columns hold the numeric path; the closed form
/// and the relative difference follow where they are defined.
pub fn write_kernel<W: Write>(mut w: W, rows: &[LatticeRow]) -> io::Result<()> {
    writeln!(w, "{KERNEL_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.dt),
            fmt_f64(r.dx),
            r.region,
            fmt_opt(r.numeric.map(|v| v.re)),
            fmt_opt(r.numeric.map(|v| v.im)),
            fmt_opt(r.closed.map(|v| v.re)),
            fmt_opt(r.closed.map(|v| v.im)),
            fmt_opt(r.relative_difference()),
        )?;
    }
    Ok(())
}
