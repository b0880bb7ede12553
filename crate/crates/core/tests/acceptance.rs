//! Acceptance criteria. Every test writes one `PASS`/`FAIL` line (plus detail
//! lines) straight to stderr, so the verdicts appear in `cargo test` output
//! without `--nocapture`.
//!
//! Reference values are the peak and threshold reference tables for
//! `p0 = 0`; the fraction is the per-edge tally (see `FractionConvention`).

use std::io::Write;

use lightcone_core::analysis::{
    fraction_outside, peak_scan, run_cell, CellStatus, FractionConvention, ScanOptions, TableKind, TableOptions,
    TableRow,
};
use lightcone_core::bessel::bessel_k1_scaled;
use lightcone_core::evolve::{evolve_momentum, evolve_schrodinger, l2_distance, relative_l2_distance, GridSettings};
use lightcone_core::kernel::{evolve_convolution, kernel_closed_form, kernel_numeric};
use lightcone_core::spectra::{analytic_spectrum, oracle_spectrum, SpectrumOptions};
use lightcone_core::units::ELECTRON_MASS_SI;
use lightcone_core::{
    build_spectrum, natural_time_to_si, DensitySnapshot, EvolutionConfig, PhysicalUnits, Shape, SpatialGrid,
    WavepacketSpec,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PEAK_VALUE_REL_TOL: f64 = 0.10;
const PEAK_TIME_ABS_TOL: f64 = 0.05;
const THRESHOLD_REL_TOL: f64 = 0.15;
/// "Order of magnitude" for the cell whose peak sits near quadrature noise.
const ORDER_OF_MAGNITUDE_LOG10: f64 = 0.5;
const DUAL_PATH_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-6;
const PARITY_TOL: f64 = 1e-10;
const ORACLE_REL_TOL: f64 = 1e-8;
const NONREL_L2_TOL: f64 = 1e-4;
const BESSEL_REL_TOL: f64 = 1e-12;
const SI_REL_TOL: f64 = 0.02;

/// (shape, delta_x, t_peak, f_peak)
const PEAK_REFERENCE: [(Shape, f64, f64, f64); 12] = [
    (Shape::CosPow(8), 10.0, 0.96, 1.1e-13),
    (Shape::CosPow(8), 2.0, 0.89, 2.15e-6),
    (Shape::CosPow(8), 1.0, 0.84, 7.25e-5),
    (Shape::CosPow(8), 0.1, 0.65, 1.38e-3),
    (Shape::CosPow(2), 10.0, 0.84, 2.23e-8),
    (Shape::CosPow(2), 2.0, 0.84, 2.88e-5),
    (Shape::CosPow(2), 1.0, 0.80, 3.14e-4),
    (Shape::CosPow(2), 0.1, 0.66, 1.87e-3),
    (Shape::Rect, 10.0, 0.64, 2.28e-3),
    (Shape::Rect, 2.0, 0.68, 6.46e-3),
    (Shape::Rect, 1.0, 0.66, 1.06e-2),
    (Shape::Rect, 0.1, 0.63, 4.40e-2),
];

/// (shape, delta_x, t_threshold)
const THRESHOLD_FAST: [(Shape, f64, f64); 4] = [
    (Shape::CosPow(2), 1.0, 3.1),
    (Shape::CosPow(8), 0.1, 27.0),
    (Shape::CosPow(2), 0.1, 43.5),
    (Shape::Rect, 10.0, 225.0),
];
const THRESHOLD_BLANK: [(Shape, f64); 5] = [
    (Shape::CosPow(8), 10.0),
    (Shape::CosPow(8), 2.0),
    (Shape::CosPow(8), 1.0),
    (Shape::CosPow(2), 10.0),
    (Shape::CosPow(2), 2.0),
];
const THRESHOLD_LONG: [(Shape, f64, f64); 3] = [
    (Shape::Rect, 2.0, 1150.0),
    (Shape::Rect, 1.0, 2250.0),
    (Shape::Rect, 0.1, 9000.0),
];

fn line(text: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{text}");
}

fn verdict(criterion: &str, pass: bool, summary: &str) {
    line(&format!(
        "\n{} {criterion}: {summary}",
        if pass { "PASS" } else { "FAIL" }
    ));
}

fn nat() -> PhysicalUnits {
    PhysicalUnits::natural()
}

fn spec(shape: Shape, delta_x: f64, p0: f64) -> WavepacketSpec {
    WavepacketSpec::new(shape, delta_x, p0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn peak_table_reproduction() {
    let u = nat();
    let options = ScanOptions::default();
    let mut failures = Vec::new();
    for (shape, dx, t_ref, f_ref) in PEAK_REFERENCE {
        let start = std::time::Instant::now();
        let (r, _, _) = peak_scan(&spec(shape, dx, 0.0), &u, &GridSettings::default(), &options).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let time_ok = (r.t_peak - t_ref).abs() <= PEAK_TIME_ABS_TOL;
        let value_ok = if shape == Shape::CosPow(8) && dx == 10.0 {
            (r.f_peak / f_ref).log10().abs() <= ORDER_OF_MAGNITUDE_LOG10
        } else {
            rel(r.f_peak, f_ref) <= PEAK_VALUE_REL_TOL
        };
        let ok = time_ok && value_ok;
        line(&format!(
            "  {} {shape}/dx={dx}: t_peak {:.3} (ref {t_ref}, {}), f_peak {:.4e} (ref {f_ref:e}, rel {:.3}, {}), {secs:.1}s",
            if ok { "ok  " } else { "MISS" },
            r.t_peak,
            if time_ok { "ok" } else { "out" },
            r.f_peak,
            rel(r.f_peak, f_ref),
            if value_ok { "ok" } else { "out" },
        ));
        if !ok {
            failures.push(format!("{shape}/{dx}"));
        }
    }
    verdict(
        "peak table, 12 cells (f within 10%, t within 0.05)",
        failures.is_empty(),
        &format!("{} of 12 cells outside tolerance {:?}", failures.len(), failures),
    );
    assert!(failures.is_empty(), "cells outside tolerance: {failures:?}");
}

#[test]
fn threshold_table_fast_cells() {
    let u = nat();
    let options = TableOptions::default();
    let mut failures = Vec::new();
    for (shape, dx, t_ref) in THRESHOLD_FAST {
        let c = run_cell(TableKind::ThresholdTable, &TableRow::new(shape, dx, 0.0), &u, &options);
        let t = c.scan.and_then(|s| s.t_threshold);
        let ok = c.status == CellStatus::Ok && t.is_some_and(|t| rel(t, t_ref) <= THRESHOLD_REL_TOL);
        line(&format!(
            "  {} {shape}/dx={dx}: t_threshold {:?} (ref {t_ref}), status {}, {:.1}s",
            if ok { "ok  " } else { "MISS" },
            t,
            c.status,
            c.runtime_s
        ));
        if !ok {
            failures.push(format!("{shape}/{dx}"));
        }
    }
    for (shape, dx) in THRESHOLD_BLANK {
        let c = run_cell(TableKind::ThresholdTable, &TableRow::new(shape, dx, 0.0), &u, &options);
        let ok = c.status == CellStatus::BelowThreshold;
        line(&format!(
            "  {} {shape}/dx={dx}: status {} (ref below-threshold), peak {:?}",
            if ok { "ok  " } else { "MISS" },
            c.status,
            c.scan.map(|s| s.f_peak)
        ));
        if !ok {
            failures.push(format!("{shape}/{dx}"));
        }
    }
    verdict(
        "threshold table, fast and blank cells (within 15%)",
        failures.is_empty(),
        &format!("{} of 9 cells outside tolerance {:?}", failures.len(), failures),
    );
    assert!(failures.is_empty(), "cells outside tolerance: {failures:?}");
}

#[test]
#[ignore = "long-running: rectangular threshold cells; run with --ignored"]
fn threshold_table_long_running_cells() {
    let u = nat();
    let options = TableOptions {
        long_running: true,
        scan: ScanOptions {
            max_horizon: 20_000.0,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut failures = Vec::new();
    for (shape, dx, t_ref) in THRESHOLD_LONG {
        let c = run_cell(TableKind::ThresholdTable, &TableRow::new(shape, dx, 0.0), &u, &options);
        let t = c.scan.and_then(|s| s.t_threshold);
        let ok = c.status == CellStatus::Ok && t.is_some_and(|t| rel(t, t_ref) <= THRESHOLD_REL_TOL);
        line(&format!(
            "  {} {shape}/dx={dx}: t_threshold {:?} (ref {t_ref}), status {}, {:.1}s",
            if ok { "ok  " } else { "MISS" },
            t,
            c.status,
            c.runtime_s
        ));
        if !ok {
            failures.push(format!("{shape}/{dx}"));
        }
    }
    verdict(
        "threshold table, long-running rectangular cells (within 15%)",
        failures.is_empty(),
        &format!("{} of 3 cells outside tolerance {:?}", failures.len(), failures),
    );
    assert!(failures.is_empty(), "cells outside tolerance: {failures:?}");
}

#[test]
fn dual_path_oracle() {
    let u = nat();
    let s = spec(Shape::CosPow(8), 1.0, 0.0);
    let grid = SpatialGrid::new(-12.0, 12.0, 256).unwrap();
    let floor = 1e-20;
    let initial = DensitySnapshot::initial(&s, grid, &u, floor);
    let conv = evolve_convolution(&initial, 0.5, &u).unwrap();
    let spectrum = build_spectrum(&s, &u, &SpectrumOptions::for_shape(s.shape).with_max_spacing(0.05)).unwrap();
    let cfg = EvolutionConfig::with_grids(spectrum, grid, vec![0.5], floor, &u).unwrap();
    let direct = evolve_momentum(&cfg, 0.5).unwrap();
    let conv_dist = relative_l2_distance(&conv.amplitude, &direct.amplitude);

    let mut worst: f64 = 0.0;
    let mut worst_at = (0.0, 0.0);
    for i in 0..10 {
        let dt = 0.2 + 0.2 * i as f64;
        for j in 0..10 {
            let s_interval = 0.5 + 0.75 * j as f64;
            let dx = (s_interval * s_interval + dt * dt).sqrt();
            let a = kernel_numeric(dt, dx, &u).unwrap().value.unwrap();
            let b = kernel_closed_form(dt, dx, &u).unwrap().value.unwrap();
            let r = (a - b).norm() / b.norm();
            if r > worst {
                worst = r;
                worst_at = (dt, dx);
            }
        }
    }
    let ok = conv_dist <= DUAL_PATH_TOL && worst <= DUAL_PATH_TOL;
    line(&format!(
        "  convolution vs momentum (256 points, t=0.5): relative L2 {conv_dist:.3e}"
    ));
    line(&format!(
        "  kernel numeric vs closed form (10x10 space-like): max relative {worst:.3e} at dt={}, dx={:.4}",
        worst_at.0, worst_at.1
    ));
    verdict(
        "dual-path oracle (<= 1e-6)",
        ok,
        &format!("convolution {conv_dist:.2e}, kernel lattice {worst:.2e}"),
    );
    assert!(ok);
}

fn invariant_shapes() -> [WavepacketSpec; 3] {
    [
        spec(Shape::CosPow(8), 1.0, 0.0),
        spec(Shape::CosPow(2), 1.0, 0.0),
        spec(Shape::Rect, 1.0, 0.0),
    ]
}

const INVARIANT_TIMES: [f64; 6] = [0.0, 0.1, 0.5, 0.84, 2.0, 5.0];

#[test]
fn invariant_unitarity() {
    let u = nat();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for s in invariant_shapes() {
        let cfg = EvolutionConfig::new(&s, &u, INVARIANT_TIMES.to_vec(), &GridSettings::default()).unwrap();
        for t in INVARIANT_TIMES {
            match evolve_momentum(&cfg, t) {
                Ok(snap) => worst = worst.max((snap.norm() - 1.0).abs()),
                Err(e) => failures.push(format!("{} t={t}: {e}", s.shape)),
            }
        }
    }
    let ok = failures.is_empty() && worst <= NORM_TOL;
    verdict(
        "invariant: unitarity (|norm - 1| <= 1e-6)",
        ok,
        &format!("max |norm - 1| = {worst:.2e}, errors {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn invariant_compact_support_at_zero_time() {
    let u = nat();
    let mut failures = Vec::new();
    for s in invariant_shapes() {
        let cfg = EvolutionConfig::new(&s, &u, vec![0.0], &GridSettings::default()).unwrap();
        let snap = evolve_momentum(&cfg, 0.0).unwrap();
        let f = fraction_outside(&snap, &s, &u).unwrap().total();
        let bound = 10.0 * cfg.numeric_floor * 2.0 * s.half_width();
        let ok = f <= bound;
        line(&format!(
            "  {} {}: outside fraction at t=0 {f:.3e}, bound {bound:.3e}",
            if ok { "ok  " } else { "MISS" },
            s.shape
        ));
        if !ok {
            failures.push(s.shape.to_string());
        }
    }
    verdict(
        "invariant: t=0 outside fraction numerically zero",
        failures.is_empty(),
        &format!("shapes above bound {failures:?}"),
    );
    assert!(failures.is_empty());
}

#[test]
fn invariant_parity() {
    let u = nat();
    let mut worst: f64 = 0.0;
    for s in invariant_shapes() {
        let cfg = EvolutionConfig::new(&s, &u, INVARIANT_TIMES.to_vec(), &GridSettings::default()).unwrap();
        for t in INVARIANT_TIMES {
            let d = evolve_momentum(&cfg, t).unwrap().density;
            let n = d.len();
            for i in 0..n / 2 {
                worst = worst.max((d[i] - d[n - 1 - i]).abs());
            }
        }
    }
    let ok = worst <= PARITY_TOL;
    verdict(
        "invariant: parity at p0=0 (<= 1e-10)",
        ok,
        &format!("max |rho(x) - rho(-x)| = {worst:.2e}"),
    );
    assert!(ok);
}

#[test]
fn invariant_leakage_positivity() {
    let u = nat();
    let times = [0.05, 0.2, 1.0, 5.0];
    let mut smallest = f64::INFINITY;
    for s in invariant_shapes() {
        let cfg = EvolutionConfig::new(&s, &u, times.to_vec(), &GridSettings::default()).unwrap();
        for t in times {
            let snap = evolve_momentum(&cfg, t).unwrap();
            smallest = smallest.min(fraction_outside(&snap, &s, &u).unwrap().total());
        }
    }
    let ok = smallest > f64::EPSILON;
    verdict(
        "invariant: leakage strictly positive for t > 0",
        ok,
        &format!(
            "smallest outside fraction {smallest:.3e} (machine epsilon {:.2e})",
            f64::EPSILON
        ),
    );
    assert!(ok);
}

fn peak(s: &WavepacketSpec) -> f64 {
    peak_scan(s, &nat(), &GridSettings::default(), &ScanOptions::default())
        .unwrap()
        .0
        .f_peak
}

#[test]
fn invariant_momentum_ordering() {
    let peaks: Vec<f64> = [0.0, 1.0, 10.0]
        .iter()
        .map(|&p0| peak(&spec(Shape::CosPow(8), 1.0, p0)))
        .collect();
    let ok = peaks[0] > peaks[1] && peaks[1] > peaks[2];
    verdict(
        "invariant: momentum ordering cos8/dx=1 (p0 = 0 > 1 > 10)",
        ok,
        &format!("peaks {:.3e} > {:.3e} > {:.3e}", peaks[0], peaks[1], peaks[2]),
    );
    assert!(ok);
}

#[test]
fn invariant_shape_ordering() {
    let peaks: Vec<f64> = [Shape::Rect, Shape::CosPow(2), Shape::CosPow(8)]
        .iter()
        .map(|&shape| peak(&spec(shape, 1.0, 0.0)))
        .collect();
    let ok = peaks[0] > peaks[1] && peaks[1] > peaks[2];
    verdict(
        "invariant: shape ordering at dx=1 (rect > cos2 > cos8)",
        ok,
        &format!("peaks {:.3e} > {:.3e} > {:.3e}", peaks[0], peaks[1], peaks[2]),
    );
    assert!(ok);
}

#[test]
fn invariant_spectra_match_fourier_oracle() {
    let u = nat();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for s in [
        spec(Shape::Rect, 1.0, 0.0),
        spec(Shape::CosPow(2), 1.0, 0.0),
        spec(Shape::CosPow(8), 1.0, 0.0),
    ] {
        for _ in 0..20 {
            let p = rng.random_range(-20.0..20.0);
            let a = analytic_spectrum(p, &s, &u);
            let b = oracle_spectrum(p, &s, &u, 20_000).unwrap();
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    let ok = worst <= ORACLE_REL_TOL;
    verdict(
        "invariant: spectra vs Fourier oracle, 20 random momenta (<= 1e-8)",
        ok,
        &format!("max relative error {worst:.2e}"),
    );
    assert!(ok);
}

#[test]
fn nonrelativistic_limit() {
    let u = nat();
    let s = spec(Shape::CosPow(8), 100.0, 0.0);
    let cfg = EvolutionConfig::new(&s, &u, vec![5.0], &GridSettings::default()).unwrap();
    let a = evolve_momentum(&cfg, 5.0).unwrap();
    let b = evolve_schrodinger(&cfg, 5.0).unwrap();
    let d = l2_distance(&a.density, &b.density, &cfg.spatial);
    let ok = d <= NONREL_L2_TOL;
    verdict(
        "non-relativistic limit, dx=100, t=5 (L2 <= 1e-4)",
        ok,
        &format!("density L2 distance {d:.3e}"),
    );
    assert!(ok);
}

/// `e^x K1(x) = \int_0^inf e^{-x (cosh t - 1)} cosh t dt`, trapezoid in `t`.
fn k1_scaled_oracle(x: f64) -> f64 {
    let h = 0.002;
    let mut acc = 0.5;
    for i in 1.. {
        let t = i as f64 * h;
        let v = (-x * (t.cosh() - 1.0)).exp() * t.cosh();
        acc += v;
        if v < 1e-20 * acc {
            break;
        }
    }
    acc * h
}

#[test]
fn bessel_k1_accuracy() {
    let mut worst: f64 = 0.0;
    let mut worst_x = 0.0;
    for i in 0..=60 {
        let x = 1e-4 * 1e6f64.powf(i as f64 / 60.0);
        let r = rel(bessel_k1_scaled(x).unwrap(), k1_scaled_oracle(x));
        if r > worst {
            worst = r;
            worst_x = x;
        }
    }
    let ok = worst <= BESSEL_REL_TOL;
    verdict(
        "Bessel K1 vs integral representation on [1e-4, 100] (<= 1e-12)",
        ok,
        &format!("max relative error {worst:.2e} at x = {worst_x:.3e}"),
    );
    assert!(ok);
}

#[test]
fn si_time_conversion() {
    let t = natural_time_to_si(1e4, ELECTRON_MASS_SI).unwrap();
    let ok = rel(t, 1.3e-17) <= SI_REL_TOL;
    verdict(
        "SI conversion, t = 1e4 for an electron (1.3e-17 s within 2%)",
        ok,
        &format!("{t:.4e} s"),
    );
    assert!(ok);
}

#[test]
fn convention_is_half_the_two_sided_total() {
    // the per-edge tally is exactly half of the two-sided one
    let u = nat();
    let s = spec(Shape::CosPow(2), 1.0, 0.0);
    let cfg = EvolutionConfig::new(&s, &u, vec![0.8], &GridSettings::default()).unwrap();
    let snap = evolve_momentum(&cfg, 0.8).unwrap();
    let f = fraction_outside(&snap, &s, &u).unwrap();
    assert_eq!(
        f.value(FractionConvention::PerEdge),
        0.5 * f.value(FractionConvention::Total)
    );
    assert!(rel(f.left, f.right) < 1e-8);
}
