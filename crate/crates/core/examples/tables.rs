//! Runs the peak table and the fast threshold cells, printing both tables.
//!
//! `cargo run --release --example tables [-- --long-running]`

use lightcone_core::analysis::{standard_rows, table_run, TableKind, TableOptions};
use lightcone_core::PhysicalUnits;

fn main() {
    let long_running = std::env::args().any(|a| a == "--long-running");
    let units = PhysicalUnits::natural();
    let options = TableOptions {
        long_running,
        ..Default::default()
    };
    for kind in [TableKind::PeakTable, TableKind::ThresholdTable] {
        let report = table_run(kind, &standard_rows(), &units, &options);
        println!("{kind:?}\n{}", report.render());
        for c in &report.cells {
            println!(
                "{} dx={} status={} runtime={:.1}s scan={:?} grid={:?}",
                c.row.shape, c.row.delta_x, c.status, c.runtime_s, c.scan, c.grid
            );
        }
    }
}
