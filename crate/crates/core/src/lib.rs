//! Free positive-energy (Salpeter) evolution of compactly supported
//! wavepackets and the fraction of probability found outside the light cone.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bessel;
pub mod error;
pub mod evolve;
pub mod export;
pub mod grid;
pub mod kernel;
pub mod spectra;
pub mod sum;
pub mod units;
pub mod wavepacket;

pub use analysis::{
    fraction_outside, fraction_series, light_cone_edges, scan, table_run, FractionConvention, FractionSeries,
    ScanResult, TableKind, TableReport,
};
pub use bessel::bessel_k1;
pub use error::{Error, Result};
pub use evolve::{evolve_momentum, evolve_schrodinger, heatmap, DensitySnapshot, EvolutionConfig, GridSettings};
pub use grid::{MomentumGrid, SpatialGrid};
pub use kernel::{evolve_convolution, kernel_closed_form, kernel_numeric, KernelSample, Region};
pub use spectra::{build_spectrum, MomentumSpectrum, SpectrumOptions};
pub use units::{compton_wavelength, dispersion_energy, natural_time_to_si, PhysicalUnits};
pub use wavepacket::{Shape, WavepacketSpec};
