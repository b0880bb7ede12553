//! Physical units and the free positive-energy dispersion relation.
//!
//! Every quantity in the crate is expressed in the units carried by a
//! [`PhysicalUnits`] value. The default is natural units, `hbar = c = m = 1`,
//! so lengths are measured in Compton wavelengths and times in `hbar / (m c^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m / s (exact).
pub const C_SI: f64 = 299_792_458.0;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
}

impl Default for PhysicalUnits {
    fn default() -> Self {
        Self::natural()
    }
}

impl PhysicalUnits {
    pub const fn natural() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            m: 1.0,
        }
    }

    pub fn new(hbar: f64, c: f64, m: f64) -> Result<Self> {
        let units = Self { hbar, c, m };
        units.validate()?;
        Ok(units)
    }

    /// SI units for a particle of the given mass.
    pub fn si(mass_kg: f64) -> Result<Self> {
        Self::new(HBAR_SI, C_SI, mass_kg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("c", self.c), ("m", self.m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// `m c`, the momentum scale at which the dispersion turns relativistic.
    pub fn compton_momentum(&self) -> f64 {
        self.m * self.c
    }

    pub fn compton_wavelength(&self) -> f64 {
        compton_wavelength(self)
    }

    /// `hbar / (m c^2)`, one natural time unit expressed in these units.
    pub fn compton_time(&self) -> f64 {
        self.hbar / self.rest_energy()
    }
}

/// `E_p = sqrt(m^2 c^4 + p^2 c^2)`.
pub fn dispersion_energy(p: f64, units: &PhysicalUnits) -> f64 {
    let mc2 = units.rest_energy();
    let pc = p * units.c;
    mc2.hypot(pc)
}

/// Non-relativistic dispersion `m c^2 + p^2 / 2m`, kept for limit comparisons.
pub fn schrodinger_energy(p: f64, units: &PhysicalUnits) -> f64 {
    units.rest_energy() + p * p / (2.0 * units.m)
}

/// Reduced Compton wavelength `hbar / (m c)`.
pub fn compton_wavelength(units: &PhysicalUnits) -> f64 {
    units.hbar / (units.m * units.c)
}

/// Converts a time in natural units (`hbar = c = m = 1`) into seconds for a
/// particle of mass `particle_mass_si` kilograms.
pub fn natural_time_to_si(t_natural: f64, particle_mass_si: f64) -> Result<f64> {
    if !(particle_mass_si.is_finite() && particle_mass_si > 0.0) {
        return Err(Error::Domain {
            function: "natural_time_to_si",
            value: particle_mass_si,
        });
    }
    Ok(t_natural * HBAR_SI / (particle_mass_si * C_SI * C_SI))
}
