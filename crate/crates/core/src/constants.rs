//! Physical constants and the conversion between laboratory and natural units.
//!
//! Everything downstream works in natural units: energies in multiples of the
//! electron rest energy and lengths in reduced Compton wavelengths.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// CODATA 2018 fine-structure constant.
pub const ALPHA_CODATA_2018: f64 = 7.297_352_569_3e-3;
/// CODATA 2018 electron rest energy, eV.
pub const REST_ENERGY_EV_CODATA_2018: f64 = 510_998.95;
/// CODATA 2018 reduced Planck constant times the speed of light, eV nm.
pub const HBAR_C_EV_NM_CODATA_2018: f64 = 197.326_980_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    /// mc² in eV.
    pub rest_energy: f64,
    /// ħc in eV nm.
    pub hbar_c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            alpha: ALPHA_CODATA_2018,
            rest_energy: REST_ENERGY_EV_CODATA_2018,
            hbar_c: HBAR_C_EV_NM_CODATA_2018,
        }
    }
}

impl PhysicalConstants {
    pub fn new(alpha: f64, rest_energy: f64, hbar_c: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("rest_energy", rest_energy), ("hbar_c", hbar_c)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be finite and positive, got {v}"));
            }
        }
        Ok(Self { alpha, rest_energy, hbar_c })
    }

    /// Same constants with the coupling replaced; used by the α-expansion fits.
    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.rest_energy, self.hbar_c)
    }

    /// Reduced Compton wavelength ħ/mc in nm.
    pub fn compton_length_nm(&self) -> f64 {
        self.hbar_c / self.rest_energy
    }

    /// Converts a dimensionless energy ε = E/mc² to eV.
    pub fn to_ev(&self, epsilon: f64) -> f64 {
        epsilon * self.rest_energy
    }
}

/// Converts a length in nm to reduced Compton wavelengths.
pub fn to_natural_units(r_nm: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(r_nm >= 0.0) || !r_nm.is_finite() {
        return domain(format!("radius must be finite and non-negative, got {r_nm}"));
    }
    Ok(r_nm * constants.rest_energy / constants.hbar_c)
}

/// Inverse of [`to_natural_units`].
pub fn from_natural_units(x: f64, constants: &PhysicalConstants) -> f64 {
    x * constants.hbar_c / constants.rest_energy
}
