//! Quantum numbers, energy levels and the scales derived from them.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};

/// Labels a bound state: nuclear charge `z`, Dirac's `k` (nonzero) and the
/// radial quantum number `n_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub z: u32,
    pub k: i32,
    pub n_r: u32,
}

impl QuantumNumbers {
    pub fn new(z: u32, k: i32, n_r: u32) -> Result<Self> {
        if z == 0 {
            return domain("nuclear charge Z must be positive");
        }
        if k == 0 {
            return domain("Dirac quantum number K must be nonzero");
        }
        Ok(Self { z, k, n_r })
    }

    /// Zα for the given coupling.
    pub fn z_alpha(&self, constants: &PhysicalConstants) -> f64 {
        self.z as f64 * constants.alpha
    }

    pub fn k_abs(&self) -> u32 {
        self.k.unsigned_abs()
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z={} K={} n_r={}", self.z, self.k, self.n_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    RealBound,
    Virtual,
    Singular,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::RealBound => "real_bound",
            Classification::Virtual => "virtual",
            Classification::Singular => "singular",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An energy in units of mc², possibly complex.
///
/// Next to ε itself the level carries the binding fraction 1 − ε, computed
/// without the cancellation that `1.0 - epsilon` suffers for ε close to one.
/// Binding energies, expansion fits and the scales `a`, `λ` all read from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub value: Complex64,
    pub binding: Complex64,
    pub classification: Classification,
}

impl EnergyLevel {
    /// Builds a level from ε and an independently computed 1 − ε.
    pub fn from_parts(value: Complex64, binding: Complex64) -> Self {
        let classification = if value.im != 0.0 || binding.im != 0.0 {
            Classification::Virtual
        } else if value.re > 0.0 && binding.re > 0.0 && value.re.is_finite() {
            Classification::RealBound
        } else {
            Classification::Singular
        };
        Self { value, binding, classification }
    }

    pub fn from_epsilon(epsilon: f64) -> Self {
        Self::from_parts(Complex64::new(epsilon, 0.0), Complex64::new(1.0 - epsilon, 0.0))
    }

    /// Level with binding fraction `beta`, i.e. ε = 1 − β.
    pub fn from_binding(beta: f64) -> Self {
        Self::from_parts(Complex64::new(1.0 - beta, 0.0), Complex64::new(beta, 0.0))
    }

    /// Level ε = (1 + x)^(-1/2) with its binding fraction computed stably.
    pub fn inverse_sqrt_one_plus(x: Complex64) -> Self {
        if x.im == 0.0 && x.re >= -1.0 {
            let s = (1.0 + x.re).sqrt();
            return Self::from_parts(
                Complex64::new(1.0 / s, 0.0),
                Complex64::new(x.re / (s * (1.0 + s)), 0.0),
            );
        }
        let s = (Complex64::new(1.0, 0.0) + x).sqrt();
        Self::from_parts(s.inv(), x / (s * (s + 1.0)))
    }

    /// Real part of ε.
    pub fn epsilon(&self) -> f64 {
        self.value.re
    }

    pub fn is_real_bound(&self) -> bool {
        self.classification == Classification::RealBound
    }

    /// Binding energy mc² − E in eV.
    pub fn binding_ev(&self, constants: &PhysicalConstants) -> Complex64 {
        self.binding * constants.rest_energy
    }

    /// Energy E in eV including the rest energy.
    pub fn energy_ev(&self, constants: &PhysicalConstants) -> Complex64 {
        self.value * constants.rest_energy
    }
}

/// Decay rate `a` (inverse reduced Compton wavelengths), `λ` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub a: Complex64,
    pub lambda: Complex64,
    pub gamma: Complex64,
}

/// The real-valued scales of a real bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealScales {
    pub a: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl DerivedScales {
    pub fn real(&self) -> Option<RealScales> {
        if self.a.im == 0.0 && self.lambda.im == 0.0 && self.gamma.im == 0.0 {
            Some(RealScales { a: self.a.re, lambda: self.lambda.re, gamma: self.gamma.re })
        } else {
            None
        }
    }

    /// `a > 0` and `0 < λ < 1`, the range of a genuine bound state.
    pub fn in_bound_range(&self) -> bool {
        self.real()
            .map(|s| s.a > 0.0 && s.lambda > 0.0 && s.lambda < 1.0)
            .unwrap_or(false)
    }
}

/// γ = √(K² − Z²α²), imaginary once Zα exceeds |K|.
pub fn gamma(constants: &PhysicalConstants, qn: &QuantumNumbers) -> Complex64 {
    let k2 = (qn.k as f64) * (qn.k as f64);
    let za = qn.z_alpha(constants);
    let disc = k2 - za * za;
    if disc >= 0.0 {
        Complex64::new(disc.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-disc).sqrt())
    }
}

pub fn derive_scales(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
) -> Result<DerivedScales> {
    // 1 - ε and 1 + ε
    let minus = energy.binding;
    let plus = Complex64::new(2.0, 0.0) - energy.binding;
    if minus == Complex64::new(0.0, 0.0) || plus == Complex64::new(0.0, 0.0) {
        return Err(DiracError::SingularEnergy(format!(
            "|E| = mc² exactly for {qn}: the decay rate a vanishes"
        )));
    }
    let (a, lambda) = if minus.im == 0.0 && plus.im == 0.0 && minus.re > 0.0 && plus.re > 0.0 {
        let (m, p) = (minus.re, plus.re);
        (Complex64::new((m * p).sqrt(), 0.0), Complex64::new((m / p).sqrt(), 0.0))
    } else {
        ((minus * plus).sqrt(), (minus / plus).sqrt())
    };
    Ok(DerivedScales { a, lambda, gamma: gamma(constants, qn) })
}
