use serde::{Deserialize, Serialize};

use crate::levels::{EnergyLevel, QuantumNumbers};

/// Which solution produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    /// Point nucleus, grid is the radius r.
    Standard,
    /// Finite nucleus, grid is the shifted coordinate ξ = r − δ.
    Exact,
}

impl ModelTag {
    pub fn coordinate_name(&self) -> &'static str {
        match self {
            ModelTag::Standard => "r",
            ModelTag::Exact => "xi",
        }
    }
}

/// A two-component radial function sampled on a grid, natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub model: ModelTag,
    pub qn: QuantumNumbers,
    pub energy: EnergyLevel,
    pub grid: Vec<f64>,
    pub component_1: Vec<f64>,
    pub component_2: Vec<f64>,
    pub density: Option<Vec<f64>>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Fills `density` with the sum of squared components.
    pub fn with_density(mut self) -> Self {
        self.density = Some(
            self.component_1
                .iter()
                .zip(&self.component_2)
                .map(|(f, g)| f * f + g * g)
                .collect(),
        );
        self
    }
}

/// Outcome of rescaling a series to unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    /// Norm integral of the series as built.
    pub integral_before: f64,
    /// Norm integral after rescaling, recomputed by quadrature.
    pub integral_after: f64,
    /// Absolute quadrature error estimate of `integral_after`.
    pub error_estimate: f64,
    /// Factor applied to every coefficient.
    pub scale: f64,
}
