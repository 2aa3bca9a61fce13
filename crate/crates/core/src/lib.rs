//! Bound states of the radial Dirac equation in a Coulomb field.
//!
//! Two series solutions are implemented side by side: the point-nucleus
//! solution ([`standard`]) and the finite-nucleus solution ([`exact`]) whose
//! boundary sits at the nuclear radius δ. [`ladder`] audits the complete
//! linear system behind the finite-nucleus recursion, and [`comparison`]
//! lines the spectra up against the Bohr levels.

// `!(x <= tol)` is used deliberately so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod constants;
pub mod error;
pub mod exact;
pub mod io;
pub mod ladder;
pub mod levels;
pub mod profile;
pub mod quadrature;
pub mod standard;

pub use constants::{from_natural_units, to_natural_units, PhysicalConstants};
pub use error::{DiracError, Result};
pub use exact::{
    build_exact_series, coefficients_exact, density_exact, energy_exact, normalize_exact,
    quantization_residual, quantization_root, wavefunction_exact, BoundaryRadius, ExactSeries,
};
pub use levels::{derive_scales, Classification, DerivedScales, EnergyLevel, QuantumNumbers};
pub use profile::{ModelTag, NormalizationReport, RadialProfile};
pub use standard::{
    coefficients_standard, density_standard, divergence_diagnostic, energy_dirac,
    wavefunction_standard, StandardSeries,
};
