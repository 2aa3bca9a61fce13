//! Bohr, point-nucleus Dirac and finite-nucleus spectra side by side.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};
use crate::exact::{energy_exact, BoundaryRadius};
use crate::levels::{Classification, EnergyLevel, QuantumNumbers};
use crate::standard::energy_dirac;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Bohr,
    Dirac,
    Exact,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Bohr => "bohr",
            Model::Dirac => "dirac",
            Model::Exact => "exact",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nonrelativistic level for principal number `n`, ε = 1 − Z²α²/(2n²).
pub fn bohr_energy(constants: &PhysicalConstants, z: u32, n: u32) -> Result<EnergyLevel> {
    if n < 1 {
        return domain("principal quantum number must be >= 1");
    }
    let za = z as f64 * constants.alpha;
    Ok(EnergyLevel::from_binding(za * za / (2.0 * (n as f64).powi(2))))
}

/// Principal number used to line a state up with the Bohr level:
/// `n_r + |K|` for Dirac, `n_r` for the finite-nucleus formula.
pub fn principal_number(model: Model, qn: &QuantumNumbers) -> u32 {
    match model {
        Model::Bohr | Model::Exact => qn.n_r,
        Model::Dirac => qn.n_r + qn.k_abs(),
    }
}

/// Level of `qn` in `model`. For Bohr, `qn.n_r` carries the principal number.
pub fn model_energy(constants: &PhysicalConstants, model: Model, qn: &QuantumNumbers) -> Result<EnergyLevel> {
    match model {
        Model::Bohr => bohr_energy(constants, qn.z, qn.n_r),
        Model::Dirac => energy_dirac(constants, qn),
        Model::Exact => energy_exact(constants, qn.z, qn.n_r),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub model: Model,
    pub z: u32,
    /// Dirac K; absent for Bohr and finite-nucleus rows.
    pub k: Option<i32>,
    /// Radial quantum number; absent for Bohr rows.
    pub n_r: Option<u32>,
    /// Principal number used for comparison.
    pub n: u32,
    pub energy: EnergyLevel,
    pub binding_ev: Complex64,
    /// Binding energy minus the Bohr binding energy at the same `n`, eV.
    pub minus_bohr_ev: Complex64,
    /// Binding energy minus the finite-nucleus binding energy at the same
    /// `n`; absent for finite-nucleus rows.
    pub minus_exact_ev: Option<Complex64>,
}

impl SpectrumRow {
    pub fn classification(&self) -> Classification {
        self.energy.classification
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub constants: PhysicalConstants,
    pub z: u32,
    pub max_n: u32,
    /// Present when finite-nucleus rows are included.
    pub delta: Option<f64>,
    pub rows: Vec<SpectrumRow>,
}

/// (n_r, K) pairs with principal number n_r + |K| ≤ `max_n`. For n_r = 0 only
/// K > 0 is kept: with K < 0 the point-nucleus series does not terminate.
pub fn dirac_states(max_n: u32) -> Vec<(u32, i32)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for k_abs in 1..=n {
            let n_r = n - k_abs;
            let k = k_abs as i32;
            if n_r > 0 {
                out.push((n_r, -k));
            }
            out.push((n_r, k));
        }
    }
    out
}

/// Builds the comparison table for the selected models.
pub fn compare_spectra(
    constants: &PhysicalConstants,
    z: u32,
    max_n: u32,
    delta: BoundaryRadius,
    models: &[Model],
) -> Result<SpectrumTable> {
    if max_n < 1 {
        return domain("max_n must be >= 1");
    }
    if z == 0 {
        return domain("nuclear charge Z must be positive");
    }
    let bohr_ev = |n: u32| bohr_energy(constants, z, n).map(|e| e.binding_ev(constants));
    let exact_ev = |n: u32| energy_exact(constants, z, n).map(|e| e.binding_ev(constants));
    let mut rows = Vec::new();
    let wants = |m: Model| models.contains(&m);
    if wants(Model::Bohr) {
        for n in 1..=max_n {
            let energy = bohr_energy(constants, z, n)?;
            rows.push(SpectrumRow {
                model: Model::Bohr,
                z,
                k: None,
                n_r: None,
                n,
                energy,
                binding_ev: energy.binding_ev(constants),
                minus_bohr_ev: Complex64::new(0.0, 0.0),
                minus_exact_ev: Some(energy.binding_ev(constants) - exact_ev(n)?),
            });
        }
    }
    if wants(Model::Dirac) {
        for (n_r, k) in dirac_states(max_n) {
            let qn = QuantumNumbers::new(z, k, n_r)?;
            let n = principal_number(Model::Dirac, &qn);
            let energy = match energy_dirac(constants, &qn) {
                Ok(e) => e,
                Err(DiracError::SingularEnergy(_)) => {
                    EnergyLevel::from_parts(Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0))
                }
                Err(e) => return Err(e),
            };
            let binding = energy.binding_ev(constants);
            rows.push(SpectrumRow {
                model: Model::Dirac,
                z,
                k: Some(k),
                n_r: Some(n_r),
                n,
                energy,
                binding_ev: binding,
                minus_bohr_ev: binding - bohr_ev(n)?,
                minus_exact_ev: Some(binding - exact_ev(n)?),
            });
        }
    }
    if wants(Model::Exact) {
        for n_r in 1..=max_n {
            let energy = energy_exact(constants, z, n_r)?;
            let binding = energy.binding_ev(constants);
            rows.push(SpectrumRow {
                model: Model::Exact,
                z,
                k: None,
                n_r: Some(n_r),
                n: n_r,
                energy,
                binding_ev: binding,
                minus_bohr_ev: binding - bohr_ev(n_r)?,
                minus_exact_ev: None,
            });
        }
    }
    Ok(SpectrumTable {
        constants: *constants,
        z,
        max_n,
        delta: wants(Model::Exact).then_some(delta.value()),
        rows,
    })
}

/// Coupling scale factors used by the expansion fit.
pub const EXPANSION_SCALES: [f64; 3] = [1.0, 0.5, 0.25];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub model: Model,
    pub qn: QuantumNumbers,
    pub principal_n: u32,
    /// c₂ in (mc² − E)/mc² = c₂ (Zα)² + c₄ (Zα)⁴ + …
    pub leading_coefficient: f64,
    pub next_order_coefficient: f64,
    /// 1/(2n²).
    pub expected_leading: f64,
    /// (binding − Bohr binding)/Bohr binding at the physical coupling.
    pub bohr_deviation: f64,
    /// Largest absolute fit residual in units of mc².
    pub fit_residual: f64,
}

/// Fits the binding fraction at couplings α·{1, 1/2, 1/4} to
/// `c₂ u + c₄ u²` with `u = (Zα)²`.
///
/// For Bohr rows `qn.n_r` is the principal number.
pub fn alpha_expansion_check(
    constants: &PhysicalConstants,
    model: Model,
    qn: &QuantumNumbers,
) -> Result<ExpansionReport> {
    let n = principal_number(model, qn);
    if n == 0 {
        return domain(format!("{qn}: principal number must be >= 1 for {model}"));
    }
    let mut us = Vec::with_capacity(EXPANSION_SCALES.len());
    let mut ys = Vec::with_capacity(EXPANSION_SCALES.len());
    for s in EXPANSION_SCALES {
        let scaled = constants.with_alpha(constants.alpha * s)?;
        let e = model_energy(&scaled, model, qn)?;
        if !e.is_real_bound() {
            return domain(format!("{qn}: {model} level is not real at coupling scale {s}"));
        }
        let za = qn.z_alpha(&scaled);
        us.push(za * za);
        ys.push(e.binding.re);
    }
    // y/u = c₂ + c₄ u, ordinary least squares
    let ratios: Vec<f64> = ys.iter().zip(&us).map(|(y, u)| y / u).collect();
    let c4 = crate::standard::least_squares_slope(&us, &ratios);
    let mean_u = us.iter().sum::<f64>() / us.len() as f64;
    let mean_r = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let c2 = mean_r - c4 * mean_u;
    let fit_residual = us
        .iter()
        .zip(&ys)
        .map(|(u, y)| (y - c2 * u - c4 * u * u).abs())
        .fold(0.0, f64::max);
    let za = qn.z_alpha(constants);
    let scale = za.powi(6);
    if !(fit_residual <= scale) {
        return Err(DiracError::FitFailure { residual: fit_residual, scale });
    }
    let bohr = bohr_energy(constants, qn.z, n)?.binding.re;
    let actual = model_energy(constants, model, qn)?.binding.re;
    Ok(ExpansionReport {
        model,
        qn: *qn,
        principal_n: n,
        leading_coefficient: c2,
        next_order_coefficient: c4,
        expected_leading: 1.0 / (2.0 * (n as f64).powi(2)),
        bohr_deviation: (actual - bohr) / bohr,
        fit_residual,
    })
}
