//! Finite-nucleus (exact boundary) solution.
//!
//! Outside a nucleus of radius δ the shifted coordinate ξ = r − δ ≥ 0 is
//! used, with `F = e^{−aξ} f(ξ)`, `G = e^{−aξ} g(ξ)` and polynomial `f`, `g`
//! of degree n_r. Every order ν contributes two recursion lines (A and B),
//! see [`recursion_rows`]; the full set is assembled by
//! [`crate::ladder::assemble_ladder`].

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};
use crate::levels::{derive_scales, DerivedScales, EnergyLevel, QuantumNumbers};
use crate::profile::{ModelTag, NormalizationReport, RadialProfile};
use crate::quadrature::integrate_to_infinity;

/// Proton charge radius over the reduced Compton wavelength, ≈ 0.84 fm / 386 fm.
pub const DEFAULT_DELTA: f64 = 2.4e-5;

/// Bisection bracket on ε, in units of mc².
pub const ROOT_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-12);
pub const ROOT_MAX_ITERATIONS: usize = 200;
/// Accepted |residual| at the root, units of mc².
pub const ROOT_RESIDUAL_TOLERANCE: f64 = 1e-13;
/// Relative size of the would-be (n_r + 1)-th coefficients and tail
/// residuals below which a series counts as consistent.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Nuclear radius δ > 0 in reduced Compton wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BoundaryRadius(f64);

impl BoundaryRadius {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("boundary radius must be finite and positive, got {delta}"));
        }
        Ok(Self(delta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for BoundaryRadius {
    fn default() -> Self {
        Self(DEFAULT_DELTA)
    }
}

/// ε = [1 + (Zα/n_r)²]^(-1/2), n_r ≥ 1. Depends on neither K nor δ.
pub fn energy_exact(constants: &PhysicalConstants, z: u32, n_r: u32) -> Result<EnergyLevel> {
    if n_r == 0 {
        return domain("finite-nucleus levels need n_r >= 1");
    }
    if z == 0 {
        return domain("nuclear charge Z must be positive");
    }
    let ratio = z as f64 * constants.alpha / n_r as f64;
    Ok(EnergyLevel::inverse_sqrt_one_plus((ratio * ratio).into()))
}

/// Multipliers of one recursion line at a fixed order ν.
///
/// The line reads
/// `prev_b b_{ν−1} + prev_d d_{ν−1} + b b_ν + d d_ν + next_b b_{ν+1} + next_d d_{ν+1} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RecursionRow {
    pub prev_b: f64,
    pub prev_d: f64,
    pub b: f64,
    pub d: f64,
    pub next_b: f64,
    pub next_d: f64,
}

/// Real scales at an energy inside the bound range: `(1 − ε, 1 + ε, a, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BoundKinematics {
    pub minus: f64,
    pub plus: f64,
    pub a: f64,
    pub lambda: f64,
}

impl BoundKinematics {
    pub(crate) fn from_level(energy: &EnergyLevel) -> Result<Self> {
        let beta = energy.binding;
        if beta.im != 0.0 || energy.value.im != 0.0 || !(beta.re > 0.0 && beta.re < 2.0) {
            return domain(format!("energy {} is outside (-mc², mc²)", energy.value));
        }
        let minus = beta.re;
        let plus = 2.0 - minus;
        Ok(Self { minus, plus, a: (minus * plus).sqrt(), lambda: (minus / plus).sqrt() })
    }
}

pub(crate) fn rows_at(
    kin: &BoundKinematics,
    z_alpha: f64,
    k: f64,
    delta: f64,
    nu: usize,
) -> [RecursionRow; 2] {
    let nu_f = nu as f64;
    let BoundKinematics { minus, plus, a, .. } = *kin;
    let first = RecursionRow {
        prev_b: -minus,
        prev_d: -a,
        b: -minus * delta + z_alpha,
        d: k + nu_f - delta * a,
        next_b: 0.0,
        next_d: delta * (nu_f + 1.0),
    };
    let second = RecursionRow {
        prev_b: a,
        prev_d: plus,
        b: k - nu_f + delta * a,
        d: plus * delta + z_alpha,
        next_b: -delta * (nu_f + 1.0),
        next_d: 0.0,
    };
    [first, second]
}

/// The two recursion lines at order ν for the given state, energy and δ,
/// natural units (energies over mc², lengths over ħ/mc).
pub fn recursion_rows(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    delta: BoundaryRadius,
    nu: usize,
) -> Result<[RecursionRow; 2]> {
    let kin = BoundKinematics::from_level(energy)?;
    Ok(rows_at(&kin, qn.z_alpha(constants), qn.k as f64, delta.value(), nu))
}

/// Solves the order −1 lines for the leading exponent σ.
///
/// Only `δ σ d₀` and `−δ σ b₀` survive there, so any δ > 0 with a nonzero
/// leading pair forces σ = 0.
pub fn indicial_exponent(delta: BoundaryRadius, b0: f64, d0: f64) -> Result<f64> {
    let coefficients = [delta.value() * d0, -delta.value() * b0];
    let constants = [0.0, 0.0];
    let norm: f64 = coefficients.iter().map(|c| c * c).sum();
    if norm == 0.0 {
        return domain("indicial lines vanish identically: b0 = d0 = 0");
    }
    let sigma = -coefficients.iter().zip(constants).map(|(c, k)| c * k).sum::<f64>() / norm;
    Ok(sigma + 0.0)
}

/// Residual of the quantization condition at `energy`.
///
/// The two order-n_r lines are combined with multipliers `1 + ε` (first line)
/// and `a` (second), which removes b_{n_r−1} and d_{n_r−1}. The remaining
/// terms are evaluated with `b_{n_r} = 1` and `d_{n_r} = −λ b_{n_r}` from the
/// tail lines. In units of mc².
pub fn quantization_residual(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    delta: BoundaryRadius,
    energy: &EnergyLevel,
) -> Result<f64> {
    let kin = BoundKinematics::from_level(energy)?;
    Ok(residual_at(&kin, qn.z_alpha(constants), qn.k as f64, delta.value(), qn.n_r as usize))
}

fn residual_at(kin: &BoundKinematics, z_alpha: f64, k: f64, delta: f64, n: usize) -> f64 {
    let [first, second] = rows_at(kin, z_alpha, k, delta, n);
    let coeff_b = kin.plus * first.b + kin.a * second.b;
    let coeff_d = kin.plus * first.d + kin.a * second.d;
    coeff_b - kin.lambda * coeff_d
}

/// Solves the quantization condition for ε by bisection on the binding
/// fraction 1 − ε over [`ROOT_BRACKET`].
pub fn quantization_root(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    delta: BoundaryRadius,
) -> Result<EnergyLevel> {
    if qn.n_r == 0 {
        return domain("finite-nucleus levels need n_r >= 1");
    }
    let za = qn.z_alpha(constants);
    let k = qn.k as f64;
    let n = qn.n_r as usize;
    let at = |beta: f64| {
        let level = EnergyLevel::from_binding(beta);
        BoundKinematics::from_level(&level).map(|kin| residual_at(&kin, za, k, delta.value(), n))
    };
    // binding fraction bracket
    let (mut lo, mut hi) = (1.0 - ROOT_BRACKET.1, 1.0 - ROOT_BRACKET.0);
    let (mut f_lo, f_hi) = (at(lo)?, at(hi)?);
    if f_lo == 0.0 {
        return Ok(EnergyLevel::from_binding(lo));
    }
    if f_hi == 0.0 {
        return Ok(EnergyLevel::from_binding(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(DiracError::NoRoot(format!(
            "{qn}: residual has one sign on the bracket ({f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..ROOT_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = at(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    let residual = at(beta)?;
    if !(residual.abs() <= ROOT_RESIDUAL_TOLERANCE) {
        return Err(DiracError::NoRoot(format!("{qn}: bisection stalled at residual {residual:e}")));
    }
    Ok(EnergyLevel::from_binding(beta))
}

/// How well a built series satisfies the lines not used to construct it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// b_{n_r+1}, d_{n_r+1} as demanded by the order-n_r lines.
    pub next_b: f64,
    pub next_d: f64,
    /// max(|b_{n_r+1}|, |d_{n_r+1}|) over the largest kept coefficient.
    pub relative_next: f64,
    /// Tail lines `(ε−1) b_{n_r} − a d_{n_r}` and `a b_{n_r} + (ε+1) d_{n_r}`,
    /// each divided by the magnitude of its terms.
    pub tail_residuals: [f64; 2],
    pub quantization_residual: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSeries {
    pub qn: QuantumNumbers,
    pub energy: EnergyLevel,
    pub delta: BoundaryRadius,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
    /// Indicial exponent, always 0.
    pub sigma: f64,
    pub a: f64,
    pub scales: DerivedScales,
    pub consistency: ConsistencyReport,
}

/// Builds the coefficients at an arbitrary bound energy.
///
/// With d₀ = 1 the order-ν lines fix (b_{ν+1}, d_{ν+1}) for ν < n_r. The free
/// b₀ is then chosen so that the first tail line holds. At the quantized
/// energy this also satisfies the second tail line and the combined
/// quantization condition; whatever the remaining lines demand of
/// b_{n_r+1}, d_{n_r+1} is recorded in the consistency report.
pub fn build_exact_series(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    delta: BoundaryRadius,
) -> Result<ExactSeries> {
    if qn.n_r == 0 {
        return domain("finite-nucleus series need n_r >= 1");
    }
    let kin = BoundKinematics::from_level(energy)?;
    let za = qn.z_alpha(constants);
    let k = qn.k as f64;
    let dl = delta.value();
    let n = qn.n_r as usize;

    // Propagate the two basis solutions (b0, d0) = (1, 0) and (0, 1).
    let propagate = |b0: f64, d0: f64| {
        let mut b = vec![b0];
        let mut d = vec![d0];
        for nu in 0..n {
            let [first, second] = rows_at(&kin, za, k, dl, nu);
            let (bp, dp) = if nu == 0 { (0.0, 0.0) } else { (b[nu - 1], d[nu - 1]) };
            let rest_first = first.prev_b * bp + first.prev_d * dp + first.b * b[nu] + first.d * d[nu];
            let rest_second = second.prev_b * bp + second.prev_d * dp + second.b * b[nu] + second.d * d[nu];
            d.push(-rest_first / first.next_d);
            b.push(-rest_second / second.next_b);
        }
        (b, d)
    };
    let (bu, du) = propagate(1.0, 0.0);
    let (bv, dv) = propagate(0.0, 1.0);
    // λ b_n + d_n = 0, linear in b0
    let slope = kin.lambda * bu[n] + du[n];
    let offset = kin.lambda * bv[n] + dv[n];
    let b0 = if slope != 0.0 { -offset / slope } else { 0.0 };
    let b: Vec<f64> = bu.iter().zip(&bv).map(|(u, v)| b0 * u + v).collect();
    let d: Vec<f64> = du.iter().zip(&dv).map(|(u, v)| b0 * u + v).collect();

    let [first, second] = rows_at(&kin, za, k, dl, n);
    let rest_first = first.prev_b * b[n - 1] + first.prev_d * d[n - 1] + first.b * b[n] + first.d * d[n];
    let rest_second = second.prev_b * b[n - 1] + second.prev_d * d[n - 1] + second.b * b[n] + second.d * d[n];
    let next_d = -rest_first / first.next_d;
    let next_b = -rest_second / second.next_b;
    let largest = b.iter().chain(&d).map(|c| c.abs()).fold(0.0, f64::max);
    let relative_next = next_b.abs().max(next_d.abs()) / largest;

    let tail = |x: f64, y: f64| {
        let scale = x.abs() + y.abs();
        if scale == 0.0 { 0.0 } else { (x + y) / scale }
    };
    let tail_residuals = [
        tail(-kin.minus * b[n], -kin.a * d[n]),
        tail(kin.a * b[n], kin.plus * d[n]),
    ];
    let quantization_residual = residual_at(&kin, za, k, dl, n);
    let consistent = relative_next <= CONSISTENCY_TOLERANCE
        && tail_residuals.iter().all(|r| r.abs() <= CONSISTENCY_TOLERANCE);

    let sigma = indicial_exponent(delta, b[0], d[0])?;
    Ok(ExactSeries {
        qn: *qn,
        energy: *energy,
        delta,
        b,
        d,
        sigma,
        a: kin.a,
        scales: derive_scales(constants, qn, energy)?,
        consistency: ConsistencyReport {
            next_b,
            next_d,
            relative_next,
            tail_residuals,
            quantization_residual,
            consistent,
        },
    })
}

/// Coefficients at the finite-nucleus level of `qn`; `energy` must match
/// [`energy_exact`] to 1e-10 relative.
pub fn coefficients_exact(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    delta: BoundaryRadius,
) -> Result<ExactSeries> {
    let reference = energy_exact(constants, qn.z, qn.n_r)?;
    if !energy.is_real_bound()
        || (energy.epsilon() - reference.epsilon()).abs() > 1e-10 * reference.epsilon()
    {
        return domain(format!(
            "{qn}: energy {} is not the finite-nucleus level {}",
            energy.value,
            reference.epsilon()
        ));
    }
    build_exact_series(constants, qn, energy, delta)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl ExactSeries {
    /// `e^{−aξ}/(ξ+δ) Σ_{ν≥0} c_ν ξ^ν` for both coefficient lists.
    pub fn components(&self, xi: f64) -> (f64, f64) {
        let w = (-self.a * xi).exp() / (xi + self.delta.value());
        (w * horner(&self.b, xi), w * horner(&self.d, xi))
    }

    pub fn density(&self, xi: f64) -> f64 {
        let (f, g) = self.components(xi);
        f * f + g * g
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.b.iter_mut().chain(out.d.iter_mut()).for_each(|c| *c *= factor);
        out
    }

    /// ∫_δ^∞ ρ r² dr = ∫_0^∞ e^{−2aξ} (f² + g²) dξ, with its error estimate.
    pub fn norm_integral(&self, rel_tol: f64) -> Result<(f64, f64)> {
        let a = self.a;
        let r = integrate_to_infinity(
            |xi| {
                let w = (-a * xi).exp();
                let (f, g) = (w * horner(&self.b, xi), w * horner(&self.d, xi));
                f * f + g * g
            },
            0.0,
            1.0 / a,
            rel_tol,
        )?;
        Ok((r.value, r.error))
    }
}

fn check_xi(xi_grid: &[f64]) -> Result<()> {
    match xi_grid.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        Some(x) => domain(format!("ξ must be finite and non-negative (outside the nucleus), got {x}")),
        None => Ok(()),
    }
}

pub fn wavefunction_exact(series: &ExactSeries, xi_grid: &[f64]) -> Result<RadialProfile> {
    check_xi(xi_grid)?;
    let (component_1, component_2) = xi_grid.iter().map(|&x| series.components(x)).unzip();
    Ok(RadialProfile {
        model: ModelTag::Exact,
        qn: series.qn,
        energy: series.energy,
        grid: xi_grid.to_vec(),
        component_1,
        component_2,
        density: None,
    })
}

pub fn density_exact(series: &ExactSeries, xi_grid: &[f64]) -> Result<RadialProfile> {
    Ok(wavefunction_exact(series, xi_grid)?.with_density())
}

/// Rescales the coefficients so that ∫_δ^∞ ρ r² dr = 1.
pub fn normalize_exact(series: &ExactSeries, tolerance: f64) -> Result<(ExactSeries, NormalizationReport)> {
    let (before, _) = series.norm_integral(tolerance * 1e-2)?;
    if !(before > 0.0 && before.is_finite()) {
        return domain(format!("norm integral {before} is not positive"));
    }
    let scale = before.sqrt().recip();
    let out = series.scaled(scale);
    let (after, error) = out.norm_integral(tolerance * 1e-2)?;
    if error >= tolerance || (after - 1.0).abs() >= tolerance {
        return Err(DiracError::QuadratureFailure { estimate: error.max((after - 1.0).abs()), tolerance });
    }
    Ok((out, NormalizationReport { integral_before: before, integral_after: after, error_estimate: error, scale }))
}
