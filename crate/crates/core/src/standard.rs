//! Point-nucleus (rough boundary) solution of the radial Dirac-Coulomb problem.
//!
//! The recursion for the series coefficients is derived directly from the
//! radial system
//!
//! ```text
//! ((ε − 1) + Zα/r) F + (K/r + d/dr) G = 0
//! ((ε + 1) + Zα/r) G + (K/r − d/dr) F = 0
//! ```
//!
//! with `F = r R₁`, `G = r R₂` and `R = e^{−ar} Σ (b_ν, d_ν) (ar)^{γ+ν−1}`.
//! Writing `x = ar` and using `(1 − ε)/a = λ`, `(1 + ε)/a = 1/λ`, the
//! coefficient of `x^{γ+ν} e^{−x}` in each equation gives
//!
//! ```text
//! λ b_{ν−1} +     d_{ν−1} − Zα b_ν − (K + γ + ν) d_ν = 0
//!   b_{ν−1} + 1/λ d_{ν−1} + (K − γ − ν) b_ν + Zα d_ν = 0
//! ```
//!
//! The commonly printed form of this pair has `λ` and `1/λ` exchanged. Both
//! are available through [`RecursionForm`]; only the derived one terminates
//! at the Dirac energies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};
use crate::levels::{derive_scales, gamma, EnergyLevel, QuantumNumbers, RealScales};
use crate::profile::{ModelTag, NormalizationReport, RadialProfile};
use crate::quadrature::integrate_to_infinity;

/// Relative disagreement allowed between the two ν = 0 relations.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;
/// Relative size of the (n_r + 1)-th coefficient pair below which the
/// series counts as terminated.
pub const TERMINATION_TOLERANCE: f64 = 1e-9;

/// Dirac energy for a point nucleus,
/// ε = [1 + Z²α²/(n_r + γ)²]^(-1/2), evaluated with complex γ when Zα > |K|.
pub fn energy_dirac(constants: &PhysicalConstants, qn: &QuantumNumbers) -> Result<EnergyLevel> {
    let za = qn.z_alpha(constants);
    let g = gamma(constants, qn);
    let denom = Complex64::new(qn.n_r as f64, 0.0) + g;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(DiracError::SingularEnergy(format!(
            "n_r + γ = 0 for {qn} (Zα = |K| with n_r = 0)"
        )));
    }
    let x = Complex64::new(za * za, 0.0) / (denom * denom);
    Ok(EnergyLevel::inverse_sqrt_one_plus(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionForm {
    /// Re-derived from the radial system (module docs).
    Derived,
    /// The printed variant with λ and 1/λ exchanged.
    Printed,
}

/// The coefficient pair one order past the polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub next_b: f64,
    pub next_d: f64,
    /// `(|b_{n_r+1}| + |d_{n_r+1}|) / max_ν (|b_ν| + |d_ν|)`.
    pub relative: f64,
    pub terminates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardSeries {
    pub qn: QuantumNumbers,
    pub energy: EnergyLevel,
    pub form: RecursionForm,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
    /// Leading power γ − 1 of `ar`.
    pub exponent: f64,
    pub scales: RealScales,
    pub tail: TailCheck,
}

/// Runs the recursion at an arbitrary real energy, normalised by d₀ = 1.
///
/// Non-termination is reported in [`StandardSeries::tail`], not raised.
pub fn build_standard_series(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
    form: RecursionForm,
) -> Result<StandardSeries> {
    let scales = derive_scales(constants, qn, energy)?;
    let scales = match scales.real() {
        Some(s) if s.gamma > 0.0 && s.a > 0.0 => s,
        _ => return domain(format!("{qn}: series needs real γ > 0 and a real bound energy")),
    };
    let za = qn.z_alpha(constants);
    let k = qn.k as f64;
    let g = scales.gamma;
    let (lam_b, inv_lam_d) = match form {
        RecursionForm::Derived => (scales.lambda, 1.0 / scales.lambda),
        RecursionForm::Printed => (1.0 / scales.lambda, scales.lambda),
    };

    let b0 = leading_ratio(k, g, za)?;

    let n = qn.n_r as usize;
    let mut b = Vec::with_capacity(n + 2);
    let mut d = Vec::with_capacity(n + 2);
    b.push(b0);
    d.push(1.0);
    for nu in 1..=n + 1 {
        let nu_f = nu as f64;
        let (bp, dp) = (b[nu - 1], d[nu - 1]);
        // [ -Zα        -(K+γ+ν) ] [b_ν]   [ -(λ b' + d')     ]
        // [ K-γ-ν        Zα     ] [d_ν] = [ -(b' + d'/λ)     ]
        let m11 = -za;
        let m12 = -(k + g + nu_f);
        let m21 = k - g - nu_f;
        let m22 = za;
        let r1 = -(lam_b * bp + dp);
        let r2 = -(bp + inv_lam_d * dp);
        let det = m11 * m22 - m12 * m21;
        b.push((r1 * m22 - m12 * r2) / det);
        d.push((m11 * r2 - m21 * r1) / det);
    }
    let next_b = b.pop().unwrap_or(0.0);
    let next_d = d.pop().unwrap_or(0.0);
    let largest = b.iter().zip(&d).map(|(x, y)| x.abs() + y.abs()).fold(0.0, f64::max);
    let relative = (next_b.abs() + next_d.abs()) / largest;
    Ok(StandardSeries {
        qn: *qn,
        energy: *energy,
        form,
        b,
        d,
        exponent: g - 1.0,
        scales,
        tail: TailCheck { next_b, next_d, relative, terminates: relative <= TERMINATION_TOLERANCE },
    })
}

/// b₀/d₀ from the ν = 0 pair, which must agree: `−(K+γ)/Zα = −Zα/(K−γ)`.
pub fn leading_ratio(k: f64, gamma: f64, z_alpha: f64) -> Result<f64> {
    let first = -(k + gamma) / z_alpha;
    let second = -z_alpha / (k - gamma);
    if !((first - second).abs() <= CONSISTENCY_TOLERANCE * first.abs().max(second.abs())) {
        return Err(DiracError::RecursionInconsistent { order: 0, first, second });
    }
    Ok(first)
}

/// Coefficients at the Dirac energy of `qn`.
///
/// `energy` must be a real bound level within 1e-10 (relative) of
/// [`energy_dirac`].
pub fn coefficients_standard(
    constants: &PhysicalConstants,
    qn: &QuantumNumbers,
    energy: &EnergyLevel,
) -> Result<StandardSeries> {
    if !energy.is_real_bound() {
        return domain(format!("{qn}: energy {} is not a real bound level", energy.value));
    }
    let reference = energy_dirac(constants, qn)?;
    if (energy.epsilon() - reference.epsilon()).abs() > 1e-10 * reference.epsilon().abs() {
        return domain(format!(
            "{qn}: energy {} differs from the Dirac level {}",
            energy.epsilon(),
            reference.epsilon()
        ));
    }
    build_standard_series(constants, qn, energy, RecursionForm::Derived)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl StandardSeries {
    /// Both components `e^{−ar} Σ c_ν (ar)^{γ+ν−1}` at radius `r > 0`.
    pub fn components(&self, r: f64) -> (f64, f64) {
        let x = self.scales.a * r;
        let weight = x.powf(self.exponent) * (-x).exp();
        (weight * horner(&self.b, x), weight * horner(&self.d, x))
    }

    pub fn density(&self, r: f64) -> f64 {
        let (f, g) = self.components(r);
        f * f + g * g
    }

    /// Copy with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.b.iter_mut().chain(out.d.iter_mut()).for_each(|c| *c *= factor);
        out
    }

    /// ∫_0^∞ ρ(r) r² dr by quadrature in `x = ar`.
    pub fn norm_integral(&self, rel_tol: f64) -> Result<(f64, f64)> {
        let a = self.scales.a;
        let a3 = a * a * a;
        let r = integrate_to_infinity(
            |x| {
                let w = x.powf(self.exponent + 1.0) * (-x).exp();
                let (f, g) = (w * horner(&self.b, x), w * horner(&self.d, x));
                (f * f + g * g) / a3
            },
            0.0,
            1.0,
            rel_tol,
        )?;
        Ok((r.value, r.error))
    }
}

fn check_radii(r_grid: &[f64]) -> Result<()> {
    match r_grid.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        Some(r) => domain(format!("point-nucleus profile needs r > 0, got {r}")),
        None => Ok(()),
    }
}

pub fn wavefunction_standard(series: &StandardSeries, r_grid: &[f64]) -> Result<RadialProfile> {
    check_radii(r_grid)?;
    let (component_1, component_2) = r_grid.iter().map(|&r| series.components(r)).unzip();
    Ok(RadialProfile {
        model: ModelTag::Standard,
        qn: series.qn,
        energy: series.energy,
        grid: r_grid.to_vec(),
        component_1,
        component_2,
        density: None,
    })
}

pub fn density_standard(series: &StandardSeries, r_grid: &[f64]) -> Result<RadialProfile> {
    Ok(wavefunction_standard(series, r_grid)?.with_density())
}

/// Rescales the series so that ∫_0^∞ ρ r² dr = 1.
pub fn normalize_standard(series: &StandardSeries, tolerance: f64) -> Result<(StandardSeries, NormalizationReport)> {
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub qn: QuantumNumbers,
    pub gamma: Complex64,
    /// Re γ − 1, the power of `ar` leading the wavefunction at the origin.
    pub leading_exponent: f64,
    /// 2 (Re γ − 1), the corresponding power in the density.
    pub density_exponent: f64,
    pub divergent_at_origin: bool,
    /// floor(|K|/α): largest Z with real γ.
    pub virtual_threshold_z: u32,
}

pub fn divergence_diagnostic(constants: &PhysicalConstants, qn: &QuantumNumbers) -> DivergenceReport {
    let g = gamma(constants, qn);
    DivergenceReport {
        qn: *qn,
        gamma: g,
        leading_exponent: g.re - 1.0,
        density_exponent: 2.0 * (g.re - 1.0),
        divergent_at_origin: g.re < 1.0,
        virtual_threshold_z: (qn.k_abs() as f64 / constants.alpha).floor() as u32,
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}

/// Log-log slope of the density over `ar ∈ [ar_min, ar_max]` sampled at
/// `points` logarithmically spaced radii.
pub fn density_loglog_slope(series: &StandardSeries, ar_min: f64, ar_max: f64, points: usize) -> Result<f64> {
    if !(ar_min > 0.0 && ar_max > ar_min) || points < 2 {
        return domain("slope fit needs 0 < ar_min < ar_max and at least two points");
    }
    let step = (ar_max / ar_min).ln() / (points - 1) as f64;
    let ln_x: Vec<f64> = (0..points).map(|i| ar_min.ln() + step * i as f64).collect();
    let ln_rho: Vec<f64> = ln_x
        .iter()
        .map(|lx| series.density(lx.exp() / series.scales.a).ln())
        .collect();
    Ok(least_squares_slope(&ln_x, &ln_rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::Classification;

    fn c() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    fn qn(z: u32, k: i32, n_r: u32) -> QuantumNumbers {
        QuantumNumbers::new(z, k, n_r).unwrap()
    }

    fn series(z: u32, k: i32, n_r: u32) -> StandardSeries {
        let q = qn(z, k, n_r);
        coefficients_standard(&c(), &q, &energy_dirac(&c(), &q).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_energy_closed_form() {
        let alpha = c().alpha;
        let e = energy_dirac(&c(), &qn(1, -1, 0)).unwrap();
        let expected = (1.0 - alpha * alpha).sqrt();
        assert!((e.epsilon() - expected).abs() <= 1e-15);
        assert!((e.epsilon() - 0.999_973_374).abs() < 1e-9);
        assert_eq!(e.classification, Classification::RealBound);
    }

    #[test]
    fn virtual_past_critical_charge() {
        for k in [1, -1] {
            let e = energy_dirac(&c(), &qn(138, k, 0)).unwrap();
            assert_eq!(e.classification, Classification::Virtual);
            assert!(e.value.im != 0.0);
        }
    }

    #[test]
    fn large_radial_number_approaches_rest_energy() {
        let e = energy_dirac(&c(), &qn(1, 1, 1_000_000)).unwrap();
        assert!((1.0 - e.epsilon()).abs() < 1e-11);
        assert!(e.is_real_bound());
    }

    #[test]
    fn critical_coupling_is_singular() {
        // Z α = |K| exactly: choose α = 1/2 with Z = 2, K = 1.
        let c = PhysicalConstants::new(0.5, 1.0, 1.0).unwrap();
        let err = energy_dirac(&c, &qn(2, 1, 0)).unwrap_err();
        assert!(matches!(err, DiracError::SingularEnergy(_)));
        assert!(energy_dirac(&c, &qn(2, 1, 1)).unwrap().is_real_bound());
    }

    #[test]
    fn ground_coefficient_ratios() {
        let alpha = c().alpha;
        let g = (1.0 - alpha * alpha).sqrt();
        let s = series(1, 1, 0);
        let oracle = -(1.0 + g) / alpha;
        assert!((s.b[0] / s.d[0] - oracle).abs() <= 1e-12 * oracle.abs());
        assert!((s.b[0] + 274.07).abs() < 0.01);

        // K = -1 ratio from the ν = 0 relation alone.
        let q = qn(1, -1, 0);
        let s = build_standard_series(&c(), &q, &energy_dirac(&c(), &q).unwrap(), RecursionForm::Derived).unwrap();
        let oracle = (1.0 - g) / alpha;
        assert!((s.b[0] - oracle).abs() <= 1e-9 * oracle);
        assert!((s.b[0] - 3.6487e-3).abs() < 1e-7);
    }

    #[test]
    fn negative_k_ground_state_does_not_terminate() {
        let q = qn(1, -1, 0);
        let s = build_standard_series(&c(), &q, &energy_dirac(&c(), &q).unwrap(), RecursionForm::Derived).unwrap();
        assert!(!s.tail.terminates);
    }

    #[test]
    fn termination_at_dirac_energy_only() {
        for z in [1, 10, 50, 92] {
            for k in [1, -1, 2, -2, 3, -3] {
                for n_r in 0..4 {
                    if n_r == 0 && k < 0 {
                        continue;
                    }
                    let q = qn(z, k, n_r);
                    let e = energy_dirac(&c(), &q).unwrap();
                    let s = build_standard_series(&c(), &q, &e, RecursionForm::Derived).unwrap();
                    assert!(s.tail.terminates, "{q}: tail {}", s.tail.relative);
                    let shifted = EnergyLevel::from_epsilon(e.epsilon() * (1.0 - 1e-4));
                    let p = build_standard_series(&c(), &q, &shifted, RecursionForm::Derived).unwrap();
                    assert!(!p.tail.terminates, "{q}: perturbed tail {}", p.tail.relative);
                }
            }
        }
    }

    #[test]
    fn printed_form_never_terminates() {
        for k in [1, -1, 2, -2] {
            for n_r in 0..3 {
                let q = qn(1, k, n_r);
                let e = energy_dirac(&c(), &q).unwrap();
                let s = build_standard_series(&c(), &q, &e, RecursionForm::Printed).unwrap();
                assert!(!s.tail.terminates, "{q}");
            }
        }
    }

    #[test]
    fn inconsistent_nu_zero_pair() {
        let za = c().alpha;
        assert!(leading_ratio(1.0, (1.0 - za * za).sqrt(), za).is_ok());
        let err = leading_ratio(1.0, 0.9, za).unwrap_err();
        assert!(matches!(err, DiracError::RecursionInconsistent { order: 0, .. }));
    }

    #[test]
    fn far_energy_reports_broken_tail() {
        let q = qn(1, 1, 1);
        let s = build_standard_series(&c(), &q, &EnergyLevel::from_epsilon(0.9), RecursionForm::Derived).unwrap();
        assert!(!s.tail.terminates);
        assert!(coefficients_standard(&c(), &q, &EnergyLevel::from_epsilon(0.9)).is_err());
    }

    #[test]
    fn wavefunction_limits() {
        let s = series(1, 1, 0);
        let a = s.scales.a;
        let (f, g) = s.components(50.0 / a);
        assert!(f.abs() < (-40.0f64).exp() && g.abs() < (-40.0f64).exp());
        let (f, g) = s.components(1.0 / a);
        assert!((f / g - s.b[0] / s.d[0]).abs() <= 1e-15 * (s.b[0] / s.d[0]).abs());
        let (f_small, _) = s.components(1e-8 / a);
        let (f_larger, _) = s.components(1e-6 / a);
        assert!(f_small.abs() > f_larger.abs());
    }

    #[test]
    fn nonpositive_radius_rejected() {
        let s = series(1, 1, 0);
        assert!(wavefunction_standard(&s, &[1.0, 0.0]).is_err());
        assert!(density_standard(&s, &[-1.0]).is_err());
    }

    #[test]
    fn density_slope_matches_exponent() {
        let alpha = c().alpha;
        let s = series(1, 1, 0);
        let slope = density_loglog_slope(&s, 1e-8, 1e-6, 101).unwrap();
        let expected = 2.0 * ((1.0 - alpha * alpha).sqrt() - 1.0);
        assert!((expected + 5.325e-5).abs() < 1e-8);
        assert!(((slope - expected) / expected).abs() < 0.01, "slope {slope} vs {expected}");
    }

    #[test]
    fn density_grows_toward_origin() {
        let s = series(1, 1, 0);
        let a = s.scales.a;
        let grid: Vec<f64> = (0..60).map(|i| 10f64.powf(-8.0 + i as f64 * 0.1) / a).collect();
        let p = density_standard(&s, &grid).unwrap();
        let rho = p.density.unwrap();
        assert!(rho.windows(2).all(|w| w[0] > w[1]));
        assert!(rho.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn divergence_examples() {
        let d = divergence_diagnostic(&c(), &qn(1, 1, 0));
        assert!(d.divergent_at_origin);
        assert_eq!(d.virtual_threshold_z, 137);
        let d = divergence_diagnostic(&c(), &qn(1, 2, 0));
        assert!(!d.divergent_at_origin);
        assert!(d.gamma.re > 1.0);
        assert_eq!(d.virtual_threshold_z, 274);
    }

    #[test]
    fn energy_increases_with_radial_number() {
        for k in [1, -1, 2, 3] {
            let levels: Vec<f64> = (0..8).map(|n| energy_dirac(&c(), &qn(80, k, n)).unwrap().epsilon()).collect();
            assert!(levels.windows(2).all(|w| w[0] < w[1]), "K={k}: {levels:?}");
        }
    }

    #[test]
    fn virtual_for_every_radial_number_past_threshold() {
        for z in [138, 150, 160] {
            for n_r in 0..6 {
                assert!(!energy_dirac(&c(), &qn(z, 1, n_r)).unwrap().is_real_bound());
            }
        }
    }

    #[test]
    fn nu_zero_consistency_over_range() {
        for z in 1..=100 {
            for k in [1, -1, 2, -2, 3, -3] {
                let q = qn(z, k, 0);
                let e = energy_dirac(&c(), &q).unwrap();
                assert!(build_standard_series(&c(), &q, &e, RecursionForm::Derived).is_ok(), "{q}");
            }
        }
    }

    // Lanczos (g = 7, n = 9) for the moment oracle.
    #[allow(clippy::excessive_precision)]
    fn gamma_fn(x: f64) -> f64 {
        const G: [f64; 9] = [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let x = x - 1.0;
        let t = x + 7.5;
        let sum = G.iter().enumerate().skip(1).fold(G[0], |acc, (i, g)| acc + g / (x + i as f64));
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
    }

    #[test]
    fn norm_integral_against_gamma_moments() {
        // single term: ∫ x^{2γ} e^{-2x} dx / a³ = Γ(2γ+1) / 2^{2γ+1} / a³
        let s = series(1, 1, 0);
        let g = s.scales.gamma;
        let a = s.scales.a;
        let oracle = (s.b[0].powi(2) + s.d[0].powi(2)) * gamma_fn(2.0 * g + 1.0)
            / 2f64.powf(2.0 * g + 1.0)
            / (a * a * a);
        let (value, error) = s.norm_integral(1e-12).unwrap();
        assert!(((value - oracle) / oracle).abs() < 1e-11, "{value} vs {oracle}");
        assert!(error < 1e-10 * value);
    }

    #[test]
    fn normalization_is_homogeneous() {
        let s = series(1, 1, 2);
        let (n, report) = normalize_standard(&s, 1e-10).unwrap();
        assert!((report.integral_after - 1.0).abs() < 1e-10);
        assert!(report.error_estimate < 1e-10);
        let n2 = normalize_standard(&s.scaled(2.0), 1e-10).unwrap().0;
        for (x, y) in n.b.iter().chain(&n.d).zip(n2.b.iter().chain(&n2.d)) {
            assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }
}
