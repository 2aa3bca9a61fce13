//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite intervals.

use crate::error::{DiracError, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive integration over `[lo, hi]`: the interval with the
/// largest error estimate is bisected until the total error meets
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    let mut intervals = vec![{
        let (v, e) = gk15(&f, lo, hi);
        (lo, hi, v, e)
    }];
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(DiracError::QuadratureFailure { estimate: f64::INFINITY, tolerance: abs_tol });
        }
        let tolerance = abs_tol.max(rel_tol * value.abs());
        if error <= tolerance {
            return Ok(QuadResult { value, error, evaluations });
        }
        if intervals.len() >= max_intervals {
            return Err(DiracError::QuadratureFailure { estimate: error, tolerance });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (a, b, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        evaluations += 30;
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
    }
}

/// Integrates an exponentially decaying integrand over `[lo, ∞)` panel by
/// panel, each panel `scale` wide. Panels stop once the geometric tail
/// estimate drops below `rel_tol` of the running total; the tail estimate is
/// added to the reported error.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_PANELS: usize = 100_000;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(DiracError::Domain(format!("panel scale must be positive, got {scale}")));
    }
    let mut total: f64 = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut previous: Option<f64> = None;
    for k in 0..MAX_PANELS {
        let a = lo + k as f64 * scale;
        let panel = integrate(&f, a, a + scale, rel_tol * 1e-2 * total.abs(), rel_tol * 1e-2, 2000)?;
        total += panel.value;
        error += panel.error;
        evaluations += panel.evaluations;
        if let Some(prev) = previous {
            let q = if prev != 0.0 { (panel.value / prev).abs() } else { 0.0 };
            if q < 1.0 {
                let tail = panel.value.abs() * q / (1.0 - q);
                if tail <= rel_tol * 1e-2 * total.abs() {
                    return Ok(QuadResult { value: total, error: error + tail, evaluations });
                }
            }
        }
        previous = Some(panel.value);
    }
    Err(DiracError::QuadratureFailure { estimate: f64::INFINITY, tolerance: rel_tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14, 1e-14, 100).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_finite_interval() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 0.0, 1000).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        // ∫ x^m e^{-x} dx = m!
        for (m, fact) in [(0, 1.0), (3, 6.0), (6, 720.0)] {
            let r = integrate_to_infinity(|x: f64| x.powi(m) * (-x).exp(), 0.0, 1.0, 1e-12).unwrap();
            assert!(((r.value - fact) / fact).abs() < 1e-12, "m={m} got {}", r.value);
            assert!(r.error < 1e-10 * fact);
        }
    }

    #[test]
    fn non_decaying_integrand_fails() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12, 50);
        assert!(matches!(r, Err(DiracError::QuadratureFailure { .. })));
    }
}
