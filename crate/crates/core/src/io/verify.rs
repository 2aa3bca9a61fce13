//! Invariant suites behind the `verify` command.
//!
//! Every check ends as `pass`, `fail` or `finding`. Findings record audit
//! outcomes whose value is not asserted (the ladder nullity, for one) and
//! never count as failures.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::RunConfig;
use super::table::Table;
use crate::comparison::{alpha_expansion_check, dirac_states, Model};
use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};
use crate::exact::{energy_exact, quantization_root, BoundaryRadius};
use crate::ladder::{assemble_ladder, nullspace_report, probe_zero_radial, NullspaceReport};
use crate::levels::{Classification, EnergyLevel, QuantumNumbers};
use crate::standard::{coefficients_standard, density_loglog_slope, divergence_diagnostic, energy_dirac};

/// Tail-block singular value ratio below which the two tail rows count as
/// linearly dependent.
pub const TAIL_RATIO_TOLERANCE: f64 = 1e-12;
/// Absolute tolerance on the fitted (Zα)⁴ coefficient.
pub const NEXT_ORDER_TOLERANCE: f64 = 1e-4;
/// Relative tolerance on the measured density slope near the origin.
pub const SLOPE_TOLERANCE: f64 = 1e-2;
/// Relative binding-energy offset of the comparison points in the ladder
/// residual check.
pub const LADDER_PERTURBATION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Quantization,
    Ladder,
    Expansion,
    Divergence,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Quantization, Suite::Ladder, Suite::Expansion, Suite::Divergence];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Quantization => "quantization",
            Suite::Ladder => "ladder",
            Suite::Expansion => "expansion",
            Suite::Divergence => "divergence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Finding,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Finding => "finding",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok { Status::Pass } else { Status::Fail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub z: u32,
    pub k: Option<i32>,
    pub n_r: Option<u32>,
    pub status: Status,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub detail: String,
}

/// Inclusive range of radial (or, for the expansion suite, principal)
/// quantum numbers, written `lo:hi` or `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NrRange {
    pub lo: u32,
    pub hi: u32,
}

impl Default for NrRange {
    fn default() -> Self {
        Self { lo: 1, hi: 3 }
    }
}

impl FromStr for NrRange {
    type Err = DiracError;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| v.trim().parse::<u32>().map_err(|_| DiracError::Domain(format!("bad n_r bound {v:?}")));
        let (lo, hi) = match s.split_once(':') {
            Some((lo, hi)) => (parse(lo)?, parse(hi)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo == 0 || lo > hi {
            return domain(format!("n_r range {s:?} must satisfy 1 <= lo <= hi"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for NrRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<Suite>,
    pub z: u32,
    pub nr_range: NrRange,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn table(&self, config: &RunConfig) -> Table {
        let mut t = Table::new(["suite", "check", "z", "k", "n_r", "status", "value", "reference", "detail"]);
        t.meta("command", "verify").run_metadata(config);
        t.meta("suites", self.suites.iter().map(Suite::as_str).collect::<Vec<_>>().join(" "))
            .meta("z", self.z)
            .meta("nr_range", self.nr_range.to_string())
            .meta("passed", self.count(Status::Pass))
            .meta("failed", self.count(Status::Fail))
            .meta("findings", self.count(Status::Finding));
        for c in &self.checks {
            t.push(vec![
                c.suite.as_str().into(),
                c.name.as_str().into(),
                c.z.into(),
                c.k.into(),
                c.n_r.into(),
                c.status.as_str().into(),
                c.value.into(),
                c.reference.into(),
                c.detail.as_str().into(),
            ]);
        }
        t
    }
}

struct Recorder {
    suite: Suite,
    z: u32,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, qn: Option<&QuantumNumbers>, name: &str, status: Status, value: Option<f64>, reference: Option<f64>, detail: String) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            z: self.z,
            k: qn.map(|q| q.k),
            n_r: qn.map(|q| q.n_r),
            status,
            value,
            reference,
            detail,
        });
    }

    fn error(&mut self, qn: Option<&QuantumNumbers>, name: &str, e: DiracError) {
        self.push(qn, name, Status::Fail, None, None, e.to_string());
    }
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { (a - b).abs() / b.abs() }
}

pub fn run_verify(config: &RunConfig, suites: &[Suite], z: u32, nr_range: NrRange) -> Result<VerifyReport> {
    if z == 0 {
        return domain("nuclear charge Z must be positive");
    }
    let mut checks = Vec::new();
    for &suite in suites {
        let mut rec = Recorder { suite, z, checks: Vec::new() };
        match suite {
            Suite::Quantization => quantization_suite(config, &mut rec, nr_range),
            Suite::Ladder => ladder_suite(config, &mut rec, nr_range),
            Suite::Expansion => expansion_suite(config, &mut rec, nr_range),
            Suite::Divergence => divergence_suite(config, &mut rec),
        }
        checks.extend(rec.checks);
    }
    Ok(VerifyReport { suites: suites.to_vec(), z, nr_range, checks })
}

fn quantization_suite(config: &RunConfig, rec: &mut Recorder, range: NrRange) {
    let c = &config.constants;
    let tol = config.tolerances.agreement;
    for n_r in range.lo..=range.hi {
        let qn = QuantumNumbers::new(rec.z, 1, n_r).expect("z and K validated");
        let closed = match energy_exact(c, rec.z, n_r) {
            Ok(e) => e,
            Err(e) => return rec.error(Some(&qn), "root_matches_closed_form", e),
        };
        match quantization_root(c, &qn, config.delta) {
            Ok(root) => {
                let rel = relative(root.epsilon(), closed.epsilon());
                let ok = rel <= tol && root.is_real_bound();
                let detail = format!("relative difference in epsilon {rel:.3e}, classification {}", root.classification.as_str());
                rec.push(Some(&qn), "root_matches_closed_form", Status::from_bool(ok), Some(root.epsilon()), Some(closed.epsilon()), detail);
                let wide = BoundaryRadius::new(config.delta.value() * 10.0).expect("positive");
                match quantization_root(c, &qn, wide) {
                    Ok(other) => {
                        let rel = relative(other.epsilon(), root.epsilon());
                        let detail = format!("delta {:e} vs {:e}: relative difference {rel:.3e}", config.delta.value(), wide.value());
                        rec.push(Some(&qn), "root_independent_of_delta", Status::from_bool(rel <= tol), Some(other.epsilon()), Some(root.epsilon()), detail);
                    }
                    Err(e) => rec.error(Some(&qn), "root_independent_of_delta", e),
                }
            }
            Err(e) => rec.error(Some(&qn), "root_matches_closed_form", e),
        }
    }
}

fn ladder_at(c: &PhysicalConstants, qn: &QuantumNumbers, energy: &EnergyLevel, delta: BoundaryRadius, tol: f64) -> Result<NullspaceReport> {
    Ok(nullspace_report(&assemble_ladder(c, qn, energy, delta)?, tol))
}

/// Whether the smallest singular value at `energy` is strictly below its
/// value at binding energies scaled by 1 ± [`LADDER_PERTURBATION`].
fn residual_minimum(c: &PhysicalConstants, qn: &QuantumNumbers, energy: &EnergyLevel, delta: BoundaryRadius, tol: f64) -> Result<(bool, f64, f64)> {
    let at = |e: &EnergyLevel| ladder_at(c, qn, e, delta, tol).map(|r| r.best_residual);
    let centre = at(energy)?;
    let beta = energy.binding.re;
    let lower = at(&EnergyLevel::from_binding(beta * (1.0 - LADDER_PERTURBATION)))?;
    let upper = at(&EnergyLevel::from_binding(beta * (1.0 + LADDER_PERTURBATION)))?;
    let neighbour = lower.min(upper);
    Ok((centre < neighbour, centre, neighbour))
}

fn ladder_suite(config: &RunConfig, rec: &mut Recorder, range: NrRange) {
    let c = &config.constants;
    let tol = config.tolerances.singular_value;
    // degree-zero polynomials: scan binding fractions 1e-9..0.9
    let grid: Vec<EnergyLevel> = (0..400)
        .map(|i| EnergyLevel::from_binding(0.9 * 10f64.powf(-9.0 + 9.0 * i as f64 / 399.0)))
        .collect();
    for k in [1, -1] {
        let qn = QuantumNumbers::new(rec.z, k, 0).expect("z and K validated");
        match probe_zero_radial(c, rec.z, k, config.delta, &grid) {
            Ok(Some((eps, ratio))) => rec.push(
                Some(&qn),
                "zero_radial_probe",
                Status::Finding,
                Some(ratio),
                Some(eps),
                "smallest relative singular value of the n_r = 0 system over the scan; reference is its epsilon".into(),
            ),
            Ok(None) => {}
            Err(e) => rec.push(Some(&qn), "zero_radial_probe", Status::Finding, None, None, e.to_string()),
        }
    }
    for n_r in range.lo..=range.hi {
        let energy = match energy_exact(c, rec.z, n_r) {
            Ok(e) => e,
            Err(e) => return rec.error(None, "ladder", e),
        };
        let k = n_r as i32;
        let qn = QuantumNumbers::new(rec.z, k, n_r).expect("z and K validated");
        let system = match assemble_ladder(c, &qn, &energy, config.delta) {
            Ok(s) => s,
            Err(e) => {
                rec.error(Some(&qn), "ladder", e);
                continue;
            }
        };
        let ratio = system.tail_singular_ratio();
        rec.push(
            Some(&qn),
            "tail_rows_rank_one",
            Status::from_bool(ratio < TAIL_RATIO_TOLERANCE),
            Some(ratio),
            Some(TAIL_RATIO_TOLERANCE),
            "singular value ratio of the two tail rows".into(),
        );
        let report = nullspace_report(&system, tol);
        let again = nullspace_report(&system, tol);
        let same = serde_json::to_string(&report).ok() == serde_json::to_string(&again).ok();
        rec.push(Some(&qn), "report_deterministic", Status::from_bool(same), None, None, "serialized reports compared byte for byte".into());
        rec.push(
            Some(&qn),
            "nullity",
            Status::Finding,
            Some(report.nullity as f64),
            Some(report.cols as f64),
            format!("rank {} of {} columns at relative threshold {:e}", report.rank, report.cols, tol),
        );
        rec.push(
            Some(&qn),
            "smallest_singular_value",
            Status::Finding,
            Some(report.best_residual),
            report.singular_values.first().copied(),
            "reference is the largest singular value".into(),
        );
        match residual_minimum(c, &qn, &energy, config.delta, tol) {
            Ok((ok, centre, neighbour)) => rec.push(
                Some(&qn),
                "residual_minimum_at_level",
                Status::from_bool(ok),
                Some(centre),
                Some(neighbour),
                format!("reference is the smaller residual at binding energy scaled by 1 +/- {LADDER_PERTURBATION}"),
            ),
            Err(e) => rec.error(Some(&qn), "residual_minimum_at_level", e),
        }
        // the minimum is only reliable when K = n_r; other K are reported
        for other in [-k, 1] {
            if other == k {
                continue;
            }
            let q = QuantumNumbers::new(rec.z, other, n_r).expect("z and K validated");
            match residual_minimum(c, &q, &energy, config.delta, tol) {
                Ok((ok, centre, neighbour)) => rec.push(
                    Some(&q),
                    "residual_minimum_at_level",
                    Status::Finding,
                    Some(centre),
                    Some(neighbour),
                    format!("strict minimum: {ok}"),
                ),
                Err(e) => rec.push(Some(&q), "residual_minimum_at_level", Status::Finding, None, None, e.to_string()),
            }
        }
    }
}

/// Leading-order coefficient expected of the (Zα)⁴ term.
fn expected_next_order(model: Model, n: u32, k_abs: u32) -> f64 {
    let n4 = (n as f64).powi(4);
    match model {
        Model::Bohr => 0.0,
        Model::Dirac => (n as f64 / k_abs as f64 - 0.75) / (2.0 * n4),
        Model::Exact => -3.0 / (8.0 * n4),
    }
}

fn expansion_suite(config: &RunConfig, rec: &mut Recorder, range: NrRange) {
    let c = &config.constants;
    let tol = config.tolerances.expansion;
    for n in range.lo..=range.hi {
        let mut states: Vec<(Model, QuantumNumbers)> = vec![(Model::Bohr, QuantumNumbers::new(rec.z, 1, n).expect("valid"))];
        for (n_r, k) in dirac_states(n).into_iter().filter(|(n_r, k)| n_r + k.unsigned_abs() == n) {
            states.push((Model::Dirac, QuantumNumbers::new(rec.z, k, n_r).expect("valid")));
        }
        states.push((Model::Exact, QuantumNumbers::new(rec.z, 1, n).expect("valid")));
        let mut dirac_c4 = Vec::new();
        for (model, qn) in states {
            let label = |s: &str| format!("{model}_{s}");
            let qn_cell = (model != Model::Bohr).then_some(&qn);
            match alpha_expansion_check(c, model, &qn) {
                Ok(r) => {
                    let d2 = (r.leading_coefficient - r.expected_leading).abs();
                    rec.push(
                        qn_cell,
                        &label("leading_coefficient"),
                        Status::from_bool(d2 <= tol),
                        Some(r.leading_coefficient),
                        Some(r.expected_leading),
                        format!("principal n {n}, fit residual {:.3e}", r.fit_residual),
                    );
                    let expected = expected_next_order(model, n, qn.k_abs());
                    let d4 = (r.next_order_coefficient - expected).abs();
                    rec.push(
                        qn_cell,
                        &label("next_order_coefficient"),
                        Status::from_bool(d4 <= NEXT_ORDER_TOLERANCE),
                        Some(r.next_order_coefficient),
                        Some(expected),
                        format!("principal n {n}"),
                    );
                    if model == Model::Dirac {
                        dirac_c4.push((qn.k_abs(), r.next_order_coefficient));
                    }
                }
                Err(e) => rec.error(qn_cell, &label("leading_coefficient"), e),
            }
        }
        // fine structure: the next-order term separates different |K|
        let distinct = |a: &(u32, f64), b: &(u32, f64)| a.0 != b.0;
        let pairs: Vec<_> = dirac_c4
            .iter()
            .flat_map(|a| dirac_c4.iter().filter(move |b| distinct(a, b)).map(move |b| (a.1 - b.1).abs()))
            .collect();
        if let Some(spread) = pairs.iter().copied().reduce(f64::min) {
            rec.push(
                None,
                "dirac_next_order_depends_on_k",
                Status::from_bool(spread > NEXT_ORDER_TOLERANCE),
                Some(spread),
                Some(NEXT_ORDER_TOLERANCE),
                format!("principal n {n}: smallest difference between distinct |K|"),
            );
        }
        let exact: Result<Vec<f64>> = [1, -1, 2, -2]
            .iter()
            .map(|&k| {
                let qn = QuantumNumbers::new(rec.z, k, n)?;
                alpha_expansion_check(c, Model::Exact, &qn).map(|r| r.next_order_coefficient)
            })
            .collect();
        match exact {
            Ok(v) => {
                let same = v.iter().all(|x| x.to_bits() == v[0].to_bits());
                rec.push(
                    None,
                    "exact_next_order_independent_of_k",
                    Status::from_bool(same),
                    Some(v[0]),
                    None,
                    format!("principal n {n}: K in 1 -1 2 -2 compared bitwise"),
                );
            }
            Err(e) => rec.error(None, "exact_next_order_independent_of_k", e),
        }
    }
}

fn divergence_suite(config: &RunConfig, rec: &mut Recorder) {
    let c = &config.constants;
    for (k, n_r) in [(1, 0), (-1, 1), (2, 0)] {
        let qn = QuantumNumbers::new(rec.z, k, n_r).expect("z and K validated");
        let d = divergence_diagnostic(c, &qn);
        rec.push(
            Some(&qn),
            "density_exponent",
            Status::Finding,
            Some(d.density_exponent),
            None,
            format!("gamma = {} + {}i, divergent at origin: {}", d.gamma.re, d.gamma.im, d.divergent_at_origin),
        );
        rec.push(
            Some(&qn),
            "virtual_threshold_z",
            Status::Finding,
            Some(d.virtual_threshold_z as f64),
            None,
            "largest Z with real gamma".into(),
        );
        if n_r != 0 {
            continue;
        }
        // a single power survives when n_r = 0, so the log-log slope is exact
        let slope = energy_dirac(c, &qn)
            .and_then(|e| if e.is_real_bound() { Ok(e) } else { domain(format!("{qn}: level is {}", e.classification.as_str())) })
            .and_then(|e| coefficients_standard(c, &qn, &e))
            .and_then(|s| density_loglog_slope(&s, 1e-8, 1e-6, 101));
        match slope {
            Ok(m) => {
                let rel = relative(m, d.density_exponent);
                rec.push(
                    Some(&qn),
                    "density_slope_matches_exponent",
                    Status::from_bool(rel <= SLOPE_TOLERANCE),
                    Some(m),
                    Some(d.density_exponent),
                    format!("log-log slope over ar in [1e-8, 1e-6], relative difference {rel:.3e}"),
                );
            }
            Err(e) => rec.push(Some(&qn), "density_slope_matches_exponent", Status::Finding, None, Some(d.density_exponent), e.to_string()),
        }
    }
    // onset of complex energies for |K| = 1
    let qn = QuantumNumbers::new(rec.z, 1, 0).expect("valid");
    let threshold = divergence_diagnostic(c, &qn).virtual_threshold_z;
    let class = |z: u32| energy_dirac(c, &QuantumNumbers::new(z, 1, 0).expect("valid")).map(|e| e.classification);
    let ok = threshold >= 1
        && matches!(class(threshold), Ok(Classification::RealBound))
        && matches!(class(threshold + 1), Ok(Classification::Virtual));
    rec.push(
        Some(&qn),
        "virtual_onset",
        Status::from_bool(ok),
        Some(threshold as f64),
        Some((1.0 / c.alpha).floor()),
        format!("real at Z = {threshold}, virtual at Z = {}", threshold + 1),
    );
}
