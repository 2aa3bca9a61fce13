//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use diracbound::comparison::{alpha_expansion_check, bohr_energy, dirac_states, Model};
use diracbound::ladder::{assemble_ladder, nullspace_report, DEFAULT_SINGULAR_TOLERANCE};
use diracbound::standard::density_loglog_slope;
use diracbound::{
    coefficients_exact, coefficients_standard, density_exact, energy_dirac, energy_exact, normalize_exact,
    quantization_root, BoundaryRadius, Classification, EnergyLevel, PhysicalConstants, QuantumNumbers,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn qn(z: u32, k: i32, n_r: u32) -> QuantumNumbers {
    QuantumNumbers::new(z, k, n_r).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { ((a - b) / b).abs() }
}

fn c() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn ground_state_energy() -> Outcome {
    let e = energy_dirac(&c(), &qn(1, -1, 0)).unwrap();
    let alpha = c().alpha;
    let expected = (1.0 - alpha * alpha).sqrt();
    let err = rel(e.epsilon(), expected);
    let ev = e.binding_ev(&c()).re;
    let bohr = bohr_energy(&c(), 1, 1).unwrap().binding_ev(&c()).re;
    let dev = rel(ev, bohr);
    outcome(
        err <= 1e-13 && dev < 1e-3 && (ev - 13.606).abs() < 13.606e-3,
        format!("relative error {err:.2e}, binding {ev:.6} eV, {dev:.2e} from Bohr {bohr:.6} eV"),
    )
}

fn virtual_onset() -> Outcome {
    let mut bad = Vec::new();
    for k in [1, -1] {
        for n_r in 0..3 {
            for z in 1..=160 {
                let class = energy_dirac(&c(), &qn(z, k, n_r)).unwrap().classification;
                let want = if z <= 137 { Classification::RealBound } else { Classification::Virtual };
                if class != want {
                    bad.push(format!("Z={z} K={k} n_r={n_r} is {}", class.as_str()));
                }
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "real for Z <= 137, virtual for Z = 138..160, |K| = 1".into() } else { bad.join("; ") })
}

fn divergence_exponent() -> Outcome {
    let q = qn(1, 1, 0);
    let series = coefficients_standard(&c(), &q, &energy_dirac(&c(), &q).unwrap()).unwrap();
    let slope = density_loglog_slope(&series, 1e-8, 1e-6, 101).unwrap();
    let alpha = c().alpha;
    let expected = 2.0 * ((1.0 - alpha * alpha).sqrt() - 1.0);
    let err = rel(slope, expected);
    outcome(err < 1e-2, format!("slope {slope:.6e} vs {expected:.6e}, relative difference {err:.2e}"))
}

fn quantization_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all_real = true;
    for z in [1, 10, 100, 137, 150] {
        for n_r in 1..=10 {
            let q = qn(z, 1, n_r);
            let root = quantization_root(&c(), &q, BoundaryRadius::default()).unwrap();
            let closed = energy_exact(&c(), z, n_r).unwrap();
            worst = worst.max(rel(root.epsilon(), closed.epsilon()));
            all_real &= root.is_real_bound() && closed.is_real_bound();
        }
    }
    outcome(worst <= 1e-12 && all_real, format!("50 levels, worst relative difference {worst:.2e}, all real: {all_real}"))
}

fn boundary_finiteness() -> Outcome {
    let mut worst_value: f64 = 0.0;
    let mut worst_error: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let delta = BoundaryRadius::default();
    for n_r in 1..=3 {
        let q = qn(1, 1, n_r);
        let e = energy_exact(&c(), 1, n_r).unwrap();
        let series = coefficients_exact(&c(), &q, &e, delta).unwrap();
        let (series, report) = match normalize_exact(&series, 1e-10) {
            Ok(r) => r,
            Err(err) => return outcome(false, format!("n_r={n_r}: {err}")),
        };
        let rho = density_exact(&series, &[0.0]).unwrap().density.unwrap()[0];
        let expected = (series.b[0].powi(2) + series.d[0].powi(2)) / delta.value().powi(2);
        worst_value = worst_value.max(rel(rho, expected));
        worst_error = worst_error.max(report.error_estimate);
        worst_norm = worst_norm.max((report.integral_after - 1.0).abs());
    }
    outcome(
        worst_value <= 1e-12 && worst_error < 1e-10 && worst_norm < 1e-10,
        format!("boundary density relative error {worst_value:.2e}, quadrature error {worst_error:.2e}, |norm - 1| {worst_norm:.2e}"),
    )
}

fn tail_dependence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for z in [1, 10, 100, 137] {
        for n_r in 1..=6 {
            for k in [1, -1, 2, -2, 3, -3] {
                for delta in [1e-6, 2.4e-5, 1e-3] {
                    let e = energy_exact(&c(), z, n_r).unwrap();
                    let system = assemble_ladder(&c(), &qn(z, k, n_r), &e, BoundaryRadius::new(delta).unwrap()).unwrap();
                    worst = worst.max(system.tail_singular_ratio());
                    count += 1;
                }
            }
        }
    }
    outcome(worst < 1e-12, format!("{count} systems, largest tail singular value ratio {worst:.2e}"))
}

fn ladder_audit() -> Outcome {
    let delta = BoundaryRadius::new(2.4e-5).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for n_r in 1..=3 {
        let k = n_r as i32;
        let q = qn(1, k, n_r);
        let e = energy_exact(&c(), 1, n_r).unwrap();
        let report = |level: &EnergyLevel| {
            nullspace_report(&assemble_ladder(&c(), &q, level, delta).unwrap(), DEFAULT_SINGULAR_TOLERANCE)
        };
        let first = serde_json::to_string(&report(&e)).unwrap();
        let second = serde_json::to_string(&report(&e)).unwrap();
        let centre = report(&e);
        let beta = e.binding.re;
        let lower = report(&EnergyLevel::from_binding(beta * 0.99)).best_residual;
        let upper = report(&EnergyLevel::from_binding(beta * 1.01)).best_residual;
        let strict = centre.best_residual < lower && centre.best_residual < upper;
        ok &= first == second && strict;
        notes.push(format!(
            "n_r=K={n_r}: nullity {} (finding), residual {:.3e} vs {:.3e}/{:.3e}",
            centre.nullity, centre.best_residual, lower, upper
        ));
        // other K are reported only; the strict minimum is not guaranteed there
        for other in [1, -1].into_iter().filter(|o| *o != k) {
            let q = qn(1, other, n_r);
            let at = |level: &EnergyLevel| {
                nullspace_report(&assemble_ladder(&c(), &q, level, delta).unwrap(), DEFAULT_SINGULAR_TOLERANCE).best_residual
            };
            let strict = at(&e) < at(&EnergyLevel::from_binding(beta * 0.99)).min(at(&EnergyLevel::from_binding(beta * 1.01)));
            notes.push(format!("n_r={n_r} K={other}: strict minimum {strict} (finding)"));
        }
    }
    outcome(ok, notes.join("; "))
}

fn expansion_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut k_dependence = true;
    for n in 1..=3u32 {
        let mut checks = vec![(Model::Bohr, qn(1, 1, n)), (Model::Exact, qn(1, 1, n))];
        let states: Vec<_> = dirac_states(n).into_iter().filter(|(n_r, k)| n_r + k.unsigned_abs() == n).collect();
        checks.extend(states.iter().map(|&(n_r, k)| (Model::Dirac, qn(1, k, n_r))));
        for (model, q) in &checks {
            let r = alpha_expansion_check(&c(), *model, q).unwrap();
            worst = worst.max((r.leading_coefficient - 1.0 / (2.0 * (n * n) as f64)).abs());
        }
        if n >= 2 {
            let dirac: Vec<(u32, f64)> = states
                .iter()
                .map(|&(n_r, k)| (k.unsigned_abs(), alpha_expansion_check(&c(), Model::Dirac, &qn(1, k, n_r)).unwrap().next_order_coefficient))
                .collect();
            let varies = dirac.iter().any(|a| dirac.iter().any(|b| a.0 != b.0 && (a.1 - b.1).abs() > 1e-4));
            let exact: Vec<u64> = [1, -1, 2, -2]
                .iter()
                .map(|&k| alpha_expansion_check(&c(), Model::Exact, &qn(1, k, n)).unwrap().next_order_coefficient.to_bits())
                .collect();
            k_dependence &= varies && exact.iter().all(|v| *v == exact[0]);
        }
    }
    outcome(
        worst <= 1e-6 && k_dependence,
        format!("largest c2 deviation {worst:.2e}; Dirac c4 varies with K and finite-nucleus c4 does not: {k_dependence}"),
    )
}

fn k_and_delta_independence() -> Outcome {
    let mut bitwise = true;
    let mut worst: f64 = 0.0;
    for z in [1, 10, 100] {
        for n_r in 1..=5 {
            let levels: Vec<u64> = [1, -1, 2, -2]
                .iter()
                .map(|&k| diracbound::comparison::model_energy(&c(), Model::Exact, &qn(z, k, n_r)).unwrap().epsilon().to_bits())
                .collect();
            bitwise &= levels.iter().all(|v| *v == levels[0]);
            let roots: Vec<f64> = [1e-6, 1e-5, 1e-4]
                .iter()
                .map(|&d| quantization_root(&c(), &qn(z, 1, n_r), BoundaryRadius::new(d).unwrap()).unwrap().epsilon())
                .collect();
            for r in &roots {
                worst = worst.max(rel(*r, roots[0]));
            }
        }
    }
    outcome(bitwise && worst <= 1e-12, format!("bitwise across K: {bitwise}; largest relative spread across delta {worst:.2e}"))
}

fn end_to_end() -> Outcome {
    let run = || Command::new(env!("CARGO_BIN_EXE_diracbound")).args(["verify", "--suite", "all", "--z", "1"]).output().unwrap();
    let first = run();
    let second = run();
    let code = first.status.code();
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    let text = String::from_utf8_lossy(&first.stdout);
    let failed = text.lines().filter(|l| l.contains(",fail,")).count();
    outcome(
        code == Some(0) && second.status.code() == Some(0) && identical && failed == 0,
        format!("exit {code:?}, {failed} failing checks, reruns byte-identical: {identical}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, fn() -> Outcome, Duration);
    let ms = Duration::from_millis;
    let criteria: [Criterion; 10] = [
        (1, "ground-state Dirac energy", ground_state_energy, ms(1)),
        (2, "virtual-energy onset", virtual_onset, ms(10)),
        (3, "divergence exponent", divergence_exponent, ms(100)),
        (4, "quantization equivalence", quantization_equivalence, ms(1000)),
        (5, "boundary finiteness", boundary_finiteness, ms(1000)),
        (6, "tail-row linear dependence", tail_dependence, ms(100)),
        (7, "ladder audit determinism", ladder_audit, ms(1000)),
        (8, "expansion agreement", expansion_agreement, ms(1000)),
        (9, "K and delta independence", k_and_delta_independence, ms(1000)),
        (10, "end-to-end reproducibility", end_to_end, ms(10_000)),
    ];
    let mut failures = 0;
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let ok = out.ok && in_budget;
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {id:>2} {name}: {} [{:.3} ms, budget {} ms{}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64() * 1e3,
            budget.as_millis(),
            if in_budget { "" } else { ", over budget" },
        );
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
