//! Builds the output tables behind the `spectrum` and `wavefunction`
//! commands.

use super::config::{GridSpec, RunConfig, Spacing};
use super::table::{complex_cells, Cell, Table};
use crate::comparison::{compare_spectra, Model, SpectrumTable};
use crate::error::{domain, Result};
use crate::exact::{coefficients_exact, density_exact, energy_exact, normalize_exact};
use crate::levels::{derive_scales, EnergyLevel, QuantumNumbers};
use crate::profile::{NormalizationReport, RadialProfile};
use crate::standard::{coefficients_standard, density_standard, energy_dirac, normalize_standard};

pub const SPECTRUM_COLUMNS: [&str; 16] = [
    "model",
    "z",
    "k",
    "n_r",
    "n",
    "classification",
    "epsilon_re",
    "epsilon_im",
    "binding_re",
    "binding_im",
    "binding_ev_re",
    "binding_ev_im",
    "minus_bohr_ev_re",
    "minus_bohr_ev_im",
    "minus_exact_ev_re",
    "minus_exact_ev_im",
];

pub fn spectrum(config: &RunConfig, z: u32, max_n: u32, models: &[Model]) -> Result<Table> {
    let spectra = compare_spectra(&config.constants, z, max_n, config.delta, models)?;
    Ok(spectrum_table(config, &spectra, models))
}

pub fn spectrum_table(config: &RunConfig, spectra: &SpectrumTable, models: &[Model]) -> Table {
    let mut t = Table::new(SPECTRUM_COLUMNS);
    t.meta("command", "spectrum").run_metadata(config);
    t.meta("z", spectra.z).meta("max_n", spectra.max_n);
    t.meta("models", models.iter().map(Model::as_str).collect::<Vec<_>>().join(" "));
    t.meta("energy_units", "epsilon and binding in mc2; *_ev in eV");
    for r in &spectra.rows {
        let mut row: Vec<Cell> = vec![
            r.model.as_str().into(),
            r.z.into(),
            r.k.into(),
            r.n_r.into(),
            r.n.into(),
            r.classification().as_str().into(),
        ];
        row.extend(complex_cells(r.energy.value));
        row.extend(complex_cells(r.energy.binding));
        row.extend(complex_cells(r.binding_ev));
        row.extend(complex_cells(r.minus_bohr_ev));
        match r.minus_exact_ev {
            Some(v) => row.extend(complex_cells(v)),
            None => row.extend([Cell::Empty, Cell::Empty]),
        }
        t.push(row);
    }
    t
}

/// Sampled profile, with the normalization outcome when requested.
#[derive(Debug, Clone)]
pub struct ProfileRun {
    pub profile: RadialProfile,
    pub grid: GridSpec,
    pub normalization: Option<NormalizationReport>,
}

fn model_level(config: &RunConfig, model: Model, qn: &QuantumNumbers) -> Result<EnergyLevel> {
    match model {
        Model::Dirac => energy_dirac(&config.constants, qn),
        Model::Exact => energy_exact(&config.constants, qn.z, qn.n_r),
        Model::Bohr => domain("no wavefunction for the Bohr model"),
    }
}

/// Default sampling: log-spaced radii down to 10⁻⁸ for the point nucleus,
/// where the origin behaviour is the point of interest, and a linear ξ grid
/// from the boundary otherwise. Both extend to 40 decay lengths.
pub fn default_grid(config: &RunConfig, model: Model, qn: &QuantumNumbers) -> Result<GridSpec> {
    let energy = model_level(config, model, qn)?;
    let Some(s) = derive_scales(&config.constants, qn, &energy)?.real() else {
        return domain(format!("{qn}: {model} level is not a real bound state"));
    };
    let reach = 40.0 / s.a;
    match model {
        Model::Exact => GridSpec::new(0.0, reach, 401, Spacing::Linear),
        _ => GridSpec::new(1e-8, reach, 401, Spacing::Log),
    }
}

pub fn wavefunction(
    config: &RunConfig,
    model: Model,
    qn: &QuantumNumbers,
    grid: Option<GridSpec>,
    normalize: bool,
) -> Result<ProfileRun> {
    let grid = match grid.or(config.grid) {
        Some(g) => g,
        None => default_grid(config, model, qn)?,
    };
    let points = grid.points();
    let tol = config.tolerances.normalization;
    let energy = model_level(config, model, qn)?;
    let (profile, normalization) = match model {
        Model::Dirac => {
            let series = coefficients_standard(&config.constants, qn, &energy)?;
            if !series.tail.terminates {
                return domain(format!(
                    "{qn}: series does not terminate, next coefficients relative size {:e}",
                    series.tail.relative
                ));
            }
            if normalize {
                let (series, report) = normalize_standard(&series, tol)?;
                (density_standard(&series, &points)?, Some(report))
            } else {
                (density_standard(&series, &points)?, None)
            }
        }
        Model::Exact => {
            let series = coefficients_exact(&config.constants, qn, &energy, config.delta)?;
            if normalize {
                let (series, report) = normalize_exact(&series, tol)?;
                (density_exact(&series, &points)?, Some(report))
            } else {
                (density_exact(&series, &points)?, None)
            }
        }
        Model::Bohr => unreachable!("rejected by model_level"),
    };
    Ok(ProfileRun { profile, grid, normalization })
}

pub fn profile_table(config: &RunConfig, model: Model, run: &ProfileRun) -> Table {
    let p = &run.profile;
    let coordinate = p.model.coordinate_name();
    let mut t = Table::new([coordinate, "component_1", "component_2", "density"]);
    t.meta("command", "wavefunction").run_metadata(config);
    t.meta("model", model.as_str())
        .meta("z", p.qn.z)
        .meta("k", p.qn.k)
        .meta("n_r", p.qn.n_r)
        .meta("classification", p.energy.classification.as_str())
        .meta("epsilon", p.energy.epsilon())
        .meta("binding", p.energy.binding.re)
        .meta("binding_ev", p.energy.binding_ev(&config.constants).re)
        .meta("coordinate", coordinate)
        .meta("coordinate_units", "hbar/mc")
        .meta("grid_min", run.grid.min())
        .meta("grid_max", run.grid.max())
        .meta("grid_count", run.grid.count())
        .meta("grid_spacing", match run.grid.spacing() {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
        .meta("normalized", run.normalization.is_some());
    if let Some(n) = run.normalization {
        t.meta("norm_integral", n.integral_after)
            .meta("norm_error_estimate", n.error_estimate)
            .meta("norm_scale", n.scale);
    }
    let density = p.density.as_ref().expect("density profiles carry a density");
    for (((x, f), g), rho) in p.grid.iter().zip(&p.component_1).zip(&p.component_2).zip(density) {
        t.push(vec![(*x).into(), (*f).into(), (*g).into(), (*rho).into()]);
    }
    t
}
