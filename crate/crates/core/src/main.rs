use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diracbound::comparison::Model;
use diracbound::io::commands::{profile_table, spectrum, wavefunction};
use diracbound::io::{run_verify, GridSpec, NrRange, OutputFormat, RunConfig, Suite, Table};
use diracbound::{BoundaryRadius, DiracError, QuantumNumbers};

const EXIT_COMPUTATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Bound states of the radial Dirac equation for point and finite nuclei.
#[derive(Parser)]
#[command(name = "diracbound", version)]
struct Cli {
    /// TOML run configuration; defaults to $DIRACBOUND_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectrumModel {
    Dirac,
    Exact,
    Bohr,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileModel {
    Dirac,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quantization,
    Ladder,
    Expansion,
    Divergence,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Output {
    /// Output format; overrides the config file.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels of the Bohr, point-nucleus and finite-nucleus models.
    Spectrum {
        #[arg(long, value_enum, default_value = "all")]
        model: SpectrumModel,
        /// Nuclear charge.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        z: u32,
        /// Largest principal number.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_n: u32,
        /// Nuclear radius in hbar/mc.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Radial components and density on a grid.
    Wavefunction {
        #[arg(long, value_enum, default_value = "exact")]
        model: ProfileModel,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        z: u32,
        /// Dirac quantum number K (nonzero).
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i32,
        /// Radial quantum number; defaults to the lowest level of the model.
        #[arg(long)]
        nr: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        /// min:max:count:linear|log in hbar/mc.
        #[arg(long)]
        grid: Option<String>,
        /// Rescale to unit norm and report the integral.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run invariant suites and emit a pass/fail/finding report.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        z: u32,
        /// lo:hi range of radial numbers (principal numbers for the expansion suite).
        #[arg(long, default_value = "1:3")]
        nr_range: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Computation(String),
}

fn usage(e: DiracError) -> Failure {
    Failure::Usage(e.to_string())
}

fn computation(e: DiracError) -> Failure {
    Failure::Computation(e.to_string())
}

fn settings(base: &RunConfig, delta: Option<f64>, format: Option<FormatArg>) -> Result<RunConfig, Failure> {
    let mut cfg = *base;
    if let Some(d) = delta {
        cfg.delta = BoundaryRadius::new(d).map_err(usage)?;
    }
    if let Some(f) = format {
        cfg.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    Ok(cfg)
}

fn emit(table: &Table, format: OutputFormat, out: Option<&PathBuf>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Computation(format!("write failed: {e}"));
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?);
            table.write(format, &mut w).map_err(computation)?;
            w.flush().map_err(io)
        }
        None => {
            let mut w = std::io::stdout().lock();
            table.write(format, &mut w).map_err(computation)?;
            w.flush().map_err(io)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let base = RunConfig::resolve(cli.config.as_deref()).map_err(usage)?;
    match cli.command {
        Command::Spectrum { model, z, max_n, delta, output } => {
            let cfg = settings(&base, delta, output.format)?;
            let models: Vec<Model> = match model {
                SpectrumModel::Dirac => vec![Model::Dirac],
                SpectrumModel::Exact => vec![Model::Exact],
                SpectrumModel::Bohr => vec![Model::Bohr],
                SpectrumModel::All => vec![Model::Bohr, Model::Dirac, Model::Exact],
            };
            let table = spectrum(&cfg, z, max_n, &models).map_err(computation)?;
            emit(&table, cfg.format, output.out.as_ref())?;
            Ok(0)
        }
        Command::Wavefunction { model, z, k, nr, delta, grid, normalize, output } => {
            let cfg = settings(&base, delta, output.format)?;
            let model = match model {
                ProfileModel::Dirac => Model::Dirac,
                ProfileModel::Exact => Model::Exact,
            };
            let n_r = nr.unwrap_or(if model == Model::Exact { 1 } else { 0 });
            let qn = QuantumNumbers::new(z, k, n_r).map_err(usage)?;
            if model == Model::Exact && n_r == 0 {
                return Err(Failure::Usage("the finite-nucleus model needs --nr >= 1".into()));
            }
            let grid = grid.map(|g| g.parse::<GridSpec>()).transpose().map_err(usage)?;
            if let Some(g) = grid.or(cfg.grid) {
                if model == Model::Dirac && g.min() <= 0.0 {
                    return Err(Failure::Usage("point-nucleus grids need min > 0".into()));
                }
                if g.min() < 0.0 {
                    return Err(Failure::Usage("xi grids need min >= 0".into()));
                }
            }
            let run = wavefunction(&cfg, model, &qn, grid, normalize).map_err(computation)?;
            emit(&profile_table(&cfg, model, &run), cfg.format, output.out.as_ref())?;
            Ok(0)
        }
        Command::Verify { suite, z, nr_range, delta, format, out } => {
            let cfg = settings(&base, delta, format)?;
            let range: NrRange = nr_range.parse().map_err(usage)?;
            let suites = match suite {
                SuiteArg::Quantization => vec![Suite::Quantization],
                SuiteArg::Ladder => vec![Suite::Ladder],
                SuiteArg::Expansion => vec![Suite::Expansion],
                SuiteArg::Divergence => vec![Suite::Divergence],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let report = run_verify(&cfg, &suites, z, range).map_err(computation)?;
            emit(&report.table(&cfg), cfg.format, out.as_ref())?;
            Ok(if report.passed() { 0 } else { EXIT_VERIFY })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}
