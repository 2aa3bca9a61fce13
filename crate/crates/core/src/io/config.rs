//! Run configuration: constants, δ, output format, sampling grid and
//! tolerances, read from an optional TOML file.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, DiracError, Result};
use crate::exact::{BoundaryRadius, DEFAULT_DELTA};
use crate::ladder::DEFAULT_SINGULAR_TOLERANCE;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "DIRACBOUND_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = DiracError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => domain(format!("unknown format {s:?}, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sampling grid in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    min: f64,
    max: f64,
    count: usize,
    spacing: Spacing,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: f64,
    max: f64,
    count: usize,
    spacing: Spacing,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = DiracError;

    fn try_from(g: RawGrid) -> Result<Self> {
        GridSpec::new(g.min, g.max, g.count, g.spacing)
    }
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if count < 2 {
            return domain(format!("grid needs at least 2 points, got {count}"));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return domain(format!("grid needs finite min < max, got {min}:{max}"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return domain(format!("log grid needs min > 0, got {min}"));
        }
        Ok(Self { min, max, count, spacing })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Grid points, ascending, with both end points exact.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut pts: Vec<f64> = match self.spacing {
            Spacing::Linear => {
                let step = (self.max - self.min) / last;
                (0..self.count).map(|i| self.min + step * i as f64).collect()
            }
            Spacing::Log => {
                let (lo, hi) = (self.min.ln(), self.max.ln());
                (0..self.count).map(|i| (lo + (hi - lo) * i as f64 / last).exp()).collect()
            }
        };
        pts[0] = self.min;
        pts[self.count - 1] = self.max;
        pts
    }
}

impl FromStr for GridSpec {
    type Err = DiracError;

    /// Parses `min:max:count:linear|log`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count, spacing] = parts[..] else {
            return domain(format!("grid {s:?} is not min:max:count:spacing"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| DiracError::Domain(format!("bad grid bound {v:?}")));
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| DiracError::Domain(format!("bad grid count {count:?}")))?;
        let spacing = match spacing.trim() {
            "linear" | "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return domain(format!("unknown grid spacing {other:?}, expected linear or log")),
        };
        GridSpec::new(num(min)?, num(max)?, count, spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Target accuracy of the unit-norm contract.
    pub normalization: f64,
    /// Relative singular value below which a direction counts as null.
    pub singular_value: f64,
    /// Relative agreement demanded between root finder and closed form.
    pub agreement: f64,
    /// Absolute agreement demanded of fitted expansion coefficients.
    pub expansion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-10,
            singular_value: DEFAULT_SINGULAR_TOLERANCE,
            agreement: 1e-12,
            expansion: 1e-6,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("normalization", self.normalization),
            ("singular_value", self.singular_value),
            ("agreement", self.agreement),
            ("expansion", self.expansion),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("tolerance {name} must be finite and positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Contents of a config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    pub rest_energy: Option<f64>,
    pub hbar_c: Option<f64>,
    pub delta: Option<f64>,
    pub format: Option<OutputFormat>,
    pub grid: Option<GridSpec>,
    pub tolerances: Option<Tolerances>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| DiracError::Domain(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DiracError::Domain(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub delta: BoundaryRadius,
    pub format: OutputFormat,
    pub grid: Option<GridSpec>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Defaults overridden by the file's keys.
    pub fn from_file(file: &ConfigFile) -> Result<Self> {
        let d = PhysicalConstants::default();
        let constants = PhysicalConstants::new(
            file.alpha.unwrap_or(d.alpha),
            file.rest_energy.unwrap_or(d.rest_energy),
            file.hbar_c.unwrap_or(d.hbar_c),
        )?;
        let tolerances = file.tolerances.unwrap_or_default();
        tolerances.validate()?;
        Ok(Self {
            constants,
            delta: BoundaryRadius::new(file.delta.unwrap_or(DEFAULT_DELTA))?,
            format: file.format.unwrap_or_default(),
            grid: file.grid,
            tolerances,
        })
    }

    /// Loads `path`, falling back to the file named by [`CONFIG_ENV`], then
    /// to the defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        let env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty());
        match path.map(Path::to_path_buf).or(env.map(Into::into)) {
            Some(p) => Self::from_file(&ConfigFile::load(&p)?),
            None => Ok(Self::default()),
        }
    }
}
