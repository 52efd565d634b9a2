//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::operator::{OperatorSpec, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hbar: f64,
    pub c: f64,
    pub v_c_override: Option<f64>,
    pub lambda_grid: Vec<f64>,
    pub n_interior: usize,
    pub k_eigs: usize,
    pub output_format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            v_c_override: None,
            lambda_grid: vec![0.1, 1.0, PI, 10.0],
            n_interior: 2000,
            k_eigs: 10,
            output_format: OutputFormat::Json,
            out: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::new(self.hbar, self.c).expect("validated at parse time")
    }

    pub fn operator(&self) -> OperatorSpec {
        let constants = self.constants();
        match self.v_c_override {
            Some(v_c) => OperatorSpec::with_half_width(constants, v_c).expect("validated at parse time"),
            None => OperatorSpec::canonical(constants),
        }
    }

    /// `hbar = c = 1` on the canonical interval.
    pub fn is_reference_operator(&self) -> bool {
        self.hbar == 1.0 && self.c == 1.0 && self.v_c_override.is_none()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        positive("hbar", self.hbar)?;
        positive("c", self.c)?;
        if let Some(v_c) = self.v_c_override {
            positive("vc", v_c)?;
            if v_c >= self.c {
                return Err(ConfigError::new("vc", format!("must be smaller than c = {}, got {v_c}", self.c)));
            }
        }
        if self.lambda_grid.is_empty() {
            return Err(ConfigError::new("lambda", "at least one value is required"));
        }
        for &lambda in &self.lambda_grid {
            positive("lambda", lambda)?;
        }
        if self.n_interior == 0 {
            return Err(ConfigError::new("grid", "must be at least 1"));
        }
        if self.k_eigs == 0 {
            return Err(ConfigError::new("k-eigs", "must be at least 1"));
        }
        if self.k_eigs > self.n_interior {
            return Err(ConfigError::new(
                "k-eigs",
                format!("{} exceeds the grid size {}", self.k_eigs, self.n_interior),
            ));
        }
        Ok(())
    }
}

fn positive(key: &str, x: f64) -> Result<(), ConfigError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(ConfigError::new(key, format!("must be a positive finite number, got {x}")));
    }
    Ok(())
}

/// Malformed input, always tied to the key (or flag) at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Action scale hbar (default 1)
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    /// Speed scale c (default 1)
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Half-width of the interval, overriding c*sqrt(1 - 1/pi)
    #[arg(long = "vc", global = true)]
    pub vc: Option<f64>,
    /// Spectral parameter for the deficiency check (repeatable)
    #[arg(long = "lambda", global = true, action = clap::ArgAction::Append)]
    pub lambda: Vec<f64>,
    /// Interior grid points (default 2000)
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Number of eigenpairs from the top of the spectrum (default 10)
    #[arg(long = "k-eigs", global = true)]
    pub k_eigs: Option<usize>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the random test-function corpus (default 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat `key = value` configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in a configuration file (the flag names without dashes).
pub const FILE_KEYS: &[&str] = &["hbar", "c", "vc", "lambda", "grid", "k-eigs", "format", "out", "seed"];

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.trim()
        .parse()
        .map_err(|e| ConfigError::new(key, format!("cannot parse `{}`: {e}", raw.trim())))
}

/// Parses the flat file format: one `key = value` per line, `#` comments,
/// `lambda` as a comma-separated list (and repeatable).
pub fn apply_config_text(config: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    let mut seen: Vec<String> = Vec::new();
    let mut lambdas: Option<Vec<f64>> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim();
        if !FILE_KEYS.contains(&key) {
            return Err(ConfigError::new(key, "unknown key"));
        }
        if key != "lambda" && seen.iter().any(|k| k == key) {
            return Err(ConfigError::new(key, "given more than once"));
        }
        seen.push(key.to_string());
        match key {
            "hbar" => config.hbar = parse_value(key, value)?,
            "c" => config.c = parse_value(key, value)?,
            "vc" => config.v_c_override = Some(parse_value(key, value)?),
            "lambda" => {
                let list = lambdas.get_or_insert_with(Vec::new);
                for item in value.split(',') {
                    list.push(parse_value(key, item)?);
                }
            }
            "grid" => config.n_interior = parse_value(key, value)?,
            "k-eigs" => config.k_eigs = parse_value(key, value)?,
            "format" => {
                config.output_format = OutputFormat::from_str(value.trim(), true)
                    .map_err(|_| ConfigError::new(key, format!("expected json or csv, got `{}`", value.trim())))?
            }
            "out" => config.out = Some(PathBuf::from(value.trim())),
            "seed" => config.seed = parse_value(key, value)?,
            _ => unreachable!("key list checked above"),
        }
    }
    if let Some(l) = lambdas {
        config.lambda_grid = l;
    }
    Ok(())
}

/// Defaults, overridden by the file (if any), overridden by flags; then validated.
pub fn resolve(overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    if let Some(path) = &overrides.config {
        let text = read_config_file(path)?;
        apply_config_text(&mut config, &text)?;
    }
    if let Some(x) = overrides.hbar {
        config.hbar = x;
    }
    if let Some(x) = overrides.c {
        config.c = x;
    }
    if let Some(x) = overrides.vc {
        config.v_c_override = Some(x);
    }
    if !overrides.lambda.is_empty() {
        config.lambda_grid = overrides.lambda.clone();
    }
    if let Some(x) = overrides.grid {
        config.n_interior = x;
    }
    if let Some(x) = overrides.k_eigs {
        config.k_eigs = x;
    }
    if let Some(x) = overrides.format {
        config.output_format = x;
    }
    if let Some(x) = &overrides.out {
        config.out = Some(x.clone());
    }
    if let Some(x) = overrides.seed {
        config.seed = x;
    }
    config.validate()?;
    Ok(config)
}

fn read_config_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))
}
