use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::montecarlo::DEFAULT_Z_THRESHOLD;

pub const MAX_DIM: usize = 512;
pub const DEFAULT_HERMITIAN_SCALE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Identity,
    Estimate,
    RobertsonAudit,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Estimate => "estimate",
            Self::RobertsonAudit => "robertson-audit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dim: usize,
    pub trials: u64,
    /// Required for `estimate` only.
    pub samples: Option<u64>,
    pub seed: u64,
    pub z_threshold: f64,
    /// Advisory parallelism for the estimators.
    pub workers: usize,
    pub output_path: Option<PathBuf>,
    /// Scale of the random Hermitian draws; 0 yields zero operators.
    pub hermitian_scale: f64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, dim: usize, trials: u64, seed: u64) -> Self {
        Self {
            kind,
            dim,
            trials,
            samples: None,
            seed,
            z_threshold: DEFAULT_Z_THRESHOLD,
            workers: 1,
            output_path: None,
            hermitian_scale: DEFAULT_HERMITIAN_SCALE,
        }
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = Some(samples);
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::ConfigInvalid(msg));
        if self.dim == 0 || self.dim > MAX_DIM {
            return invalid(format!("dim {} outside [1, {MAX_DIM}]", self.dim));
        }
        if self.trials == 0 {
            return invalid("trials must be positive".into());
        }
        if !(self.z_threshold.is_finite() && self.z_threshold > 0.0) {
            return invalid(format!("z-threshold {} must be positive", self.z_threshold));
        }
        if self.workers == 0 {
            return invalid("workers must be positive".into());
        }
        if !(self.hermitian_scale.is_finite() && self.hermitian_scale >= 0.0) {
            return invalid(format!("hermitian scale {} must be non-negative", self.hermitian_scale));
        }
        if self.kind == ExperimentKind::Estimate {
            match self.samples {
                None => return invalid("estimate requires --samples".into()),
                Some(s) if s < 2 => return invalid(format!("samples {s} < 2")),
                _ => {}
            }
        }
        Ok(())
    }
}

/// `pcsft <kind> --dim N --trials T [--samples S] --seed K [--z-threshold Z] [--workers W] --out PATH`
#[derive(Debug, Parser)]
#[command(
    name = "pcsft",
    version,
    about = "Verify classical-field representations of quantum averages and dispersions"
)]
pub struct Args {
    /// Experiment to run; may instead come from --config.
    pub kind: Option<ExperimentKind>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "z-threshold")]
    pub z_threshold: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub kind: Option<ExperimentKind>,
    pub dim: Option<usize>,
    pub trials: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub z_threshold: Option<f64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))
    }
}

impl Args {
    pub fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let missing = |name: &str| CliError::ConfigInvalid(format!("missing required --{name}"));
        let cfg = ExperimentConfig {
            kind: self.kind.or(file.kind).ok_or_else(|| missing("kind"))?,
            dim: self.dim.or(file.dim).ok_or_else(|| missing("dim"))?,
            trials: self.trials.or(file.trials).ok_or_else(|| missing("trials"))?,
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed).ok_or_else(|| missing("seed"))?,
            z_threshold: self.z_threshold.or(file.z_threshold).unwrap_or(DEFAULT_Z_THRESHOLD),
            workers: self.workers.or(file.workers).unwrap_or(1),
            output_path: Some(self.out.or(file.out).ok_or_else(|| missing("out"))?),
            hermitian_scale: DEFAULT_HERMITIAN_SCALE,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
