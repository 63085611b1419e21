use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::config::ExperimentConfig;
use super::CliError;
use crate::correspondence::AuditRecord;
use crate::montecarlo::{serialize_extended_f64, ComparisonRecord};

pub const SCHEMA_VERSION: &str = "pcsft-report/1";

/// Configuration fields that determine the report contents. Worker count and
/// output path are left out so they never change report bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub kind: &'static str,
    pub dim: usize,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub seed: u64,
    pub z_threshold: f64,
    pub hermitian_scale: f64,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(cfg: &ExperimentConfig) -> Self {
        Self {
            kind: cfg.kind.as_str(),
            dim: cfg.dim,
            trials: cfg.trials,
            samples: cfg.samples,
            seed: cfg.seed,
            z_threshold: cfg.z_threshold,
            hermitian_scale: cfg.hermitian_scale,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (1 + max(|lhs|, |rhs|))`.
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedComparison {
    pub name: &'static str,
    #[serde(flatten)]
    pub record: ComparisonRecord,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TrialRecord {
    Identity { trial: u64, checks: Vec<IdentityCheck> },
    Estimate { trial: u64, comparisons: Vec<NamedComparison> },
    Audit { trial: u64, label: &'static str, audit: AuditRecord },
}

impl TrialRecord {
    pub fn outcomes(&self) -> Vec<bool> {
        match self {
            Self::Identity { checks, .. } => checks.iter().map(|c| c.passed).collect(),
            Self::Estimate { comparisons, .. } => comparisons.iter().map(|c| c.record.passed).collect(),
            Self::Audit { audit, .. } => vec![audit.passed],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub passed_count: u64,
    pub failed_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_extended")]
    pub max_abs_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<f64>,
}

fn serialize_opt_extended<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_extended_f64(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub config: ConfigEcho,
    /// `passed_count + failed_count = trials * checks_per_trial`.
    pub checks_per_trial: u64,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.aggregate.failed_count == 0
    }

    /// Pretty JSON with every float written to 17 significant digits.
    pub fn render(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, ReportFormatter::default());
        self.serialize(&mut ser).expect("report serialization is infallible");
        out.push(b'\n');
        String::from_utf8(out).expect("serde_json emits UTF-8")
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render())
            .map_err(|source| CliError::OutputUnwritable { path: path.to_path_buf(), source })
    }
}

pub(crate) fn tally(trials: &[TrialRecord]) -> (u64, u64) {
    trials.iter().flat_map(|t| t.outcomes()).fold((0, 0), |(p, f), ok| if ok { (p + 1, f) } else { (p, f + 1) })
}

/// Pretty printer whose floats use `{:.16e}`.
#[derive(Default)]
struct ReportFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}
