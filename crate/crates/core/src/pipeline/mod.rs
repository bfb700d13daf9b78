//! Run orchestration behind the command-line tool: configuration, input
//! loading, the validate / build / verify / certify stages and their artifacts.

mod config;
mod stages;

pub use config::{load_input, parse_generator, Generator, RunConfig};
pub use stages::{
    build, certify, validate, verify, BuildManifest, CertificateFile, ComponentCertificate, ComponentEntry,
    ComponentReport, CoverRow, GraphStats, HyperbolicitySummary, RunReport, ValidationReport,
};

use std::path::Path;

use thiserror::Error;

use crate::amenability::AmenabilityError;
use crate::cao::CaoError;
use crate::cone::ConeError;
use crate::metric::MetricError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("metric violation: {0}")]
    Metric(MetricError),
    #[error("{0}")]
    Infeasible(CaoError),
    #[error("verification failed: {assertion} (measured {measured}, bound {bound}){}", witness.as_ref().map(|w| format!(", witness {w}")).unwrap_or_default())]
    VerifyFailed { assertion: String, measured: f64, bound: f64, witness: Option<String> },
    #[error("no certificate: {0}")]
    NoCertificate(String),
    #[error(transparent)]
    Cao(CaoError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Amenability(#[from] AmenabilityError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Artifact(String),
}

impl PipelineError {
    /// 2 parse / usage, 3 metric violation, 4 infeasible parameters,
    /// 5 verification failure, 6 no certificate, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) | PipelineError::Config(_) => 2,
            PipelineError::Metric(_) => 3,
            PipelineError::Infeasible(_) => 4,
            PipelineError::VerifyFailed { .. } => 5,
            PipelineError::NoCertificate(_) => 6,
            _ => 1,
        }
    }
}

impl From<MetricError> for PipelineError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Parse(m) => PipelineError::Parse(m),
            other => PipelineError::Metric(other),
        }
    }
}

impl From<CaoError> for PipelineError {
    fn from(e: CaoError) -> Self {
        match e {
            CaoError::InfeasibleParams { .. } => PipelineError::Infeasible(e),
            CaoError::Metric(m) => m.into(),
            other => PipelineError::Cao(other),
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

pub(crate) fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| PipelineError::Artifact(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub(crate) fn read_json<S: serde::de::DeserializeOwned>(path: &Path) -> Result<S, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Artifact(format!("{}: {e}", path.display())))
}
