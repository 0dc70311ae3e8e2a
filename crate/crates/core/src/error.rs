use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

use crate::terms::TermSheetDiagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid term sheet: {}", render_diagnostics(.0))]
    TermSheet(Vec<TermSheetDiagnostic>),

    #[error("price history: {0}")]
    Prices(String),

    #[error("price history has no close on observation date {0}")]
    MissingObservation(NaiveDate),

    #[error("invalid model spec: {0}")]
    Model(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("lattice has {steps} steps; enumeration is limited to {limit}")]
    InstanceTooLarge { steps: usize, limit: usize },

    #[error("conditioning event too rare: {0}")]
    RareEvent(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures reading or writing files, as opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

fn render_diagnostics(diags: &[TermSheetDiagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
