use thiserror::Error;

use crate::lp::LpError;
use crate::model::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invalid scenario: {}", format_violations(.0))]
    InvalidScenario(Vec<Violation>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown technology `{0}`")]
    UnknownTechnology(String),
    #[error("{0} is undefined: storage discharges nothing")]
    Undefined(&'static str),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("{} ({})", v.code, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
