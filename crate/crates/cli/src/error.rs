use std::path::PathBuf;

use monopole::MonopoleError;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Solver(#[from] MonopoleError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A check ran to completion but missed its threshold.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Check(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Solver(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Check(_) => "check_failed",
        }
    }

    fn context(&self) -> Value {
        match self {
            CliError::Solver(e) => solver_context(e),
            CliError::Io { path, .. } => json!({ "path": path }),
            _ => json!({}),
        }
    }

    /// `{"error", "detail", "context"}` as written to stderr.
    pub fn to_json(&self) -> Value {
        json!({
            "error": self.code(),
            "detail": self.to_string(),
            "context": self.context(),
        })
    }
}

fn solver_context(e: &MonopoleError) -> Value {
    match e {
        MonopoleError::Domain { r } => json!({ "r": r }),
        MonopoleError::IncompleteDomain { last } => json!({ "last_radius": last }),
        MonopoleError::SeriesBlowUp { power, value } => json!({ "power": power, "value": value }),
        MonopoleError::Divergence { r, partial } => {
            json!({ "r": r, "states_reached": partial.len() })
        }
        MonopoleError::MapFailure { seed, r, .. } => json!({ "seed": seed, "r": r }),
        MonopoleError::NearSingular {
            condition,
            jacobian,
        } => json!({ "condition": condition, "jacobian": jacobian }),
        MonopoleError::NonConvergence {
            best,
            residual,
            iterations,
        } => json!({ "best": best, "residual": residual, "iterations": iterations }),
        MonopoleError::NewtonDivergence {
            best, iterations, ..
        } => json!({ "best": best, "iterations": iterations }),
        MonopoleError::InvalidParams(_)
        | MonopoleError::Config(_)
        | MonopoleError::InvalidProfile(_) => json!({}),
    }
}
