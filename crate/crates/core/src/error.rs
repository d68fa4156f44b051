use thiserror::Error;

use crate::model::OdeState;
use crate::series::SeedCoeffs;

pub type Result<T, E = MonopoleError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonopoleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("radius {r} is outside the domain of the right-hand side (r must be > 0)")]
    Domain { r: f64 },

    #[error("profile ends at r = {last}, expected it to reach r = 1")]
    IncompleteDomain { last: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("series coefficient r^{power} blew up to {value:e}")]
    SeriesBlowUp { power: usize, value: f64 },

    #[error("integration diverged at r = {r}")]
    Divergence {
        r: f64,
        /// States reached before the blow-up, for diagnostics.
        partial: Vec<OdeState>,
    },

    #[error("boundary map failed for seed (a1 = {}, b2 = {}) at r = {r}: {reason}", seed.a1, seed.b2)]
    MapFailure {
        seed: SeedCoeffs,
        r: f64,
        reason: String,
    },

    #[error("jacobian is near-singular (condition estimate {condition:e})")]
    NearSingular {
        condition: f64,
        jacobian: [[f64; 2]; 2],
    },

    #[error("newton did not converge in {iterations} iterations (best residual {residual:e})")]
    NonConvergence {
        best: SeedCoeffs,
        residual: f64,
        iterations: usize,
    },

    #[error("newton diverged after {iterations} iterations: {reason}")]
    NewtonDivergence {
        best: SeedCoeffs,
        iterations: usize,
        reason: String,
    },
}

impl MonopoleError {
    /// Short machine-readable code used by the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            MonopoleError::InvalidParams(_) => "invalid_params",
            MonopoleError::Config(_) => "invalid_config",
            MonopoleError::Domain { .. } => "domain",
            MonopoleError::IncompleteDomain { .. } => "incomplete_domain",
            MonopoleError::InvalidProfile(_) => "invalid_profile",
            MonopoleError::SeriesBlowUp { .. } => "series_blow_up",
            MonopoleError::Divergence { .. } => "divergence",
            MonopoleError::MapFailure { .. } => "map_failure",
            MonopoleError::NearSingular { .. } => "near_singular",
            MonopoleError::NonConvergence { .. } => "non_convergence",
            MonopoleError::NewtonDivergence { .. } => "newton_divergence",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            MonopoleError::InvalidParams(_)
                | MonopoleError::Config(_)
                | MonopoleError::Domain { .. }
                | MonopoleError::InvalidProfile(_)
        )
    }
}
