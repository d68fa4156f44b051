//! Parameter-grid continuation.
//!
//! Each `epsilon` row is one chain: cells are solved in `lambda` order and
//! every converged seed becomes the guess for the next cell. A row starts
//! from [`default_guess`], so rows are independent of each other and may be
//! solved concurrently without changing any result.

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::model::Params;
use crate::series::SeedCoeffs;
use crate::shooting::{default_guess, newton_solve, ShootingConfig, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SweepOrder {
    /// Rows by descending `epsilon`, `lambda` ascending within a row.
    #[default]
    Forward,
    /// Rows by ascending `epsilon`, `lambda` descending within a row.
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellOutcome {
    Converged(Box<SolveResult>),
    Failed {
        code: String,
        detail: String,
        best: Option<SeedCoeffs>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub epsilon: f64,
    pub lambda: f64,
    pub outcome: CellOutcome,
}

impl SweepCell {
    pub fn result(&self) -> Option<&SolveResult> {
        match &self.outcome {
            CellOutcome::Converged(r) => Some(r),
            CellOutcome::Failed { .. } => None,
        }
    }
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn validate_lists(eps_list: &[f64], lambda_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() || lambda_list.is_empty() {
        return Err(MonopoleError::Config(
            "sweep needs at least one epsilon and one lambda".into(),
        ));
    }
    for &e in eps_list {
        for &l in lambda_list {
            Params::new(e, l)?;
        }
    }
    Ok(())
}

/// Rows of the sweep in the order they are solved.
pub fn row_schedule(eps_list: &[f64], order: SweepOrder) -> Vec<f64> {
    let mut rows = sorted_unique(eps_list);
    if order == SweepOrder::Forward {
        rows.reverse();
    }
    rows
}

fn failure(err: &MonopoleError) -> CellOutcome {
    let best = match err {
        MonopoleError::NonConvergence { best, .. }
        | MonopoleError::NewtonDivergence { best, .. } => Some(*best),
        _ => None,
    };
    CellOutcome::Failed {
        code: err.code().to_string(),
        detail: err.to_string(),
        best,
    }
}

/// Solves one `epsilon` row as a continuation chain. Cells are returned in
/// ascending `lambda`.
pub fn sweep_row(
    epsilon: f64,
    lambda_list: &[f64],
    order: SweepOrder,
    config: &ShootingConfig,
) -> Result<Vec<SweepCell>> {
    validate_lists(&[epsilon], lambda_list)?;
    config.validate()?;
    let mut lambdas = sorted_unique(lambda_list);
    if order == SweepOrder::Reverse {
        lambdas.reverse();
    }

    let mut previous: Option<SeedCoeffs> = None;
    let mut cells = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let params = Params::new(epsilon, lambda)?;
        let fallback = default_guess(&params);
        let guess = previous.unwrap_or(fallback);
        let mut outcome = newton_solve(&params, guess, config);
        if outcome.is_err() && guess != fallback {
            outcome = newton_solve(&params, fallback, config);
        }
        let outcome = match outcome {
            Ok(res) => {
                previous = Some(res.seed);
                CellOutcome::Converged(Box::new(res))
            }
            Err(e) => {
                previous = None;
                failure(&e)
            }
        };
        cells.push(SweepCell {
            epsilon,
            lambda,
            outcome,
        });
    }
    cells.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(cells)
}

/// Solves the whole grid row by row. Per-cell failures are recorded, never
/// fatal. Cells are returned sorted by `(epsilon, lambda)` ascending.
pub fn continuation_sweep(
    eps_list: &[f64],
    lambda_list: &[f64],
    order: SweepOrder,
    config: &ShootingConfig,
) -> Result<Vec<SweepCell>> {
    validate_lists(eps_list, lambda_list)?;
    config.validate()?;
    let mut cells = Vec::new();
    for eps in row_schedule(eps_list, order) {
        cells.extend(sweep_row(eps, lambda_list, order, config)?);
    }
    sort_cells(&mut cells);
    Ok(cells)
}

pub fn sort_cells(cells: &mut [SweepCell]) {
    cells.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.lambda.total_cmp(&b.lambda))
    });
}
