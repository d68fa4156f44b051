use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monopole::{IntegratorConfig, SeedCoeffs, ShootingConfig, SweepOrder};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "monopole",
    version,
    about = "Spherically symmetric monopoles on the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one (epsilon, lambda) cell by Newton shooting.
    Solve(SolveArgs),
    /// Sweep a parameter grid by continuation.
    Table(TableArgs),
    /// Solve one cell and emit its sampled profile.
    Profile(ProfileArgs),
    /// Classify the five constant solutions at a radius.
    Stability(StabilityArgs),
    /// Run numerical self-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Forward,
    Reverse,
}

impl From<OrderArg> for SweepOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Forward => SweepOrder::Forward,
            OrderArg::Reverse => SweepOrder::Reverse,
        }
    }
}

/// Solver and output flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Radius where the series hands over to the integrator.
    #[arg(long, allow_negative_numbers = true)]
    pub r_match: Option<f64>,
    /// Radius where the boundary values are imposed (0.9999 reproduces the
    /// bundled reference table).
    #[arg(long, allow_negative_numbers = true)]
    pub r_outer: Option<f64>,
    /// Even truncation order of the origin series.
    #[arg(long)]
    pub series_order: Option<usize>,
    /// RK4 steps between the handoff and the boundary.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Newton tolerance on the boundary residual.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Write the data file here (atomically) together with `<PATH>.manifest.json`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    pub fn config(&self) -> Result<ShootingConfig, CliError> {
        let mut cfg = ShootingConfig::default();
        if let Some(v) = self.r_match {
            cfg.r_match = v;
        }
        if let Some(v) = self.r_outer {
            cfg.r_outer = v;
        }
        if let Some(v) = self.series_order {
            cfg.series_order = v;
        }
        if let Some(v) = self.steps {
            cfg.integrator = IntegratorConfig {
                n_steps: v,
                ..cfg.integrator
            };
        }
        if let Some(v) = self.tol {
            cfg.newton_tol = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CellArgs {
    #[arg(short, long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(short, long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Initial seed `a1,b2`; defaults to the nearest reference cell.
    #[arg(long, value_name = "A1,B2", allow_hyphen_values = true, value_parser = parse_guess)]
    pub guess: Option<SeedCoeffs>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub cell: CellArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = monopole::reference::GRID_EPSILON)]
    pub eps: Vec<f64>,
    /// Comma-separated lambda values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = monopole::reference::GRID_LAMBDA)]
    pub lam: Vec<f64>,
    /// Compare against a CSV with `epsilon,lambda,a1,b2` columns.
    #[arg(long, value_name = "PATH")]
    pub check: Option<PathBuf>,
    /// Largest acceptable coefficient difference in `--check` mode.
    #[arg(long, default_value_t = 1e-4)]
    pub check_tol: f64,
    #[arg(long, value_enum, default_value_t = OrderArg::Forward)]
    pub order: OrderArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub cell: CellArgs,
    /// Number of rows, evenly spaced along the profile (default: every point).
    #[arg(long, value_name = "N")]
    pub sample: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(short, long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(short, long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(short, long, allow_negative_numbers = true)]
    pub r: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Recursion against the closed-form coefficients.
    #[arg(long)]
    pub series: bool,
    /// Empirical RK4 order.
    #[arg(long)]
    pub order: bool,
    /// Reference-table regression.
    #[arg(long)]
    pub table: bool,
    /// Series/integrator handoff overlap.
    #[arg(long)]
    pub overlap: bool,
    /// Action invariance under both symmetries.
    #[arg(long)]
    pub symmetry: bool,
    /// Interior ODE residual of the grid solutions.
    #[arg(long)]
    pub residual: bool,
    #[command(flatten)]
    pub common: Common,
}

impl VerifyArgs {
    pub fn none_selected(&self) -> bool {
        !(self.series || self.order || self.table || self.overlap || self.symmetry || self.residual)
    }
}

fn parse_guess(s: &str) -> Result<SeedCoeffs, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a1, b2] = parts.as_slice() else {
        return Err(format!("expected `a1,b2`, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    SeedCoeffs::new(num(a1)?, num(b2)?).map_err(|e| e.to_string())
}
