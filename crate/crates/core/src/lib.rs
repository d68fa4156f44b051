//! Spherically symmetric Yang-Mills-Higgs monopoles on the unit ball.
//!
//! Under spherical symmetry the Yang-Mills-Higgs equations reduce to a
//! pair of radial ODEs for a gauge profile `gamma(r)` and a Higgs profile
//! `phi(r)` on `0 < r <= 1`, with a regular singular point at the origin and
//! boundary values `gamma(1) = -1/2`, `phi(1) = 1`. Solutions are found by
//! shooting:
//!
//! 1. [`series`] expands the solution at `r = 0` from the two free
//!    coefficients `(a1, b2)`;
//! 2. [`integrator`] continues it from the handoff radius to `r = 1` with
//!    fixed-step RK4;
//! 3. [`shooting`] runs damped Newton on `(a1, b2)` until the boundary
//!    values are hit, and [`sweep`] chains solves across parameter grids.
//!
//! ```no_run
//! use monopole::{newton_solve, default_guess, Params, ShootingConfig};
//!
//! let params = Params::new(1.0, 0.0)?;
//! let result = newton_solve(&params, default_guess(&params), &ShootingConfig::default())?;
//! println!("a1 = {}, b2 = {}", result.seed.a1, result.seed.b2);
//! # Ok::<(), monopole::MonopoleError>(())
//! ```

pub mod error;
pub mod integrator;
pub mod model;
pub mod quadrature;
pub mod reference;
pub mod series;
pub mod shooting;
pub mod stability;
pub mod sweep;

pub use error::{MonopoleError, Result};
pub use integrator::{estimate_order, integrate, step, IntegratorConfig, OrderEstimate};
pub use model::{
    action, apply_gauge_flip, apply_phi_flip, el_residual, el_residual_within, rhs, OdeState,
    Params, Profile,
};
pub use series::{compute_coeffs, verify_against_closed_forms, SeedCoeffs, TaylorSeries};
pub use shooting::{
    boundary_map, default_guess, jacobian_fd, newton_solve, overlap_check, solution_profile,
    ShootingConfig, SolveResult, LATTICE_OUTER_RADIUS,
};
pub use stability::{classify_stability, length_scales, FixedPointId, StabilityReport};
pub use sweep::{continuation_sweep, sweep_row, CellOutcome, SweepCell, SweepOrder};
