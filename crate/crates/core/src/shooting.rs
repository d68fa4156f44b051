//! Shooting from the origin: the boundary map `(a1, b2) -> (gamma(1), phi(1))`,
//! its finite-difference Jacobian and a damped Newton iteration onto the
//! boundary values `(-1/2, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::integrator::{integrate_array, march, IntegratorConfig};
use crate::model::{action, el_residual, OdeState, Params, Profile};
use crate::reference::reference_table;
use crate::series::{check_order, compute_coeffs, SeedCoeffs, TaylorSeries, DEFAULT_ORDER};

/// Boundary values `(gamma(1), phi(1))` targeted by the solver.
pub const TARGET: (f64, f64) = (-0.5, 1.0);
/// Guess returned by [`default_guess`] when no reference cell applies.
pub const FALLBACK_GUESS: SeedCoeffs = SeedCoeffs { a1: 1.6, b2: -1.0 };
/// Jacobians with a larger condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    /// Step-length multiplier applied after each rejected trial.
    pub factor: f64,
    pub max_halvings: usize,
}

impl Default for Damping {
    fn default() -> Self {
        Damping {
            factor: 0.5,
            max_halvings: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Radius where the series hands over to the integrator.
    pub r_match: f64,
    /// Radius where the boundary values are imposed. The returned profile
    /// always extends to `r = 1`.
    pub r_outer: f64,
    pub series_order: usize,
    pub integrator: IntegratorConfig,
    /// Convergence threshold on the infinity norm of the boundary residual.
    pub newton_tol: f64,
    pub max_iters: usize,
    /// Relative finite-difference step, scaled by `max(1, |coefficient|)`.
    pub fd_step: f64,
    pub damping: Damping,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            r_match: 0.01,
            r_outer: 1.0,
            series_order: DEFAULT_ORDER,
            integrator: IntegratorConfig::default(),
            newton_tol: 1e-10,
            max_iters: 50,
            fd_step: 1e-6,
            damping: Damping::default(),
        }
    }
}

/// Outer radius of a 10,000-point lattice with spacing `1e-4` starting at the
/// origin. See [`ShootingConfig::reference_lattice`].
pub const LATTICE_OUTER_RADIUS: f64 = 0.9999;

impl ShootingConfig {
    /// Defaults, but with the boundary values imposed at
    /// [`LATTICE_OUTER_RADIUS`] instead of `r = 1`. This is the convention the
    /// bundled reference table was computed under; with it every reference
    /// cell is reproduced to better than `1e-6`.
    pub fn reference_lattice() -> Self {
        ShootingConfig {
            r_outer: LATTICE_OUTER_RADIUS,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_match > 0.0 && self.r_match <= 0.1) {
            return Err(MonopoleError::Config(format!(
                "r_match must lie in (0, 0.1], got {}",
                self.r_match
            )));
        }
        if !(self.r_outer > self.r_match && self.r_outer <= 1.0) {
            return Err(MonopoleError::Config(format!(
                "r_outer must lie in (r_match, 1], got {}",
                self.r_outer
            )));
        }
        check_order(self.series_order)?;
        self.integrator.validate()?;
        if !(self.newton_tol > 0.0) {
            return Err(MonopoleError::Config("newton_tol must be > 0".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(MonopoleError::Config("fd_step must be > 0".into()));
        }
        if self.max_iters == 0 {
            return Err(MonopoleError::Config("max_iters must be >= 1".into()));
        }
        if !(self.damping.factor > 0.0 && self.damping.factor < 1.0) {
            return Err(MonopoleError::Config(
                "damping factor must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// A converged monopole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub seed: SeedCoeffs,
    pub params: Params,
    /// `(gamma + 1/2, phi - 1)` at `r_outer`
    pub residual: [f64; 2],
    pub iterations: usize,
    /// Series segment on `[0, r_match]` followed by the integrated segment.
    pub profile: Profile,
    pub action_value: f64,
    pub el_residual_max: f64,
    /// Infinity norm of the boundary residual before each Newton step and at exit.
    pub residual_history: Vec<f64>,
    pub config: ShootingConfig,
}

impl SolveResult {
    pub fn residual_inf(&self) -> f64 {
        self.residual[0].abs().max(self.residual[1].abs())
    }
}

fn map_failure(seed: SeedCoeffs, err: MonopoleError) -> MonopoleError {
    match err {
        MonopoleError::SeriesBlowUp { .. } => MonopoleError::MapFailure {
            seed,
            r: 0.0,
            reason: err.to_string(),
        },
        MonopoleError::Divergence { r, .. } => MonopoleError::MapFailure {
            seed,
            r,
            reason: "integration diverged".into(),
        },
        other => other,
    }
}

fn handoff(seed: SeedCoeffs, params: &Params, config: &ShootingConfig) -> Result<TaylorSeries> {
    compute_coeffs(seed, *params, config.series_order).map_err(|e| map_failure(seed, e))
}

/// `(gamma, phi)` at `r_outer` (normally 1) for the seed: series to
/// `r_match`, then RK4 over `n_steps` uniform steps.
pub fn boundary_map(
    seed: SeedCoeffs,
    params: &Params,
    config: &ShootingConfig,
) -> Result<(f64, f64)> {
    config.validate()?;
    boundary_map_unchecked(seed, params, config)
}

fn boundary_map_unchecked(
    seed: SeedCoeffs,
    params: &Params,
    config: &ShootingConfig,
) -> Result<(f64, f64)> {
    let series = handoff(seed, params, config)?;
    let start = series.eval_array(config.r_match);
    let end = march(
        config.r_match,
        start,
        config.r_outer,
        config.integrator.n_steps,
        params,
        |_, _| {},
    )
    .map_err(|e| map_failure(seed, e))?;
    Ok((end[0], end[2]))
}

fn residual_of(values: (f64, f64)) -> [f64; 2] {
    [values.0 - TARGET.0, values.1 - TARGET.1]
}

fn norm_inf(v: &[f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

fn norm2(v: &[f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// 2 x 2 Jacobian of the boundary map; rows `(gamma(1), phi(1))`, columns
/// `(d/da1, d/db2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian(pub [[f64; 2]; 2]);

impl Jacobian {
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `||J||_inf * ||J^-1||_inf`, infinite when singular.
    pub fn condition(&self) -> f64 {
        let m = &self.0;
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return f64::INFINITY;
        }
        let norm =
            |a: [[f64; 2]; 2]| (a[0][0].abs() + a[0][1].abs()).max(a[1][0].abs() + a[1][1].abs());
        let inv = [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ];
        norm(*m) * norm(inv)
    }

    /// Solves `J x = b` by Cramer's rule.
    pub fn solve(&self, b: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        let det = self.det();
        [
            (b[0] * m[1][1] - m[0][1] * b[1]) / det,
            (m[0][0] * b[1] - b[0] * m[1][0]) / det,
        ]
    }
}

/// Central finite differences with step `fd_step * max(1, |coefficient|)`.
pub fn jacobian_fd(seed: SeedCoeffs, params: &Params, config: &ShootingConfig) -> Result<Jacobian> {
    config.validate()?;
    jacobian_unchecked(seed, params, config)
}

fn jacobian_unchecked(
    seed: SeedCoeffs,
    params: &Params,
    config: &ShootingConfig,
) -> Result<Jacobian> {
    let x = seed.to_array();
    let mut cols = [[0.0; 2]; 2];
    for (j, col) in cols.iter_mut().enumerate() {
        let h = config.fd_step * x[j].abs().max(1.0);
        let probe = |sign: f64| {
            let mut y = x;
            y[j] += sign * h;
            boundary_map_unchecked(SeedCoeffs { a1: y[0], b2: y[1] }, params, config)
        };
        let plus = probe(1.0)?;
        let minus = probe(-1.0)?;
        *col = [
            (plus.0 - minus.0) / (2.0 * h),
            (plus.1 - minus.1) / (2.0 * h),
        ];
    }
    let jac = Jacobian([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]);
    let condition = jac.condition();
    if !(condition <= MAX_CONDITION) {
        return Err(MonopoleError::NearSingular {
            condition,
            jacobian: jac.0,
        });
    }
    Ok(jac)
}

/// Damped Newton iteration on `F(a1, b2) = (gamma(1) + 1/2, phi(1) - 1)`.
pub fn newton_solve(
    params: &Params,
    guess: SeedCoeffs,
    config: &ShootingConfig,
) -> Result<SolveResult> {
    config.validate()?;
    let mut seed = guess;
    let mut f = residual_of(boundary_map_unchecked(seed, params, config)?);
    let mut history = vec![norm_inf(&f)];

    let mut iterations = 0;
    while norm_inf(&f) > config.newton_tol {
        if iterations == config.max_iters {
            return Err(MonopoleError::NonConvergence {
                best: seed,
                residual: norm_inf(&f),
                iterations,
            });
        }
        let jac = jacobian_unchecked(seed, params, config).map_err(|e| {
            MonopoleError::NewtonDivergence {
                best: seed,
                iterations,
                reason: e.to_string(),
            }
        })?;
        let delta = jac.solve([-f[0], -f[1]]);
        let current = norm2(&f);

        let mut t = 1.0;
        let mut accepted = None;
        let mut map_failures = 0;
        for _ in 0..=config.damping.max_halvings {
            let trial = SeedCoeffs {
                a1: seed.a1 + t * delta[0],
                b2: seed.b2 + t * delta[1],
            };
            match boundary_map_unchecked(trial, params, config) {
                Ok(values) => {
                    let ft = residual_of(values);
                    if norm2(&ft) < current {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                Err(_) => map_failures += 1,
            }
            t *= config.damping.factor;
        }

        iterations += 1;
        match accepted {
            Some((trial, ft)) => {
                seed = trial;
                f = ft;
                history.push(norm_inf(&f));
            }
            None if map_failures > 0 => {
                return Err(MonopoleError::NewtonDivergence {
                    best: seed,
                    iterations,
                    reason: format!(
                        "{map_failures} of {} damped trials failed to integrate",
                        config.damping.max_halvings + 1
                    ),
                })
            }
            None => {
                return Err(MonopoleError::NonConvergence {
                    best: seed,
                    residual: norm_inf(&f),
                    iterations,
                })
            }
        }
    }

    let (profile, series) = solution_profile(seed, params, config)?;
    let tail = integrated_segment(&series, params, config)?;
    let action_value = action(&tail, &series)?;
    let el_residual_max = el_residual(&profile, params)?;
    Ok(SolveResult {
        seed,
        params: *params,
        residual: f,
        iterations,
        profile,
        action_value,
        el_residual_max,
        residual_history: history,
        config: *config,
    })
}

fn integrated_segment(
    series: &TaylorSeries,
    params: &Params,
    config: &ShootingConfig,
) -> Result<Profile> {
    let seed = series.seed();
    let start = series.eval_array(config.r_match);
    let inner = integrate_array(
        config.r_match,
        start,
        config.r_outer,
        &config.integrator,
        params,
    )
    .map_err(|e| map_failure(seed, e))?;
    if config.r_outer == 1.0 {
        return Ok(inner);
    }
    // continue past the boundary radius with (at most) the same step size
    let h = (config.r_outer - config.r_match) / config.integrator.n_steps as f64;
    let n = ((1.0 - config.r_outer) / h).ceil().max(1.0) as usize;
    let last = inner.last();
    let mut states = Vec::with_capacity(n + 1);
    march(last.r, last.to_array(), 1.0, n, params, |_, s| {
        states.push(*s)
    })
    .map_err(|e| map_failure(seed, e))?;
    inner.concat(&Profile::new(*params, states)?)
}

/// The full trajectory on `[0, 1]` for a seed: series samples on
/// `[0, r_match]` spaced like the recorded integrator grid, then the
/// integrated segment.
pub fn solution_profile(
    seed: SeedCoeffs,
    params: &Params,
    config: &ShootingConfig,
) -> Result<(Profile, TaylorSeries)> {
    config.validate()?;
    let series = handoff(seed, params, config)?;
    let tail = integrated_segment(&series, params, config)?;

    let rm = config.r_match;
    let spacing = (config.r_outer - rm) / config.integrator.n_steps as f64
        * config.integrator.record_every as f64;
    let mut head: Vec<OdeState> = vec![series.eval(rm)];
    let mut k = 1;
    loop {
        let r = rm - k as f64 * spacing;
        if r < 0.5 * spacing {
            break;
        }
        head.push(series.eval(r));
        k += 1;
    }
    head.push(series.eval(0.0));
    head.reverse();
    let head = Profile::new(*params, head)?;
    Ok((head.concat(&tail)?, series))
}

/// Largest change of `(gamma(1), phi(1))` when the series handoff moves
/// from the result's `r_match` to `r_alt`.
pub fn overlap_check(result: &SolveResult, r_alt: f64) -> Result<f64> {
    let config = result.config;
    if !(r_alt > 0.0 && r_alt <= config.r_match) {
        return Err(MonopoleError::Config(format!(
            "r_alt must lie in (0, {}], got {r_alt}",
            config.r_match
        )));
    }
    let alt = ShootingConfig {
        r_match: r_alt,
        ..config
    };
    let a = boundary_map(result.seed, &result.params, &config)?;
    let b = boundary_map(result.seed, &result.params, &alt)?;
    Ok((a.0 - b.0).abs().max((a.1 - b.1).abs()))
}

/// Nearest reference cell in `(ln epsilon, ln(1 + lambda))`.
pub fn default_guess(params: &Params) -> SeedCoeffs {
    let x = params.epsilon().ln();
    let y = params.lambda().ln_1p();
    reference_table()
        .iter()
        .map(|row| {
            let d = (row.epsilon.ln() - x).hypot(row.lambda.ln_1p() - y);
            (d, row)
        })
        .filter(|(d, _)| d.is_finite())
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, row)| SeedCoeffs {
            a1: row.a1,
            b2: row.b2,
        })
        .unwrap_or(FALLBACK_GUESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(e: f64, l: f64) -> Params {
        Params::new(e, l).unwrap()
    }

    fn seed(a1: f64, b2: f64) -> SeedCoeffs {
        SeedCoeffs::new(a1, b2).unwrap()
    }

    #[test]
    fn zero_seed_maps_to_zero() {
        let cfg = ShootingConfig::default();
        let (g, f) = boundary_map(seed(0.0, 0.0), &params(1.0, 3.0), &cfg).unwrap();
        assert_eq!((g, f), (0.0, 0.0));
    }

    #[test]
    fn map_is_deterministic() {
        let cfg = ShootingConfig::default();
        let p = params(0.3, 10.0);
        let s = seed(3.59550462, -2.86817001);
        let a = boundary_map(s, &p, &cfg).unwrap();
        let b = boundary_map(s, &p, &cfg).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn wild_seed_fails_cleanly() {
        let cfg = ShootingConfig::default();
        let err = boundary_map(seed(60.0, 40.0), &params(0.1, 30.0), &cfg).unwrap_err();
        assert!(matches!(err, MonopoleError::MapFailure { .. }), "{err:?}");
    }

    #[test]
    fn config_validation() {
        let p = params(1.0, 0.0);
        let s = seed(1.6, -1.0);
        let mut cfg = ShootingConfig {
            r_match: 0.0,
            ..Default::default()
        };
        assert!(boundary_map(s, &p, &cfg).is_err());
        cfg.r_match = 0.2;
        assert!(boundary_map(s, &p, &cfg).is_err());
        cfg = ShootingConfig {
            series_order: 7,
            ..Default::default()
        };
        assert!(boundary_map(s, &p, &cfg).is_err());
        cfg = ShootingConfig {
            newton_tol: 0.0,
            ..Default::default()
        };
        assert!(newton_solve(&p, s, &cfg).is_err());
    }

    #[test]
    fn jacobian_parity_at_zero_seed() {
        let cfg = ShootingConfig::default();
        let j = jacobian_fd(seed(0.0, 0.0), &params(1.0, 0.0), &cfg).unwrap();
        // gamma(1) is even in a1 and phi(1) stays zero when a1 = 0
        assert_eq!(j.0[0][0], 0.0);
        assert_eq!(j.0[1][1], 0.0);
        assert!(j.0[0][1].abs() > 0.1 && j.0[1][0].abs() > 0.1);
    }

    #[test]
    fn jacobian_linear_algebra() {
        let j = Jacobian([[2.0, 1.0], [1.0, 3.0]]);
        assert_eq!(j.det(), 5.0);
        let x = j.solve([3.0, 4.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert_eq!(
            Jacobian([[1.0, 2.0], [2.0, 4.0]]).condition(),
            f64::INFINITY
        );
    }

    #[test]
    fn default_guess_rule() {
        assert_eq!(
            default_guess(&params(1.0, 0.0)),
            seed(1.67098122, -1.02894746)
        );
        assert_eq!(
            default_guess(&params(100.0, 0.0)),
            seed(1.53622287, -0.73146686)
        );
        // ln 0.2 is nearer ln 0.3; ln 6 is nearer ln 4
        assert_eq!(
            default_guess(&params(0.2, 5.0)),
            seed(2.66517994, -2.31673622)
        );
    }

    #[test]
    fn overlap_at_same_radius_is_zero() {
        let p = params(1.0, 0.0);
        let cfg = ShootingConfig::default();
        let res = newton_solve(&p, default_guess(&p), &cfg).unwrap();
        assert_eq!(overlap_check(&res, cfg.r_match).unwrap(), 0.0);
        assert!(overlap_check(&res, 0.02).is_err());
        assert!(overlap_check(&res, 0.0).is_err());
    }

    #[test]
    fn full_profile_layout() {
        let p = params(1.0, 0.0);
        let cfg = ShootingConfig::default();
        let (prof, series) = solution_profile(seed(1.67, -1.03), &p, &cfg).unwrap();
        assert_eq!(prof.first().r, 0.0);
        assert_eq!(prof.first().dphi, 1.67);
        assert_eq!(prof.last().r, 1.0);
        assert_eq!(series.order(), cfg.series_order);
        // the integrated segment keeps its exact grid
        let h = 0.99 / 10_000.0;
        let i = prof.radii().iter().position(|&r| r == 0.01).unwrap();
        assert!((prof.radii()[i + 7] - (0.01 + 7.0 * h)).abs() < 1e-17);
        assert!((prof.radii()[i - 1] - (0.01 - h)).abs() < 1e-17);
    }

    #[test]
    fn inner_boundary_radius() {
        let p = params(1.0, 0.0);
        let cfg = ShootingConfig::reference_lattice();
        let res = newton_solve(&p, default_guess(&p), &cfg).unwrap();
        let prof = &res.profile;
        assert_eq!(prof.last().r, 1.0);
        let at = prof
            .states()
            .iter()
            .find(|s| s.r == LATTICE_OUTER_RADIUS)
            .unwrap();
        assert!((at.gamma() + 0.5).abs() <= cfg.newton_tol);
        assert!((at.phi - 1.0).abs() <= cfg.newton_tol);
        assert!(prof.radii()[1..].windows(2).all(|w| w[1] - w[0] <= 1e-4));

        let bad = ShootingConfig {
            r_outer: 0.005,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ShootingConfig {
            r_outer: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
