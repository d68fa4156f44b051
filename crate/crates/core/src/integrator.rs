//! Fixed-step classical Runge-Kutta integration away from the origin.

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::model::{rhs_unchecked, OdeState, Params, Profile};

pub const DEFAULT_STEPS: usize = 10_000;
pub const MIN_STEPS: usize = 10;
/// Any state component beyond this magnitude counts as a blow-up.
pub const DIVERGENCE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Number of uniform steps between the start radius and the end radius.
    pub n_steps: usize,
    /// Keep every `record_every`-th state in the returned profile.
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            n_steps: DEFAULT_STEPS,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn new(n_steps: usize, record_every: usize) -> Result<Self> {
        let c = IntegratorConfig {
            n_steps,
            record_every,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < MIN_STEPS {
            return Err(MonopoleError::Config(format!(
                "n_steps must be >= {MIN_STEPS}, got {}",
                self.n_steps
            )));
        }
        if self.record_every == 0 {
            return Err(MonopoleError::Config("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[inline]
fn rk4(r: f64, y: &[f64; 4], h: f64, params: &Params) -> [f64; 4] {
    let add = |y: &[f64; 4], k: &[f64; 4], s: f64| {
        [
            y[0] + s * k[0],
            y[1] + s * k[1],
            y[2] + s * k[2],
            y[3] + s * k[3],
        ]
    };
    let k1 = rhs_unchecked(r, y, params);
    let k2 = rhs_unchecked(r + 0.5 * h, &add(y, &k1, 0.5 * h), params);
    let k3 = rhs_unchecked(r + 0.5 * h, &add(y, &k2, 0.5 * h), params);
    let k4 = rhs_unchecked(r + h, &add(y, &k3, h), params);
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn healthy(y: &[f64; 4]) -> bool {
    y.iter().all(|v| v.abs() <= DIVERGENCE_LIMIT)
}

/// One classical RK4 step of size `h`.
pub fn step(state: &OdeState, h: f64, params: &Params) -> Result<OdeState> {
    if !(state.r > 0.0) {
        return Err(MonopoleError::Domain { r: state.r });
    }
    if !(h > 0.0) || state.r + h > 1.0 + h * 1e-9 {
        return Err(MonopoleError::Config(format!(
            "step of size {h} from r = {} leaves the interval (0, 1]",
            state.r
        )));
    }
    let y = rk4(state.r, &state.to_array(), h, params);
    if !healthy(&y) {
        return Err(MonopoleError::Divergence {
            r: state.r + h,
            partial: vec![*state],
        });
    }
    Ok(OdeState::from_array(state.r + h, y))
}

/// Steps from `start.r` to `r_end` in `n_steps` uniform steps, calling
/// `visit(i, state)` for every state including the start (`i = 0`). Radii are
/// formed as `start.r + i h` and the last one is set to `r_end` exactly.
///
/// The state is carried as a full-precision `(gamma, gamma', phi, phi')`
/// array; `visit` receives the stored form. Returns the final array.
pub(crate) fn march(
    r0: f64,
    y0: [f64; 4],
    r_end: f64,
    n_steps: usize,
    params: &Params,
    mut visit: impl FnMut(usize, &OdeState),
) -> Result<[f64; 4]> {
    if !(r0 > 0.0) {
        return Err(MonopoleError::Domain { r: r0 });
    }
    if !(r0 < r_end && r_end <= 1.0) {
        return Err(MonopoleError::Config(format!(
            "integration interval [{r0}, {r_end}] must satisfy 0 < start < end <= 1"
        )));
    }
    let h = (r_end - r0) / n_steps as f64;
    let mut y = y0;
    let mut r = r0;
    visit(0, &OdeState::from_array(r0, y0));
    for i in 1..=n_steps {
        y = rk4(r, &y, h, params);
        r = if i == n_steps {
            r_end
        } else {
            r0 + i as f64 * h
        };
        if !healthy(&y) {
            return Err(MonopoleError::Divergence {
                r,
                partial: Vec::new(),
            });
        }
        visit(i, &OdeState::from_array(r, y));
    }
    Ok(y)
}

/// Integrates from `start` to `r_end`, recording every `record_every`-th
/// state plus both endpoints.
pub fn integrate(
    start: &OdeState,
    r_end: f64,
    config: &IntegratorConfig,
    params: &Params,
) -> Result<Profile> {
    integrate_array(start.r, start.to_array(), r_end, config, params)
}

pub(crate) fn integrate_array(
    r0: f64,
    y0: [f64; 4],
    r_end: f64,
    config: &IntegratorConfig,
    params: &Params,
) -> Result<Profile> {
    config.validate()?;
    let n = config.n_steps;
    let every = config.record_every;
    let mut states = Vec::with_capacity(n / every + 2);
    let outcome = march(r0, y0, r_end, n, params, |i, s| {
        if i % every == 0 || i == n {
            states.push(*s);
        }
    });
    match outcome {
        Ok(_) => Profile::new(*params, states),
        Err(MonopoleError::Divergence { r, .. }) => {
            Err(MonopoleError::Divergence { r, partial: states })
        }
        Err(e) => Err(e),
    }
}

/// Result of an empirical convergence-order measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrderEstimate {
    /// `log2` of the ratio of successive endpoint differences.
    Order(f64),
    /// The scheme reproduced the solution exactly at every resolution.
    Exact,
}

impl OrderEstimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            OrderEstimate::Order(p) => Some(*p),
            OrderEstimate::Exact => None,
        }
    }
}

/// Base resolution used by [`estimate_order`].
pub const ORDER_BASE_STEPS: usize = 40;

/// Richardson order estimate from integrating `start` to `r = 1` with
/// `n`, `2n` and `4n` steps (`n` = [`ORDER_BASE_STEPS`]).
pub fn estimate_order(params: &Params, start: &OdeState) -> Result<OrderEstimate> {
    estimate_order_with(params, start, ORDER_BASE_STEPS)
}

pub fn estimate_order_with(
    params: &Params,
    start: &OdeState,
    base_steps: usize,
) -> Result<OrderEstimate> {
    let end = |n: usize| march(start.r, start.to_array(), 1.0, n, params, |_, _| {});
    let coarse = end(base_steps)?;
    let mid = end(2 * base_steps)?;
    let fine = end(4 * base_steps)?;
    let dist = |a: [f64; 4], b: [f64; 4]| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let e1 = dist(coarse, mid);
    let e2 = dist(mid, fine);
    if e1 == 0.0 && e2 == 0.0 {
        return Ok(OrderEstimate::Exact);
    }
    Ok(OrderEstimate::Order((e1 / e2).log2()))
}
