//! Power-series expansion of the profiles at the regular singular point `r = 0`.
//!
//! Bounded solutions are odd in `phi` and even in `gamma`:
//!
//! ```text
//! phi(r)   = a1 r + a3 r^3 + a5 r^5 + ...
//! gamma(r) = b2 r^2 + b4 r^4 + ...
//! ```
//!
//! The leading pair `(a1, b2)` is free. Every higher coefficient follows
//! from matching powers of `r` in
//!
//! ```text
//! phi'' + 2 phi'/r - 2 phi/r^2 = 8 phi (gamma + gamma^2)/r^2 + 2 lambda phi (phi^2 - 1)
//! gamma'' - 2 gamma/r^2        = (2/eps) phi^2 (1 + 2 gamma) + (2/r^2)(2 gamma^3 + 3 gamma^2)
//! ```
//!
//! which gives `(n+2)(n-1) a_n` (n odd) and `(n-2)(n+1) b_n` (n even) in
//! terms of lower coefficients. Products are formed as Cauchy convolutions.

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::model::{OdeState, Params};

pub const DEFAULT_ORDER: usize = 10;
pub const MAX_ORDER: usize = 64;
/// Coefficients larger than this abort [`compute_coeffs`].
pub const BLOW_UP_LIMIT: f64 = 1e12;

/// The free leading coefficients `phi ~ a1 r`, `gamma ~ b2 r^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedCoeffs {
    pub a1: f64,
    pub b2: f64,
}

impl SeedCoeffs {
    pub fn new(a1: f64, b2: f64) -> Result<Self> {
        if !(a1.is_finite() && b2.is_finite()) {
            return Err(MonopoleError::InvalidParams(format!(
                "seed coefficients must be finite, got ({a1}, {b2})"
            )));
        }
        Ok(SeedCoeffs { a1, b2 })
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.a1, self.b2]
    }
}

/// Truncated expansion through `r^order`: `phi` keeps the odd powers
/// `1, 3, ..., order - 1` and `gamma` the even powers `2, 4, ..., order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    params: Params,
    seed: SeedCoeffs,
    order: usize,
    /// `a[k]` multiplies `r^(2k+1)`.
    a: Vec<f64>,
    /// `b[k]` multiplies `r^(2k+2)`.
    b: Vec<f64>,
}

impl TaylorSeries {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn seed(&self) -> SeedCoeffs {
        self.seed
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Odd coefficients `a1, a3, ...`.
    pub fn phi_coeffs(&self) -> &[f64] {
        &self.a
    }

    /// Even coefficients `b2, b4, ...`.
    pub fn gamma_coeffs(&self) -> &[f64] {
        &self.b
    }

    /// Coefficient of `r^n` in `phi` (odd `n`) or `gamma` (even `n`); zero
    /// beyond the truncation order.
    pub fn coeff(&self, n: usize) -> f64 {
        match n {
            0 => 0.0,
            n if n % 2 == 1 => self.a.get(n / 2).copied().unwrap_or(0.0),
            n => self.b.get(n / 2 - 1).copied().unwrap_or(0.0),
        }
    }

    /// Term-wise evaluation of `(gamma, gamma', phi, phi')` at `r`.
    pub fn eval(&self, r: f64) -> OdeState {
        OdeState::from_array(r, self.eval_array(r))
    }

    /// As [`eval`](Self::eval), keeping `gamma` at full relative precision.
    pub fn eval_array(&self, r: f64) -> [f64; 4] {
        let r2 = r * r;
        // phi = r * sum a_k r^{2k}, phi' = sum (2k+1) a_k r^{2k}
        let mut phi = 0.0;
        let mut dphi = 0.0;
        for (k, &ak) in self.a.iter().enumerate().rev() {
            phi = phi * r2 + ak;
            dphi = dphi * r2 + (2 * k + 1) as f64 * ak;
        }
        // gamma = r^2 * sum b_k r^{2k}, gamma' = r * sum (2k+2) b_k r^{2k}
        let mut gamma = 0.0;
        let mut dgamma = 0.0;
        for (k, &bk) in self.b.iter().enumerate().rev() {
            gamma = gamma * r2 + bk;
            dgamma = dgamma * r2 + (2 * k + 2) as f64 * bk;
        }
        // `+ 0.0` turns the -0.0 of a negative coefficient times r = 0 into 0.0
        [gamma * r2 + 0.0, dgamma * r + 0.0, phi * r + 0.0, dphi]
    }
}

/// Computes the expansion through `r^order` from the seed.
///
/// `order` must be even and in `2..=64`. Fails if any coefficient exceeds
/// [`BLOW_UP_LIMIT`] in magnitude.
pub fn compute_coeffs(seed: SeedCoeffs, params: Params, order: usize) -> Result<TaylorSeries> {
    check_order(order)?;
    let dense = recurse(seed, &params, order);
    if let Some((power, &value)) = dense
        .iter()
        .enumerate()
        .find(|(_, c)| !(c.abs() <= BLOW_UP_LIMIT))
    {
        return Err(MonopoleError::SeriesBlowUp { power, value });
    }
    Ok(from_dense(seed, params, order, &dense))
}

pub fn check_order(order: usize) -> Result<()> {
    if !order.is_multiple_of(2) || !(2..=MAX_ORDER).contains(&order) {
        return Err(MonopoleError::Config(format!(
            "series order must be even and in 2..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(())
}

fn from_dense(seed: SeedCoeffs, params: Params, order: usize, dense: &[f64]) -> TaylorSeries {
    let a = (1..order).step_by(2).map(|n| dense[n]).collect();
    let b = (2..=order).step_by(2).map(|n| dense[n]).collect();
    TaylorSeries {
        params,
        seed,
        order,
        a,
        b,
    }
}

/// `sum_{j=0}^{m} x[j] y[m-j]`
fn cauchy(x: &[f64], y: &[f64], m: usize) -> f64 {
    (0..=m).map(|j| x[j] * y[m - j]).sum()
}

/// Coefficient of `r^m` in `x * y * z`.
fn cauchy3(x: &[f64], y: &[f64], z: &[f64], m: usize) -> f64 {
    (0..=m).map(|i| x[i] * cauchy(y, z, m - i)).sum()
}

/// Dense coefficient vector `c[n]` of `r^n` for `n <= order`; odd entries
/// belong to `phi`, even entries to `gamma`. No blow-up guard.
pub(crate) fn recurse(seed: SeedCoeffs, params: &Params, order: usize) -> Vec<f64> {
    let len = order + 1;
    let mut phi = vec![0.0; len];
    let mut gamma = vec![0.0; len];
    phi[1] = seed.a1;
    if order >= 2 {
        gamma[2] = seed.b2;
    }
    let inv_eps = 1.0 / params.epsilon();
    let lambda = params.lambda();

    for n in 3..=order {
        if n % 2 == 1 {
            // coefficient of r^{n-2} in the phi equation
            let m = n - 2;
            let rhs = 8.0 * (cauchy(&phi, &gamma, n) + cauchy3(&phi, &gamma, &gamma, n))
                + 2.0 * lambda * (cauchy3(&phi, &phi, &phi, m) - phi[m]);
            phi[n] = rhs / ((n + 2) * (n - 1)) as f64;
        } else {
            // coefficient of r^{n-2} in the gamma equation
            let m = n - 2;
            let rhs = 2.0
                * inv_eps
                * (cauchy(&phi, &phi, m) + 2.0 * cauchy3(&phi, &phi, &gamma, m))
                + 2.0
                    * (2.0 * cauchy3(&gamma, &gamma, &gamma, n) + 3.0 * cauchy(&gamma, &gamma, n));
            gamma[n] = rhs / ((n - 2) * (n + 1)) as f64;
        }
    }

    (0..len)
        .map(|n| if n % 2 == 1 { phi[n] } else { gamma[n] })
        .collect()
}

/// Hard-coded closed forms for `a3, b4, a5, b6, a7, b8, a9, b10`, indexed by power.
pub fn closed_form_coeffs(seed: SeedCoeffs, params: &Params) -> [f64; 11] {
    let (a1, b2) = (seed.a1, seed.b2);
    let l = params.lambda();
    let ie = 1.0 / params.epsilon();

    let a3 = (4.0 * a1 * b2 - l * a1) / 5.0;
    let b4 = (3.0 * b2 * b2 + ie * a1 * a1) / 5.0;
    let a5 = (4.0 * a1 * b4 + 4.0 * a3 * b2 + 4.0 * a1 * b2 * b2 + l * (a1 * a1 * a1 - a3)) / 14.0;
    let b6 = (b2 * b2 * b2 + 3.0 * b2 * b4 + ie * (a1 * a3 + a1 * a1 * b2)) / 7.0;
    let a7 = (4.0 * (a1 * b6 + a3 * b4 + a5 * b2 + a3 * b2 * b2 + 2.0 * a1 * b2 * b4)
        + l * (3.0 * a1 * a1 * a3 - a5))
        / 27.0;
    let b8 = (3.0 * (2.0 * b2 * b2 * b4 + b4 * b4 + 2.0 * b2 * b6)
        + ie * (a3 * a3 + 2.0 * a1 * a5 + 2.0 * a1 * a1 * b4 + 4.0 * a1 * a3 * b2))
        / 27.0;
    let a9 = (4.0
        * (a1 * b8
            + a3 * b6
            + a5 * b4
            + a7 * b2
            + a5 * b2 * b2
            + 2.0 * a3 * b2 * b4
            + a1 * b4 * b4
            + 2.0 * a1 * b2 * b6)
        + l * (3.0 * a1 * a1 * a5 + 3.0 * a1 * a3 * a3 - a7))
        / 44.0;
    let b10 = (3.0 * (b2 * b2 * b6 + b2 * b4 * b4 + b2 * b8 + b4 * b6)
        + ie * (a1 * a7
            + a3 * a5
            + a1 * a1 * b6
            + a3 * a3 * b2
            + 2.0 * a1 * a3 * b4
            + 2.0 * a1 * a5 * b2))
        / 22.0;

    [0.0, a1, b2, a3, b4, a5, b6, a7, b8, a9, b10]
}

/// Maximum relative deviation between the generic recursion and the closed
/// forms over `a3 ... b10`. Entries where the closed form is exactly zero are
/// compared in absolute terms.
pub fn verify_against_closed_forms(seed: SeedCoeffs, params: &Params) -> f64 {
    let generic = recurse(seed, params, 10);
    let closed = closed_form_coeffs(seed, params);
    (3..=10)
        .map(|n| {
            let diff = (generic[n] - closed[n]).abs();
            if closed[n] == 0.0 {
                diff
            } else {
                diff / closed[n].abs()
            }
        })
        .fold(0.0, f64::max)
}
