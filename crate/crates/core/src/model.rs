//! The reduced radial model: parameters, phase-space states, sampled
//! profiles, the Euler-Lagrange right-hand side, the action functional and
//! the two discrete symmetries.
//!
//! The gauge-field profile `gamma` and the Higgs profile `phi` live on the
//! unit interval `0 <= r <= 1`. The first-order state is always ordered
//! `(gamma, gamma', phi, phi')`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::quadrature::simpson;
use crate::series::TaylorSeries;

/// Number of sample points used to integrate the series segment `[0, r0]`.
pub const SERIES_QUADRATURE_POINTS: usize = 33;

/// The curvature weight `epsilon > 0` and potential weight `lambda >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    epsilon: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    epsilon: f64,
    lambda: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = MonopoleError;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.epsilon, raw.lambda)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams {
            epsilon: p.epsilon,
            lambda: p.lambda,
        }
    }
}

impl Params {
    pub fn new(epsilon: f64, lambda: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(MonopoleError::InvalidParams(format!(
                "epsilon must be finite and > 0, got {epsilon}"
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(MonopoleError::InvalidParams(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Params { epsilon, lambda })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// A point `(gamma, gamma', phi, phi')` of phase space at radius `r`.
///
/// `gamma` is stored as its offset `delta = gamma + 1/2` from the symmetric
/// point, so the gauge reflection `gamma -> -1 - gamma` is an exact sign flip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub r: f64,
    /// `gamma + 1/2`
    pub delta: f64,
    pub dgamma: f64,
    pub phi: f64,
    pub dphi: f64,
}

impl OdeState {
    pub fn new(r: f64, gamma: f64, dgamma: f64, phi: f64, dphi: f64) -> Self {
        OdeState {
            r,
            delta: gamma + 0.5,
            dgamma,
            phi,
            dphi,
        }
    }

    /// The constant state `(gamma, 0, phi, 0)` at radius `r`.
    pub fn constant(r: f64, gamma: f64, phi: f64) -> Self {
        OdeState::new(r, gamma, 0.0, phi, 0.0)
    }

    pub fn gamma(&self) -> f64 {
        self.delta - 0.5
    }

    /// `(gamma, gamma', phi, phi')`
    pub fn to_array(&self) -> [f64; 4] {
        [self.gamma(), self.dgamma, self.phi, self.dphi]
    }

    pub fn from_array(r: f64, y: [f64; 4]) -> Self {
        OdeState::new(r, y[0], y[1], y[2], y[3])
    }

    pub fn is_finite(&self) -> bool {
        [self.r, self.delta, self.dgamma, self.phi, self.dphi]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Derivative of the first-order system, ordered `(gamma', gamma'', phi', phi'')`.
pub fn rhs(state: &OdeState, params: &Params) -> Result<[f64; 4]> {
    if !(state.r > 0.0) {
        return Err(MonopoleError::Domain { r: state.r });
    }
    Ok(rhs_unchecked(state.r, &state.to_array(), params))
}

/// `rhs` without the domain check, for the integrator's inner loop.
#[inline]
pub(crate) fn rhs_unchecked(r: f64, y: &[f64; 4], params: &Params) -> [f64; 4] {
    let [gamma, dgamma, phi, dphi] = *y;
    let r2 = r * r;
    let twist = 1.0 + 2.0 * gamma;
    let d2gamma =
        2.0 / params.epsilon * phi * phi * twist + 2.0 / r2 * (gamma * gamma + gamma) * twist;
    let d2phi = -2.0 * dphi / r
        + 2.0 * phi / r2 * twist * twist
        + 2.0 * params.lambda * phi * (phi * phi - 1.0);
    [dgamma, d2gamma, dphi, d2phi]
}

/// Action density (without the `4 pi` prefactor) at one state.
///
/// At `r = 0` the density of any series-consistent configuration vanishes,
/// so the limit value `0` is returned there.
pub fn action_density(state: &OdeState, params: &Params) -> f64 {
    let r = state.r;
    if r == 0.0 {
        return 0.0;
    }
    // gamma^2 + gamma = delta^2 - 1/4 and (1 + 2 gamma)^2 = 4 delta^2, which
    // keeps the density bitwise invariant under both reflections.
    let OdeState {
        delta,
        dgamma,
        phi,
        dphi,
        ..
    } = *state;
    let quartic = delta * delta - 0.25;
    let well = phi * phi - 1.0;
    2.0 * params.epsilon * (dgamma * dgamma + 2.0 / (r * r) * quartic * quartic)
        + r * r * dphi * dphi
        + 8.0 * phi * phi * delta * delta
        + params.lambda * r * r * well * well
}

/// A trajectory sampled on a strictly increasing grid of radii in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    params: Params,
    radii: Vec<f64>,
    states: Vec<OdeState>,
}

impl Profile {
    /// Builds a profile from states; radii are taken from `state.r`.
    pub fn new(params: Params, states: Vec<OdeState>) -> Result<Self> {
        if states.len() < 2 {
            return Err(MonopoleError::InvalidProfile(format!(
                "need at least 2 samples, got {}",
                states.len()
            )));
        }
        if let Some(bad) = states.iter().find(|s| !s.is_finite()) {
            return Err(MonopoleError::InvalidProfile(format!(
                "non-finite sample at r = {}",
                bad.r
            )));
        }
        if states[0].r < 0.0 || states[states.len() - 1].r > 1.0 {
            return Err(MonopoleError::InvalidProfile(
                "radii must lie in [0, 1]".into(),
            ));
        }
        if states.windows(2).any(|w| !(w[1].r > w[0].r)) {
            return Err(MonopoleError::InvalidProfile(
                "radii must be strictly increasing".into(),
            ));
        }
        let radii = states.iter().map(|s| s.r).collect();
        Ok(Profile {
            params,
            radii,
            states,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn states(&self) -> &[OdeState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &OdeState {
        &self.states[0]
    }

    pub fn last(&self) -> &OdeState {
        &self.states[self.states.len() - 1]
    }

    /// True when the last sample sits exactly at the boundary `r = 1`.
    pub fn reaches_boundary(&self) -> bool {
        self.last().r == 1.0
    }

    fn map_states(&self, f: impl Fn(&OdeState) -> OdeState) -> Profile {
        Profile {
            params: self.params,
            radii: self.radii.clone(),
            states: self.states.iter().map(f).collect(),
        }
    }

    /// Joins `self` with a profile starting where `self` ends.
    pub fn concat(&self, tail: &Profile) -> Result<Profile> {
        if tail.first().r != self.last().r {
            return Err(MonopoleError::InvalidProfile(format!(
                "cannot join profiles ending at {} and starting at {}",
                self.last().r,
                tail.first().r
            )));
        }
        let mut states = self.states.clone();
        states.extend_from_slice(&tail.states[1..]);
        Profile::new(self.params, states)
    }

    /// First radius where `gamma` reaches `level` from above, linearly
    /// interpolated between samples.
    pub fn gamma_crossing(&self, level: f64) -> Option<f64> {
        self.states.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let (ga, gb) = (a.gamma(), b.gamma());
            if ga > level && gb <= level {
                let t = (ga - level) / (ga - gb);
                Some(a.r + t * (b.r - a.r))
            } else {
                None
            }
        })
    }

    /// Soft shape diagnostic: whether `gamma` is non-increasing and `phi` is
    /// non-decreasing on the sampled grid.
    pub fn monotonicity(&self) -> Monotonicity {
        Monotonicity {
            gamma_nonincreasing: self.states.windows(2).all(|w| w[1].delta <= w[0].delta),
            phi_nondecreasing: self.states.windows(2).all(|w| w[1].phi >= w[0].phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub gamma_nonincreasing: bool,
    pub phi_nondecreasing: bool,
}

/// `phi -> -phi` with `gamma` unchanged (the reflection `x -> -x`).
pub fn apply_phi_flip(profile: &Profile) -> Profile {
    profile.map_states(|s| OdeState {
        phi: -s.phi,
        dphi: -s.dphi,
        ..*s
    })
}

/// `gamma -> -1 - gamma` with `phi` unchanged (the singular gauge transformation).
pub fn apply_gauge_flip(profile: &Profile) -> Profile {
    profile.map_states(|s| OdeState {
        delta: -s.delta,
        dgamma: -s.dgamma,
        ..*s
    })
}

/// Total action `4 pi * integral_0^1 density dr`.
///
/// The profile supplies `[r0, 1]` and is integrated with composite Simpson on
/// its own grid. When `r0 > 0` the segment `[0, r0]` comes from `series`,
/// sampled at [`SERIES_QUADRATURE_POINTS`] equally spaced radii.
pub fn action(profile: &Profile, series: &TaylorSeries) -> Result<f64> {
    if !profile.reaches_boundary() {
        return Err(MonopoleError::IncompleteDomain {
            last: profile.last().r,
        });
    }
    let params = profile.params();
    let density: Vec<f64> = profile
        .states()
        .iter()
        .map(|s| action_density(s, params))
        .collect();
    let mut integral = simpson(profile.radii(), &density);

    let r0 = profile.first().r;
    if r0 > 0.0 {
        let m = SERIES_QUADRATURE_POINTS - 1;
        let radii: Vec<f64> = (0..=m).map(|j| r0 * j as f64 / m as f64).collect();
        let head: Vec<f64> = radii
            .iter()
            .map(|&r| action_density(&series.eval(r), params))
            .collect();
        integral += simpson(&radii, &head);
    }
    Ok(4.0 * PI * integral)
}

/// Largest absolute Euler-Lagrange residual over interior grid points with
/// `r > 0`, using three-point central differences on the profile's grid.
pub fn el_residual(profile: &Profile, params: &Params) -> Result<f64> {
    el_residual_within(profile, params, f64::NEG_INFINITY, f64::INFINITY)
}

/// As [`el_residual`], restricted to interior points with `lo <= r <= hi`.
pub fn el_residual_within(profile: &Profile, params: &Params, lo: f64, hi: f64) -> Result<f64> {
    if profile.len() < 5 {
        return Err(MonopoleError::InvalidProfile(format!(
            "residual needs at least 5 samples, got {}",
            profile.len()
        )));
    }
    let s = profile.states();
    let mut worst: f64 = 0.0;
    for i in 1..s.len() - 1 {
        let r = s[i].r;
        if r <= 0.0 || r < lo || r > hi {
            continue;
        }
        let h0 = r - s[i - 1].r;
        let h1 = s[i + 1].r - r;
        let second = |f: fn(&OdeState) -> f64| {
            2.0 * ((f(&s[i + 1]) - f(&s[i])) / h1 - (f(&s[i]) - f(&s[i - 1])) / h0) / (h0 + h1)
        };
        let first = |f: fn(&OdeState) -> f64| {
            (h0 * h0 * f(&s[i + 1]) - h1 * h1 * f(&s[i - 1]) + (h1 * h1 - h0 * h0) * f(&s[i]))
                / (h0 * h1 * (h0 + h1))
        };
        let d2gamma = second(|s| s.gamma());
        let d2phi = second(|s| s.phi);
        let dphi = first(|s| s.phi);
        let y = [s[i].gamma(), 0.0, s[i].phi, dphi];
        let f = rhs_unchecked(r, &y, params);
        worst = worst.max((d2gamma - f[1]).abs()).max((d2phi - f[3]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{compute_coeffs, SeedCoeffs};

    fn params(e: f64, l: f64) -> Params {
        Params::new(e, l).unwrap()
    }

    fn grid(lo: f64, n: usize, f: impl Fn(f64) -> OdeState) -> Vec<OdeState> {
        (0..=n)
            .map(|i| {
                let r = if i == n {
                    1.0
                } else {
                    lo + (1.0 - lo) * i as f64 / n as f64
                };
                f(r)
            })
            .collect()
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(0.0, 1.0).is_err());
        assert!(Params::new(-1.0, 0.0).is_err());
        assert!(Params::new(1.0, -0.5).is_err());
        assert!(Params::new(f64::NAN, 0.0).is_err());
        assert!(Params::new(1.0, 0.0).is_ok());
        let bad: std::result::Result<Params, _> =
            serde_json::from_str(r#"{"epsilon": -2.0, "lambda": 0.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn rhs_examples() {
        let p = params(1.0, 0.0);
        let s = OdeState::new(0.5, -0.5, 0.0, 1.0, 0.0);
        assert_eq!(rhs(&s, &p).unwrap(), [0.0; 4]);

        let s = OdeState::new(0.5, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(rhs(&s, &params(0.3, 7.0)).unwrap(), [0.0; 4]);

        // gamma'' = (2/eps) phi^2 (1 + 2 gamma) = 2, phi'' = (2 phi / r^2)(1 + 2 gamma)^2 = 2
        let s = OdeState::new(1.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(rhs(&s, &params(1.0, 1.0)).unwrap(), [0.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn rhs_rejects_origin() {
        let s = OdeState::new(0.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            rhs(&s, &params(1.0, 0.0)),
            Err(MonopoleError::Domain { .. })
        ));
        let s = OdeState::new(-0.1, 0.0, 0.0, 0.0, 1.0);
        assert!(rhs(&s, &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn profile_invariants() {
        let p = params(1.0, 0.0);
        assert!(Profile::new(p, vec![OdeState::constant(1.0, 0.0, 0.0)]).is_err());
        let dup = vec![
            OdeState::constant(0.5, 0.0, 0.0),
            OdeState::constant(0.5, 0.0, 0.0),
        ];
        assert!(Profile::new(p, dup).is_err());
        let nan = vec![
            OdeState::constant(0.5, f64::NAN, 0.0),
            OdeState::constant(1.0, 0.0, 0.0),
        ];
        assert!(Profile::new(p, nan).is_err());
        let beyond = vec![
            OdeState::constant(0.5, 0.0, 0.0),
            OdeState::constant(1.5, 0.0, 0.0),
        ];
        assert!(Profile::new(p, beyond).is_err());
    }

    #[test]
    fn action_of_zero_profile() {
        let zero = SeedCoeffs::new(0.0, 0.0).unwrap();
        for lambda in [0.0, 1.0, 30.0] {
            let p = params(0.7, lambda);
            let series = compute_coeffs(zero, p, 10).unwrap();
            let prof =
                Profile::new(p, grid(0.01, 99, |r| OdeState::constant(r, 0.0, 0.0))).unwrap();
            let s = action(&prof, &series).unwrap();
            assert!((s - 4.0 * PI * lambda / 3.0).abs() < 1e-12, "{s}");
        }
        let p = params(1.0, 0.0);
        let series = compute_coeffs(zero, p, 10).unwrap();
        let prof = Profile::new(p, grid(0.0, 10, |r| OdeState::constant(r, 0.0, 0.0))).unwrap();
        assert_eq!(action(&prof, &series).unwrap(), 0.0);
    }

    #[test]
    fn action_requires_boundary() {
        let p = params(1.0, 0.0);
        let series = compute_coeffs(SeedCoeffs::new(0.0, 0.0).unwrap(), p, 4).unwrap();
        let states = (1..=5)
            .map(|i| OdeState::constant(0.1 * i as f64, 0.0, 0.0))
            .collect();
        let prof = Profile::new(p, states).unwrap();
        assert!(matches!(
            action(&prof, &series),
            Err(MonopoleError::IncompleteDomain { .. })
        ));
    }

    #[test]
    fn residual_of_constant_solution() {
        let p = params(0.4, 3.0);
        let prof = Profile::new(p, grid(0.1, 200, |r| OdeState::constant(r, -0.5, 1.0))).unwrap();
        assert!(el_residual(&prof, &p).unwrap() < 1e-12);
    }

    #[test]
    fn residual_sees_local_perturbation() {
        let p = params(1.0, 1.0);
        let n = 200;
        let mut states = grid(0.1, n, |r| OdeState::constant(r, -0.5, 1.0));
        let h = states[1].r - states[0].r;
        states[100].phi += 0.01;
        let prof = Profile::new(p, states).unwrap();
        let res = el_residual(&prof, &p).unwrap();
        // a bump of size d in a second difference shows up as 2 d / h^2
        let expected = 2.0 * 0.01 / (h * h);
        assert!(
            res > 0.9 * expected && res < 1.1 * expected,
            "{res} vs {expected}"
        );
    }

    #[test]
    fn residual_needs_five_points() {
        let p = params(1.0, 1.0);
        let prof = Profile::new(p, grid(0.5, 3, |r| OdeState::constant(r, -0.5, 1.0))).unwrap();
        assert!(el_residual(&prof, &p).is_err());
    }

    #[test]
    fn flips_are_involutions() {
        let p = params(1.0, 0.0);
        let prof = Profile::new(
            p,
            grid(0.0, 50, |r| {
                OdeState::new(r, -r * r, -2.0 * r, r.sin(), r.cos())
            }),
        )
        .unwrap();
        assert_eq!(apply_phi_flip(&apply_phi_flip(&prof)), prof);
        assert_eq!(apply_gauge_flip(&apply_gauge_flip(&prof)), prof);

        let ones = Profile::new(p, grid(0.0, 4, |r| OdeState::constant(r, 0.0, 1.0))).unwrap();
        assert!(apply_phi_flip(&ones).states().iter().all(|s| s.phi == -1.0));
        assert!(apply_gauge_flip(&ones)
            .states()
            .iter()
            .all(|s| s.gamma() == -1.0));
    }

    #[test]
    fn gamma_crossing_interpolates() {
        let p = params(1.0, 0.0);
        let prof = Profile::new(p, grid(0.0, 10, |r| OdeState::constant(r, -r, 0.0))).unwrap();
        let x = prof.gamma_crossing(-0.25).unwrap();
        assert!((x - 0.25).abs() < 1e-12);
        assert!(prof.gamma_crossing(-2.0).is_none());
        assert_eq!(
            prof.monotonicity(),
            Monotonicity {
                gamma_nonincreasing: true,
                phi_nondecreasing: true
            }
        );
    }
}
