//! Constant solutions of the radial equations and their local stability.
//!
//! The classification is a decision table built from the linearization
//! about each constant solution, not a numerical eigenvalue computation.
//!
//! | fixed point      | gamma mode              | phi mode                         |
//! |------------------|-------------------------|----------------------------------|
//! | (-1/2, +-1)      | stable iff r^2 < eps/4  | unstable iff lambda > 0          |
//! | (-1/2, 0)        | stable                  | stable, oscillates if lambda > 0 |
//! | (0, 0), (-1, 0)  | unstable                | grows for r < 1/sqrt(lambda), oscillates beyond |

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};
use crate::model::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedPointId {
    /// `(gamma, phi) = (-1/2, 1)`, the boundary values of a monopole.
    HalfPlusOne,
    /// `(-1/2, -1)`, the reflection of `HalfPlusOne`.
    HalfMinusOne,
    /// `(-1/2, 0)`
    HalfZero,
    /// `(0, 0)`, the values at the origin.
    Origin,
    /// `(-1, 0)`, the gauge image of `Origin`.
    MinusOneZero,
}

impl FixedPointId {
    pub const ALL: [FixedPointId; 5] = [
        FixedPointId::HalfPlusOne,
        FixedPointId::HalfMinusOne,
        FixedPointId::HalfZero,
        FixedPointId::Origin,
        FixedPointId::MinusOneZero,
    ];

    /// `(gamma, phi)`
    pub fn values(self) -> (f64, f64) {
        match self {
            FixedPointId::HalfPlusOne => (-0.5, 1.0),
            FixedPointId::HalfMinusOne => (-0.5, -1.0),
            FixedPointId::HalfZero => (-0.5, 0.0),
            FixedPointId::Origin => (0.0, 0.0),
            FixedPointId::MinusOneZero => (-1.0, 0.0),
        }
    }

    /// The point this one is related to by a symmetry, used for classification.
    fn representative(self) -> FixedPointId {
        match self {
            FixedPointId::HalfMinusOne => FixedPointId::HalfPlusOne,
            FixedPointId::MinusOneZero => FixedPointId::Origin,
            other => other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FixedPointId::HalfPlusOne => "(-1/2, 1)",
            FixedPointId::HalfMinusOne => "(-1/2, -1)",
            FixedPointId::HalfZero => "(-1/2, 0)",
            FixedPointId::Origin => "(0, 0)",
            FixedPointId::MinusOneZero => "(-1, 0)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub fixed_point: FixedPointId,
    pub r: f64,
    pub params: Params,
    pub unstable_mode_count: u8,
    pub gamma_mode_stable: bool,
    pub phi_mode_stable: bool,
    pub phi_oscillatory: bool,
    /// Infinite when the mode has no intrinsic scale at these parameters;
    /// serialized as `null` in that case.
    pub gamma_length_scale: f64,
    pub phi_length_scale: f64,
}

impl StabilityReport {
    /// Compares the classification, ignoring which fixed point it belongs to.
    pub fn same_classification(&self, other: &StabilityReport) -> bool {
        StabilityReport {
            fixed_point: other.fixed_point,
            ..*self
        } == *other
    }
}

fn inv_sqrt(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x.sqrt()
    } else {
        f64::INFINITY
    }
}

pub fn classify_stability(fp: FixedPointId, r: f64, params: &Params) -> Result<StabilityReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(MonopoleError::Domain { r });
    }
    let eps = params.epsilon();
    let lambda = params.lambda();

    let (gamma_mode_stable, phi_mode_stable, phi_oscillatory, gamma_scale, phi_scale) =
        match fp.representative() {
            FixedPointId::HalfPlusOne => (
                r * r < eps / 4.0,
                // phi = 1 + zeta: (r zeta)'' = 4 lambda (r zeta)
                lambda == 0.0,
                false,
                eps.sqrt() / 2.0,
                inv_sqrt(4.0 * lambda),
            ),
            // (r phi)'' = -2 lambda (r phi); delta'' = -delta / r^2
            FixedPointId::HalfZero => (true, true, lambda > 0.0, r, inv_sqrt(2.0 * lambda)),
            FixedPointId::Origin => {
                // gamma'' = 2 gamma / r^2; phi oscillates once lambda r^2 > 1
                let oscillates = lambda > 0.0 && r > inv_sqrt(lambda);
                (
                    false,
                    oscillates,
                    oscillates,
                    r / std::f64::consts::SQRT_2,
                    inv_sqrt(lambda),
                )
            }
            _ => unreachable!("representative is one of three points"),
        };

    let unstable_mode_count = u8::from(!gamma_mode_stable) + u8::from(!phi_mode_stable);
    Ok(StabilityReport {
        fixed_point: fp,
        r,
        params: *params,
        unstable_mode_count,
        gamma_mode_stable,
        phi_mode_stable,
        phi_oscillatory,
        gamma_length_scale: gamma_scale,
        phi_length_scale: phi_scale,
    })
}

/// Transition length scales of a monopole profile: `min(sqrt(eps), 1)` for
/// `gamma` and `min(sqrt(eps), 1/sqrt(lambda), 1)` for `phi`.
pub fn length_scales(params: &Params) -> (f64, f64) {
    let root_eps = params.epsilon().sqrt();
    let gamma = root_eps.min(1.0);
    let phi = gamma.min(inv_sqrt(params.lambda()));
    (gamma, phi)
}
