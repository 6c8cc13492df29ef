//! Scalar activation functions and their closed-form derivatives.
//!
//! Every variant exposes derivative orders `0..=4`. Derivatives are computed
//! from recurrences on the primal value (e.g. `s' = s(1 - s)` for the
//! logistic) so no differentiation machinery is needed anywhere downstream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, XtfcError};

/// Highest derivative order available for every activation.
pub const MAX_ACTIVATION_ORDER: u32 = 4;

/// The nonlinearity used by the hidden layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    /// `1 / (1 + e^{-z})`
    Logistic,
    /// `tanh(z)`
    Tanh,
    /// `sin(z)`
    Sin,
    /// `exp(-z^2)`
    Gaussian,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 4] = [
        ActivationKind::Logistic,
        ActivationKind::Tanh,
        ActivationKind::Sin,
        ActivationKind::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Logistic => "logistic",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sin => "sin",
            ActivationKind::Gaussian => "gaussian",
        }
    }

    /// `σ^{(order)}(z)`. Fails for `order > 4`.
    pub fn eval(self, z: f64, order: u32) -> Result<f64> {
        if order > MAX_ACTIVATION_ORDER {
            return Err(XtfcError::DerivativeOrder {
                order,
                max: MAX_ACTIVATION_ORDER,
            });
        }
        Ok(self.eval_unchecked(z, order))
    }

    /// Same as [`eval`](Self::eval) with the order already validated by the caller.
    #[inline]
    pub(crate) fn eval_unchecked(self, z: f64, order: u32) -> f64 {
        match self {
            ActivationKind::Logistic => logistic(z, order),
            ActivationKind::Tanh => tanh(z, order),
            ActivationKind::Sin => sin(z, order),
            ActivationKind::Gaussian => gaussian(z, order),
        }
    }
}

/// Free-function form of [`ActivationKind::eval`].
pub fn activate(kind: ActivationKind, z: f64, order: u32) -> Result<f64> {
    kind.eval(z, order)
}

#[inline]
fn logistic(z: f64, order: u32) -> f64 {
    let s = 1.0 / (1.0 + (-z).exp());
    let ds = s * (1.0 - s);
    match order {
        0 => s,
        1 => ds,
        2 => ds * (1.0 - 2.0 * s),
        3 => ds * (1.0 - 6.0 * s + 6.0 * s * s),
        _ => ds * (1.0 - 2.0 * s) * (1.0 - 12.0 * s + 12.0 * s * s),
    }
}

#[inline]
fn tanh(z: f64, order: u32) -> f64 {
    let t = z.tanh();
    let u = 1.0 - t * t;
    match order {
        0 => t,
        1 => u,
        2 => -2.0 * t * u,
        3 => u * (6.0 * t * t - 2.0),
        _ => 8.0 * t * u * (2.0 - 3.0 * t * t),
    }
}

#[inline]
fn sin(z: f64, order: u32) -> f64 {
    match order % 4 {
        0 => z.sin(),
        1 => z.cos(),
        2 => -z.sin(),
        _ => -z.cos(),
    }
}

#[inline]
fn gaussian(z: f64, order: u32) -> f64 {
    // d^n/dz^n e^{-z^2} = (-1)^n H_n(z) e^{-z^2}, physicists' Hermite H_n
    let e = (-z * z).exp();
    let z2 = z * z;
    match order {
        0 => e,
        1 => -2.0 * z * e,
        2 => (4.0 * z2 - 2.0) * e,
        3 => -(8.0 * z2 * z - 12.0 * z) * e,
        _ => (16.0 * z2 * z2 - 48.0 * z2 + 12.0) * e,
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = XtfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logistic" | "sigmoid" => Ok(ActivationKind::Logistic),
            "tanh" => Ok(ActivationKind::Tanh),
            "sin" | "sine" => Ok(ActivationKind::Sin),
            "gaussian" => Ok(ActivationKind::Gaussian),
            other => Err(XtfcError::InvalidArgument(format!("unknown activation `{other}`"))),
        }
    }
}
