//! Vinet (Rose-Vinet) equation of state for diamond.
//!
//! For a cubic crystal the volume ratio is `X³` with `X = a/a₀`, and
//!
//! ```text
//! P(X) = 3 B₀ (1 - X) / X² · exp[η (1 - X)],   η = 3/2 (B₀' - 1)
//! ```

use crate::roots::brent;
use crate::{Error, Result};

pub const RATIO_MIN: f64 = 0.7;
pub const RATIO_MAX: f64 = 1.05;
pub const PRESSURE_MAX: f64 = 600.0;
/// Negative pressures down to this are rounding noise and read as zero.
pub const NEGATIVE_PRESSURE_SLACK: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EosParams {
    /// Zero-pressure lattice constant, Å.
    pub a0: f64,
    /// Bulk modulus, GPa.
    pub b0: f64,
    /// Pressure derivative of the bulk modulus.
    pub b0_prime: f64,
    pub label: String,
}

impl EosParams {
    pub fn new(a0: f64, b0: f64, b0_prime: f64, label: impl Into<String>) -> Result<Self> {
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "a0 must be positive, got {a0}"
            )));
        }
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "b0 must be positive, got {b0}"
            )));
        }
        if !(b0_prime > 1.0 && b0_prime.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "b0_prime must exceed 1, got {b0_prime}"
            )));
        }
        Ok(Self {
            a0,
            b0,
            b0_prime,
            label: label.into(),
        })
    }

    /// SCAN-functional diamond: a₀ = 3.554 Å, B₀ = 460 GPa, B₀' = 3.0.
    pub fn theory() -> Self {
        Self::new(3.554, 460.0, 3.0, "theory").expect("valid constants")
    }

    /// Measured diamond: a₀ = 3.555 Å, B₀ = 446 GPa, B₀' = 3.0.
    pub fn experiment() -> Self {
        Self::new(3.555, 446.0, 3.0, "experiment").expect("valid constants")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "theory" => Ok(Self::theory()),
            "experiment" => Ok(Self::experiment()),
            other => Err(Error::InvalidInput(format!(
                "unknown EOS parameter set '{other}'"
            ))),
        }
    }
}

/// Compression state of the diamond lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeState {
    /// `a / a₀`
    pub x: f64,
    /// GPa
    pub pressure: f64,
    /// Absolute lattice constant, Å.
    pub a: f64,
}

fn vinet_unchecked(x: f64, params: &EosParams) -> f64 {
    let eta = 1.5 * (params.b0_prime - 1.0);
    3.0 * params.b0 * (1.0 - x) / (x * x) * (eta * (1.0 - x)).exp()
}

pub fn vinet_pressure(x: f64, params: &EosParams) -> Result<f64> {
    if !(RATIO_MIN..=RATIO_MAX).contains(&x) {
        return Err(Error::OutOfRange(format!(
            "lattice ratio {x} outside [{RATIO_MIN}, {RATIO_MAX}]"
        )));
    }
    Ok(vinet_unchecked(x, params))
}

/// Inverse of [`vinet_pressure`] by Brent's method on `[0.7, 1.0]`.
pub fn lattice_ratio_from_pressure(p: f64, params: &EosParams) -> Result<f64> {
    if !(NEGATIVE_PRESSURE_SLACK..=PRESSURE_MAX).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "pressure {p} GPa outside [0, {PRESSURE_MAX}]"
        )));
    }
    if p <= 0.0 {
        return Ok(1.0);
    }
    brent(
        |x| vinet_unchecked(x, params) - p,
        RATIO_MIN,
        1.0,
        1e-15,
        1e-11,
        200,
    )
}

pub fn lattice_state_from_pressure(p: f64, params: &EosParams) -> Result<LatticeState> {
    let x = lattice_ratio_from_pressure(p, params)?;
    Ok(LatticeState {
        x,
        pressure: p.max(0.0),
        a: x * params.a0,
    })
}

pub fn lattice_state_from_ratio(x: f64, params: &EosParams) -> Result<LatticeState> {
    Ok(LatticeState {
        x,
        pressure: vinet_pressure(x, params)?,
        a: x * params.a0,
    })
}
