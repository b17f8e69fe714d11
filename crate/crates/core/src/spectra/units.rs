use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// hc in eV·nm.
pub const HC_EV_NM: f64 = 1239.84198;
/// Planck constant in meV per THz.
pub const H_MEV_PER_THZ: f64 = 4.135667696;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyUnit {
    Ev,
    MeV,
    Thz,
    Nm,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 4] = [
        EnergyUnit::Ev,
        EnergyUnit::MeV,
        EnergyUnit::Thz,
        EnergyUnit::Nm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnergyUnit::Ev => "eV",
            EnergyUnit::MeV => "meV",
            EnergyUnit::Thz => "THz",
            EnergyUnit::Nm => "nm",
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eV" | "ev" => Ok(EnergyUnit::Ev),
            "meV" | "mev" => Ok(EnergyUnit::MeV),
            "THz" | "thz" => Ok(EnergyUnit::Thz),
            "nm" => Ok(EnergyUnit::Nm),
            other => Err(Error::InvalidInput(format!(
                "unknown energy unit '{other}'"
            ))),
        }
    }
}

/// A photon energy expressed in one of the interchangeable spectroscopic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyQuantity {
    value: f64,
    unit: EnergyUnit,
}

impl EnergyQuantity {
    pub fn new(value: f64, unit: EnergyUnit) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "energy value {value} is not finite"
            )));
        }
        if unit == EnergyUnit::Nm && value <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "wavelength must be positive, got {value} nm"
            )));
        }
        Ok(Self { value, unit })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> EnergyUnit {
        self.unit
    }

    fn to_ev(self) -> f64 {
        match self.unit {
            EnergyUnit::Ev => self.value,
            EnergyUnit::MeV => self.value * 1e-3,
            EnergyUnit::Thz => self.value * H_MEV_PER_THZ * 1e-3,
            EnergyUnit::Nm => HC_EV_NM / self.value,
        }
    }
}

/// Converts between eV, meV, THz and nm. Wavelength conversion goes through
/// the reciprocal `hc / λ`, so zero energy has no wavelength.
pub fn convert_energy(q: EnergyQuantity, target: EnergyUnit) -> Result<EnergyQuantity> {
    if q.unit == target {
        return Ok(q);
    }
    let ev = q.to_ev();
    let value = match target {
        EnergyUnit::Ev => ev,
        EnergyUnit::MeV => ev * 1e3,
        EnergyUnit::Thz => ev * 1e3 / H_MEV_PER_THZ,
        EnergyUnit::Nm => {
            if ev <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "energy {ev} eV has no positive wavelength"
                )));
            }
            HC_EV_NM / ev
        }
    };
    EnergyQuantity::new(value, target)
}
