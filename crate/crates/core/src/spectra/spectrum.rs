use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::units::HC_EV_NM;
use crate::{Error, Result};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisUnit {
    Nanometer,
    Electronvolt,
    WavenumberPerCm,
}

impl AxisUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisUnit::Nanometer => "nanometer",
            AxisUnit::Electronvolt => "electronvolt",
            AxisUnit::WavenumberPerCm => "wavenumber_per_cm",
        }
    }
}

impl fmt::Display for AxisUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nanometer" | "nm" => Ok(AxisUnit::Nanometer),
            "electronvolt" | "eV" | "ev" => Ok(AxisUnit::Electronvolt),
            "wavenumber_per_cm" | "cm-1" => Ok(AxisUnit::WavenumberPerCm),
            other => Err(Error::InvalidInput(format!("unknown axis unit '{other}'"))),
        }
    }
}

/// A sampled intensity trace.
///
/// The axis is strictly increasing, there are at least [`MIN_POINTS`]
/// samples and every value is finite. Intensities are photon counts and
/// may dip below zero once noise or a background has been subtracted.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    axis_unit: AxisUnit,
    axis: Vec<f64>,
    intensity: Vec<f64>,
    meta: BTreeMap<String, String>,
}

impl Spectrum {
    pub fn new(axis_unit: AxisUnit, axis: Vec<f64>, intensity: Vec<f64>) -> Result<Self> {
        Self::with_meta(axis_unit, axis, intensity, BTreeMap::new())
    }

    pub fn with_meta(
        axis_unit: AxisUnit,
        axis: Vec<f64>,
        intensity: Vec<f64>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if axis.len() != intensity.len() {
            return Err(Error::InvalidInput(format!(
                "axis has {} samples but intensity has {}",
                axis.len(),
                intensity.len()
            )));
        }
        if axis.len() < MIN_POINTS {
            return Err(Error::TooFewPoints {
                needed: MIN_POINTS,
                got: axis.len(),
            });
        }
        if let Some(i) = axis.iter().chain(&intensity).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at sample {}",
                i % axis.len()
            )));
        }
        if let Some(i) = axis.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "axis not strictly increasing at sample {}",
                i + 1
            )));
        }
        Ok(Self {
            axis_unit,
            axis,
            intensity,
            meta,
        })
    }

    pub fn axis_unit(&self) -> AxisUnit {
        self.axis_unit
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.axis
            .iter()
            .copied()
            .zip(self.intensity.iter().copied())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.axis[0], self.axis[self.axis.len() - 1])
    }

    /// Nominal pressure recorded in the metadata (`pressure_gpa` key), if any.
    pub fn nominal_pressure(&self) -> Option<f64> {
        self.meta
            .get("pressure_gpa")
            .and_then(|v| v.trim().parse().ok())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    /// Shifts the axis by `delta` and scales the intensity by `scale`.
    pub fn transformed(&self, delta: f64, scale: f64) -> Result<Self> {
        Self::with_meta(
            self.axis_unit,
            self.axis.iter().map(|x| x + delta).collect(),
            self.intensity.iter().map(|y| y * scale).collect(),
            self.meta.clone(),
        )
    }
}

/// Maps a wavelength spectrum onto an increasing photon-energy axis.
///
/// Intensities are carried over per channel without the dλ/dE Jacobian.
pub fn resample_to_energy(s: &Spectrum) -> Result<Spectrum> {
    match s.axis_unit {
        AxisUnit::Electronvolt => Ok(s.clone()),
        AxisUnit::Nanometer => {
            let axis = s.axis.iter().rev().map(|nm| HC_EV_NM / nm).collect();
            let intensity = s.intensity.iter().rev().copied().collect();
            Spectrum::with_meta(AxisUnit::Electronvolt, axis, intensity, s.meta.clone())
        }
        AxisUnit::WavenumberPerCm => Err(Error::InvalidInput(
            "Raman spectra on a wavenumber axis are not converted to energy".into(),
        )),
    }
}
