//! Pressure gauges: ruby R1 fluorescence, diamond Raman edge and G4V ZPL.

use std::fmt;
use std::str::FromStr;

use crate::calib::{GaugeCalibration, Species};
use crate::{Error, Result};

/// Accuracy of the ruby scale below 79 GPa.
pub const RUBY_SIGMA_GPA: f64 = 1.0;
/// Accuracy of the Raman-edge scale.
pub const RAMAN_SIGMA_GPA: f64 = 8.0;
/// Most negative ruby pressure accepted as a valid reading.
pub const RUBY_MIN_PRESSURE: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeId {
    Ruby,
    RamanEdge,
    ZplSiV,
    ZplGeV,
    ZplSnV,
    Combined,
}

impl GaugeId {
    pub fn as_str(self) -> &'static str {
        match self {
            GaugeId::Ruby => "ruby",
            GaugeId::RamanEdge => "raman_edge",
            GaugeId::ZplSiV => "zpl_siv",
            GaugeId::ZplGeV => "zpl_gev",
            GaugeId::ZplSnV => "zpl_snv",
            GaugeId::Combined => "combined",
        }
    }

    pub fn for_species(species: Species) -> Self {
        match species {
            Species::SiV => GaugeId::ZplSiV,
            Species::GeV => GaugeId::ZplGeV,
            Species::SnV => GaugeId::ZplSnV,
        }
    }
}

impl fmt::Display for GaugeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GaugeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ruby" => Ok(GaugeId::Ruby),
            "raman_edge" => Ok(GaugeId::RamanEdge),
            "zpl_siv" => Ok(GaugeId::ZplSiV),
            "zpl_gev" => Ok(GaugeId::ZplGeV),
            "zpl_snv" => Ok(GaugeId::ZplSnV),
            "combined" => Ok(GaugeId::Combined),
            other => Err(Error::InvalidInput(format!("unknown gauge '{other}'"))),
        }
    }
}

/// The spectral observable a pressure was read from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceFeature {
    WavelengthNm(f64),
    WavenumberCm1(f64),
    EnergyEv(f64),
    /// Several gauges merged; no single feature.
    Combined {
        n_inputs: usize,
    },
}

impl SourceFeature {
    pub fn value(&self) -> f64 {
        match *self {
            SourceFeature::WavelengthNm(v)
            | SourceFeature::WavenumberCm1(v)
            | SourceFeature::EnergyEv(v) => v,
            SourceFeature::Combined { n_inputs } => n_inputs as f64,
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            SourceFeature::WavelengthNm(_) => "nm",
            SourceFeature::WavenumberCm1(_) => "cm-1",
            SourceFeature::EnergyEv(_) => "eV",
            SourceFeature::Combined { .. } => "inputs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEstimate {
    /// GPa
    pub value: f64,
    /// GPa
    pub sigma: f64,
    pub gauge: GaugeId,
    pub source: SourceFeature,
}

impl PressureEstimate {
    /// Adds an independent uncertainty (e.g. from the line fit) in quadrature.
    pub fn with_added_sigma(mut self, extra: f64) -> Self {
        self.sigma = self.sigma.hypot(extra);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RubyScale {
    /// Unshifted R1 wavelength, nm.
    pub lambda0: f64,
    /// GPa
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanScale {
    /// Unstressed edge frequency, cm⁻¹.
    pub nu0: f64,
    /// GPa
    pub k0: f64,
    pub k0_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleCoefficients {
    pub ruby: RubyScale,
    pub raman: RamanScale,
}

impl Default for ScaleCoefficients {
    /// Ruby: 2020 practical scale. Raman edge: Akahama-Kawamura 2004.
    fn default() -> Self {
        Self {
            ruby: RubyScale {
                lambda0: 694.25,
                a: 1870.0,
                b: 5.63,
            },
            raman: RamanScale {
                nu0: 1334.0,
                k0: 547.0,
                k0_prime: 3.75,
            },
        }
    }
}

impl ScaleCoefficients {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.ruby.lambda0,
            self.ruby.a,
            self.raman.nu0,
            self.raman.k0,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(
                "scale coefficients lambda0, A, nu0, K0 must be positive".into(),
            ));
        }
        if !(self.ruby.b.is_finite() && self.raman.k0_prime.is_finite()) {
            return Err(Error::InvalidInput("non-finite scale coefficient".into()));
        }
        Ok(())
    }
}

/// `P = A δ (1 + B δ)` with `δ = (λ − λ₀)/λ₀`.
pub fn ruby_pressure(lambda: f64, coeffs: &ScaleCoefficients) -> Result<PressureEstimate> {
    let r = &coeffs.ruby;
    if !(lambda >= r.lambda0 - 1.0 && lambda <= r.lambda0 + 40.0) {
        return Err(Error::OutOfRange(format!(
            "ruby wavelength {lambda} nm outside [{}, {}]",
            r.lambda0 - 1.0,
            r.lambda0 + 40.0
        )));
    }
    let delta = (lambda - r.lambda0) / r.lambda0;
    let value = r.a * delta * (1.0 + r.b * delta);
    if value < RUBY_MIN_PRESSURE {
        return Err(Error::OutOfRange(format!(
            "ruby pressure {value:.3} GPa is negative"
        )));
    }
    Ok(PressureEstimate {
        value,
        sigma: RUBY_SIGMA_GPA,
        gauge: GaugeId::Ruby,
        source: SourceFeature::WavelengthNm(lambda),
    })
}

/// `P = K₀ ρ (1 + ½(K₀' − 1) ρ)` with `ρ = (ν − ν₀)/ν₀`.
pub fn raman_edge_pressure(nu: f64, coeffs: &ScaleCoefficients) -> Result<PressureEstimate> {
    let r = &coeffs.raman;
    if !(nu >= r.nu0 - 5.0 && nu.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "Raman edge {nu} cm-1 below {}",
            r.nu0 - 5.0
        )));
    }
    let rho = (nu - r.nu0) / r.nu0;
    Ok(PressureEstimate {
        value: r.k0 * rho * (1.0 + 0.5 * (r.k0_prime - 1.0) * rho),
        sigma: RAMAN_SIGMA_GPA,
        gauge: GaugeId::RamanEdge,
        source: SourceFeature::WavenumberCm1(nu),
    })
}

/// Reads pressure off a ZPL calibration.
///
/// The uncertainty combines the node pressure uncertainty with the energy
/// uncertainty mapped through the local slope, `σ_E / |dE/dP|`.
pub fn zpl_pressure(e: f64, cal: &GaugeCalibration) -> Result<PressureEstimate> {
    let value = cal.invert(e)?;
    let (_, sigma_e) = cal.eval_with_sigma(value)?;
    let slope = cal.slope(value)?;
    let from_energy = if slope > 0.0 {
        sigma_e / slope
    } else {
        f64::INFINITY
    };
    let sigma = cal.pressure_sigma_at(value)?.hypot(from_energy);
    Ok(PressureEstimate {
        value,
        sigma,
        gauge: GaugeId::for_species(cal.species()),
        source: SourceFeature::EnergyEv(e),
    })
}

/// Inverse-variance weighted mean of independent gauge readings.
pub fn combine_gauges(estimates: &[PressureEstimate]) -> Result<PressureEstimate> {
    match estimates {
        [] => Err(Error::InvalidInput(
            "no pressure estimates to combine".into(),
        )),
        [single] => {
            if !(single.sigma > 0.0) {
                return Err(Error::InvalidInput(
                    "pressure estimate with zero sigma".into(),
                ));
            }
            Ok(*single)
        }
        many => {
            if many.iter().any(|e| !(e.sigma > 0.0 && e.sigma.is_finite())) {
                return Err(Error::InvalidInput(
                    "pressure estimate with zero sigma".into(),
                ));
            }
            let wsum: f64 = many.iter().map(|e| e.sigma.powi(-2)).sum();
            let value = many.iter().map(|e| e.value * e.sigma.powi(-2)).sum::<f64>() / wsum;
            Ok(PressureEstimate {
                value,
                sigma: wsum.powf(-0.5),
                gauge: GaugeId::Combined,
                source: SourceFeature::Combined {
                    n_inputs: many.len(),
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::{build_calibration, CalibrationPoint};

    fn est(value: f64, sigma: f64) -> PressureEstimate {
        PressureEstimate {
            value,
            sigma,
            gauge: GaugeId::Ruby,
            source: SourceFeature::WavelengthNm(700.0),
        }
    }

    #[test]
    fn ruby_reference_and_hand_value() {
        let c = ScaleCoefficients::default();
        assert_eq!(ruby_pressure(694.25, &c).unwrap().value, 0.0);
        // δ = 0.01: 1870·0.01·1.0563 = 19.753
        let p = ruby_pressure(701.1925, &c).unwrap();
        assert!((p.value - 19.75).abs() < 0.01);
        assert_eq!(p.sigma, 1.0);
        assert_eq!(p.gauge, GaugeId::Ruby);
    }

    #[test]
    fn ruby_range() {
        let c = ScaleCoefficients::default();
        assert!(ruby_pressure(690.0, &c).is_err());
        assert!(ruby_pressure(735.0, &c).is_err());
        // inside the window but more negative than -0.5 GPa
        assert!(ruby_pressure(693.5, &c).is_err());
        assert!(ruby_pressure(694.1, &c).is_ok());
    }

    #[test]
    fn raman_reference_and_hand_value() {
        let c = ScaleCoefficients::default();
        assert_eq!(raman_edge_pressure(1334.0, &c).unwrap().value, 0.0);
        // ρ = 0.05: 547·0.05·1.06875 = 29.23
        let p = raman_edge_pressure(1334.0 * 1.05, &c).unwrap();
        assert!((p.value - 29.23).abs() < 0.005);
        assert_eq!(p.sigma, 8.0);
        assert!(raman_edge_pressure(1328.0, &c).is_err());
    }

    #[test]
    fn gauges_increase_with_feature() {
        let c = ScaleCoefficients::default();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let lambda = 694.2 + 0.1 * i as f64;
            let p = ruby_pressure(lambda, &c).unwrap().value;
            assert!(p > prev);
            prev = p;
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let p = raman_edge_pressure(1329.0 + i as f64, &c).unwrap().value;
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn zpl_linear_calibration() {
        let pts: Vec<_> = (0..=10)
            .map(|i| {
                CalibrationPoint::new(10.0 * i as f64, 1.0, 1.68 + 0.01 * i as f64, 0.001).unwrap()
            })
            .collect();
        let cal = build_calibration(Species::SiV, &pts).unwrap();
        let zero = zpl_pressure(1.68, &cal).unwrap();
        assert_eq!(zero.value, 0.0);
        let p = zpl_pressure(1.690, &cal).unwrap();
        assert!((p.value - 10.0).abs() < 1e-9);
        assert_eq!(p.gauge, GaugeId::ZplSiV);
        // σ_P = hypot(1, 0.001 / 0.001)
        assert!((p.sigma - 2f64.sqrt()).abs() < 1e-9);
        assert!(matches!(
            zpl_pressure(1.60, &cal),
            Err(Error::ExtrapolationRefused { .. })
        ));
    }

    #[test]
    fn combination_hand_values() {
        let one = combine_gauges(&[est(10.0, 1.0)]).unwrap();
        assert_eq!(one, est(10.0, 1.0));

        let a = combine_gauges(&[est(10.0, 1.0), est(10.0, 8.0)]).unwrap();
        assert!((a.value - 10.0).abs() < 1e-12);
        assert!((a.sigma - 0.992).abs() < 5e-4);
        assert_eq!(a.gauge, GaugeId::Combined);

        let b = combine_gauges(&[est(10.0, 1.0), est(20.0, 1.0)]).unwrap();
        assert!((b.value - 15.0).abs() < 1e-12);
        assert!((b.sigma - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn combination_errors() {
        assert!(combine_gauges(&[]).is_err());
        assert!(combine_gauges(&[est(1.0, 1.0), est(2.0, 0.0)]).is_err());
        assert!(combine_gauges(&[est(2.0, 0.0)]).is_err());
    }

    #[test]
    fn fit_sigma_adds_in_quadrature() {
        let p = est(10.0, 1.0).with_added_sigma(1.0);
        assert!((p.sigma - 2f64.sqrt()).abs() < 1e-15);
    }
}
