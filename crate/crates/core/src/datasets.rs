//! Reference tables shipped with the crate.
//!
//! The calibration tables are reconstructions of the published SiV and GeV
//! pressure series at the published pressure steps, good to about ±3 meV and
//! ±1 GPa; the authoritative measurements live in the authors' data deposit.
//! Theory curves and Kohn-Sham level traces are illustrative stand-ins with
//! the published zero-pressure energies and low-pressure slopes.

use crate::calib::{GaugeCalibration, LevelTrace, Species};
use crate::io::{self, Dataset, TheoryCurve};
use crate::spectra::Spectrum;
use crate::{Error, Result};

const SIV_POINTS: &str = include_str!("../data/siv_zpl_vs_pressure.csv");
const GEV_POINTS: &str = include_str!("../data/gev_zpl_vs_pressure.csv");
const SIV_AGGREGATES: &str = include_str!("../data/siv_aggregates_40gpa.csv");
const CROSSOVER: &str = include_str!("../data/gauge_crossover.csv");
const THEORY_SIV: &str = include_str!("../data/theory_siv.csv");
const THEORY_GEV: &str = include_str!("../data/theory_gev.csv");
const THEORY_SNV: &str = include_str!("../data/theory_snv.csv");
const LEVELS_SIV: &str = include_str!("../data/levels_siv.csv");
const LEVELS_GEV: &str = include_str!("../data/levels_gev.csv");
const LEVELS_SNV: &str = include_str!("../data/levels_snv.csv");
const GEV_SPECTRUM_140: &str = include_str!("../data/gev_spectrum_140gpa.csv");

/// Raw text of the bundled calibration table.
pub fn dataset_text(species: Species) -> Result<&'static str> {
    match species {
        Species::SiV => Ok(SIV_POINTS),
        Species::GeV => Ok(GEV_POINTS),
        Species::SnV => Err(Error::InvalidInput(
            "no SnV measurements are bundled".into(),
        )),
    }
}

pub fn dataset(species: Species) -> Result<Dataset> {
    io::parse_dataset(dataset_text(species)?)
}

/// Calibration built from the bundled table with the species' default
/// low-pressure mask.
pub fn calibration(species: Species) -> Result<GaugeCalibration> {
    GaugeCalibration::build_masked(
        species,
        &dataset(species)?.points,
        species.default_mask_below(),
    )
}

/// Calibration built from every bundled point.
pub fn calibration_unmasked(species: Species) -> Result<GaugeCalibration> {
    GaugeCalibration::build(species, &dataset(species)?.points)
}

pub fn theory(species: Species) -> TheoryCurve {
    let text = match species {
        Species::SiV => THEORY_SIV,
        Species::GeV => THEORY_GEV,
        Species::SnV => THEORY_SNV,
    };
    io::parse_theory(text).expect("bundled theory table parses")
}

pub fn level_trace(species: Species) -> LevelTrace {
    let text = match species {
        Species::SiV => LEVELS_SIV,
        Species::GeV => LEVELS_GEV,
        Species::SnV => LEVELS_SNV,
    };
    io::parse_level_trace(text).expect("bundled level trace parses")
}

/// SiV centre energies of the seven aggregates at the 40 GPa step, eV.
pub fn siv_aggregates() -> Vec<f64> {
    let (_, rows) = io::split_csv_header(SIV_AGGREGATES);
    rows.iter()
        .skip(1)
        .map(|(_, line)| {
            io::split_fields(line)[1]
                .parse()
                .expect("bundled table parses")
        })
        .collect()
}

/// Simultaneous ruby and Raman-edge readings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverReading {
    pub step_gpa: f64,
    pub ruby_nm: f64,
    pub raman_cm1: f64,
}

pub fn gauge_crossover() -> Vec<CrossoverReading> {
    let (_, rows) = io::split_csv_header(CROSSOVER);
    rows.iter()
        .skip(1)
        .map(|(_, line)| {
            let f = io::split_fields(line);
            CrossoverReading {
                step_gpa: f[0].parse().expect("bundled table parses"),
                ruby_nm: f[1].parse().expect("bundled table parses"),
                raman_cm1: f[2].parse().expect("bundled table parses"),
            }
        })
        .collect()
}

/// Split GeV line at the 140 GPa step.
pub fn gev_spectrum_140gpa() -> Spectrum {
    io::parse_spectrum(GEV_SPECTRUM_140).expect("bundled spectrum parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        assert_eq!(dataset(Species::SiV).unwrap().points.len(), 18);
        assert_eq!(dataset(Species::GeV).unwrap().points.len(), 18);
        assert!(dataset(Species::SnV).is_err());
        for s in Species::ALL {
            assert_eq!(theory(s).species, s);
            assert_eq!(level_trace(s).species, s);
        }
        assert_eq!(siv_aggregates().len(), 7);
        assert_eq!(gauge_crossover().len(), 3);
        assert_eq!(gev_spectrum_140gpa().nominal_pressure(), Some(140.0));
    }

    #[test]
    fn bundled_calibration_ranges() {
        let siv = calibration(Species::SiV).unwrap();
        assert_eq!(siv.range(), (1.0, 180.0));
        let gev = calibration(Species::GeV).unwrap();
        assert_eq!(gev.range(), (20.0, 168.0));
        assert_eq!(gev.excluded().len(), 2);
        assert_eq!(
            calibration_unmasked(Species::GeV).unwrap().range(),
            (8.0, 168.0)
        );
    }
}
