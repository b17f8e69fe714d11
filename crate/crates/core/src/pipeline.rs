//! Batch processing of spectra into fitted line positions and pressures.

use std::str::FromStr;

use rayon::prelude::*;

use crate::calib::GaugeCalibration;
use crate::gauges::{zpl_pressure, PressureEstimate};
use crate::io::fmt_f64;
use crate::peakfit::{center_energy, center_estimate, fit_peaks, select_model, FitResult};
use crate::spectra::{resample_to_energy, AxisUnit, MeasurementStat, Spectrum};
use crate::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakMode {
    Auto,
    One,
    Two,
}

impl FromStr for PeakMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(PeakMode::Auto),
            "1" => Ok(PeakMode::One),
            "2" => Ok(PeakMode::Two),
            other => Err(Error::InvalidInput(format!(
                "--peaks must be auto, 1 or 2, got '{other}'"
            ))),
        }
    }
}

/// Fits a spectrum with the requested peak count, converting a wavelength
/// axis to energy first.
pub fn fit_spectrum(s: &Spectrum, mode: PeakMode) -> Result<FitResult> {
    let s = if s.axis_unit() == AxisUnit::Electronvolt {
        s.clone()
    } else {
        resample_to_energy(s)?
    };
    match mode {
        PeakMode::Auto => select_model(&s),
        PeakMode::One => fit_peaks(&s, 1, None),
        PeakMode::Two => fit_peaks(&s, 2, None),
    }
}

/// Outcome for one spectrum. An unconverged fit is still recorded, without
/// a centre or pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRecord {
    pub spectrum_id: String,
    pub fit: FitResult,
    pub center: Option<MeasurementStat>,
    pub pressure: Option<PressureEstimate>,
    pub processed_at_unix: u64,
    pub tool_version: &'static str,
}

pub fn process_spectrum(
    id: &str,
    s: &Spectrum,
    mode: PeakMode,
    calibration: Option<&GaugeCalibration>,
    processed_at_unix: u64,
) -> Result<PipelineRecord> {
    let fit = fit_spectrum(s, mode)?;
    if !fit.converged {
        return Ok(PipelineRecord {
            spectrum_id: id.to_string(),
            fit,
            center: None,
            pressure: None,
            processed_at_unix,
            tool_version: TOOL_VERSION,
        });
    }
    let center = center_energy(&fit)?;
    let pressure = match calibration {
        Some(cal) => {
            let p = zpl_pressure(center.mean, cal)?;
            let (_, sigma_e) = center_estimate(&fit)?;
            Some(p.with_added_sigma(sigma_e / cal.slope(p.value)?))
        }
        None => None,
    };
    Ok(PipelineRecord {
        spectrum_id: id.to_string(),
        fit,
        center: Some(center),
        pressure,
        processed_at_unix,
        tool_version: TOOL_VERSION,
    })
}

/// Processes spectra on up to `parallelism` threads. Results come back in
/// input order.
pub fn run_batch(
    inputs: &[(String, Spectrum)],
    mode: PeakMode,
    calibration: Option<&GaugeCalibration>,
    parallelism: usize,
    processed_at_unix: u64,
) -> Result<Vec<Result<PipelineRecord>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        inputs
            .par_iter()
            .map(|(id, s)| process_spectrum(id, s, mode, calibration, processed_at_unix))
            .collect()
    }))
}

pub fn records_to_csv(records: &[PipelineRecord]) -> String {
    let mut out = String::from(
        "spectrum_id, n_peaks, center_ev, center_half_width_95_ev, pressure_gpa, pressure_sigma_gpa, gauge, converged, processed_at_unix, tool_version\n",
    );
    for r in records {
        let (c, cw) = match &r.center {
            Some(c) => (fmt_f64(c.mean), fmt_f64(c.half_width_95)),
            None => (String::new(), String::new()),
        };
        let (p, ps, g) = match &r.pressure {
            Some(p) => (
                fmt_f64(p.value),
                fmt_f64(p.sigma),
                p.gauge.as_str().to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        out.push_str(&format!(
            "{}, {}, {}, {}, {}, {}, {}, {}, {}, {}\n",
            r.spectrum_id,
            r.fit.n_peaks(),
            c,
            cw,
            p,
            ps,
            g,
            r.fit.converged,
            r.processed_at_unix,
            r.tool_version
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::Species;
    use crate::datasets;
    use crate::peakfit::LorentzianParams;
    use crate::spectra::{synth_spectrum, Grid};

    fn spectra() -> Vec<(String, Spectrum)> {
        let cal = datasets::calibration(Species::SiV).unwrap();
        [5.0, 40.0, 90.0, 150.0]
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let e = cal.eval(p).unwrap();
                let peak = LorentzianParams::new(e, 0.01 + 0.0001 * p, 800.0).unwrap();
                let g = Grid::new(1.60, 1.82, 221).unwrap();
                (
                    format!("s{i}"),
                    synth_spectrum(&[peak], 20.0, 4.0, i as u64, g).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn parallel_matches_serial() {
        let cal = datasets::calibration(Species::SiV).unwrap();
        let inputs = spectra();
        let serial = run_batch(&inputs, PeakMode::Auto, Some(&cal), 1, 7).unwrap();
        let parallel = run_batch(&inputs, PeakMode::Auto, Some(&cal), 4, 7).unwrap();
        let ok =
            |v: Vec<Result<PipelineRecord>>| v.into_iter().map(Result::unwrap).collect::<Vec<_>>();
        let (a, b) = (ok(serial), ok(parallel));
        assert_eq!(records_to_csv(&a), records_to_csv(&b));
        assert_eq!(
            a.iter().map(|r| r.spectrum_id.as_str()).collect::<Vec<_>>(),
            ["s0", "s1", "s2", "s3"]
        );
    }

    #[test]
    fn recovers_pressures_through_calibration() {
        let cal = datasets::calibration(Species::SiV).unwrap();
        for ((_, s), truth) in spectra().iter().zip([5.0, 40.0, 90.0, 150.0]) {
            let r = process_spectrum("x", s, PeakMode::One, Some(&cal), 0).unwrap();
            let p = r.pressure.unwrap();
            assert!((p.value - truth).abs() < 3.0 * p.sigma, "{truth}: {p:?}");
        }
    }

    #[test]
    fn peak_mode_parsing() {
        assert_eq!("auto".parse::<PeakMode>().unwrap(), PeakMode::Auto);
        assert!("3".parse::<PeakMode>().is_err());
    }
}
