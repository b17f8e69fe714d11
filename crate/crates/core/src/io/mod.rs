//! Text file formats.
//!
//! Parameter files are `key = value` documents with `#` comments; tabular
//! data are CSV with `#`-prefixed `key=value` metadata lines. Floating-point
//! values are written with 17 significant digits so that every value
//! re-parses to the identical `f64`.

mod calibration;
mod fit;
mod kv;
mod params;
mod spectrum;

use std::path::Path;

pub use calibration::{
    calibration_to_string, dataset_to_string, level_trace_to_string, parse_calibration,
    parse_dataset, parse_level_trace, parse_theory, theory_to_string, Dataset, TheoryCurve,
};
pub use fit::{fit_to_string, parse_fit};
pub use kv::KvDocument;
pub use params::{
    eos_params_to_string, parse_eos_params, parse_pressure, parse_run_config,
    parse_scale_coefficients, pressure_to_string, run_config_to_string,
    scale_coefficients_to_string, RunConfig,
};
pub use spectrum::{parse_spectrum, spectrum_to_string};

use crate::Result;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| crate::Error::parse(line, format!("'{}' is not a number: {e}", s.trim())))
}

pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn write_string(path: impl AsRef<Path>, text: &str) -> Result<()> {
    if let Some(parent) = path.as_ref().parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(std::fs::write(path, text)?)
}

/// Splits `#`-prefixed `key=value` metadata from the data lines of a CSV.
/// Returns the metadata and the remaining non-blank lines with their
/// 1-based line numbers.
pub(crate) fn split_csv_header(text: &str) -> (Vec<(String, String)>, Vec<(usize, &str)>) {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        rows.push((i + 1, line));
    }
    (meta, rows)
}

pub(crate) fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}
