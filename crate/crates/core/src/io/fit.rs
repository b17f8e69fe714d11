use nalgebra::DMatrix;

use super::{fmt_f64, parse_f64, KvDocument};
use crate::peakfit::{FitResult, LorentzianParams};
use crate::{Error, Result};

/// Key-value rendering of a [`FitResult`]. Peak keys are 1-based
/// (`center_1`, `fwhm_1`, ...); the covariance is written row-major.
pub fn fit_to_string(f: &FitResult) -> String {
    let mut doc = KvDocument::new();
    doc.insert("n_peaks", f.n_peaks().to_string());
    for (k, p) in f.peaks.iter().enumerate() {
        doc.insert(format!("center_{}", k + 1), fmt_f64(p.center));
        doc.insert(format!("fwhm_{}", k + 1), fmt_f64(p.fwhm));
        doc.insert(format!("amplitude_{}", k + 1), fmt_f64(p.amplitude));
    }
    doc.insert("baseline", fmt_f64(f.baseline));
    doc.insert("residual_rms", fmt_f64(f.residual_rms));
    doc.insert("converged", f.converged.to_string());
    doc.insert("n_points", f.n_points.to_string());
    doc.insert("n_iterations", f.n_iterations.to_string());
    doc.insert("covariance_dim", f.covariance.nrows().to_string());
    let cov: Vec<String> = (0..f.covariance.nrows())
        .flat_map(|i| (0..f.covariance.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| fmt_f64(f.covariance[(i, j)]))
        .collect();
    doc.insert("covariance", cov.join(", "));
    doc.to_text()
}

pub fn parse_fit(text: &str) -> Result<FitResult> {
    let doc = KvDocument::parse(text)?;
    let n_peaks: usize = doc.require_parsed("n_peaks")?;
    if !(1..=2).contains(&n_peaks) {
        return Err(Error::parse(
            0,
            format!("n_peaks must be 1 or 2, got {n_peaks}"),
        ));
    }
    let mut peaks = Vec::with_capacity(n_peaks);
    for k in 1..=n_peaks {
        peaks.push(LorentzianParams {
            center: doc.require_parsed(&format!("center_{k}"))?,
            fwhm: doc.require_parsed(&format!("fwhm_{k}"))?,
            amplitude: doc.require_parsed(&format!("amplitude_{k}"))?,
        });
    }
    let dim: usize = doc.require_parsed("covariance_dim")?;
    if dim != 3 * n_peaks + 1 {
        return Err(Error::parse(
            0,
            format!("covariance_dim {dim} does not match {n_peaks} peaks"),
        ));
    }
    let values = doc
        .require("covariance")?
        .split(',')
        .map(|v| parse_f64(v, 0))
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != dim * dim {
        return Err(Error::parse(
            0,
            format!(
                "covariance has {} entries, expected {}",
                values.len(),
                dim * dim
            ),
        ));
    }
    Ok(FitResult {
        peaks,
        baseline: doc.require_parsed("baseline")?,
        covariance: DMatrix::from_row_slice(dim, dim, &values),
        residual_rms: doc.require_parsed("residual_rms")?,
        n_points: doc.require_parsed("n_points")?,
        n_iterations: doc.require_parsed("n_iterations")?,
        converged: doc.require_parsed("converged")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peakfit::fit_peaks;
    use crate::spectra::{synth_spectrum, Grid};

    #[test]
    fn round_trip_of_real_fit() {
        let g = Grid::new(2.2, 2.44, 241).unwrap();
        let peaks = [
            LorentzianParams::new(2.30, 0.02, 1000.0).unwrap(),
            LorentzianParams::new(2.34, 0.02, 700.0).unwrap(),
        ];
        let s = synth_spectrum(&peaks, 30.0, 8.0, 11, g).unwrap();
        let f = fit_peaks(&s, 2, None).unwrap();
        let text = fit_to_string(&f);
        assert!(text.contains("center_2 = "));
        assert_eq!(parse_fit(&text).unwrap(), f);
    }

    #[test]
    fn rejects_inconsistent_covariance() {
        let text = "n_peaks = 1\ncenter_1 = 1\nfwhm_1 = 1\namplitude_1 = 1\nbaseline = 0\n\
                    residual_rms = 0\nconverged = true\nn_points = 10\nn_iterations = 1\n\
                    covariance_dim = 4\ncovariance = 1, 2, 3\n";
        assert!(parse_fit(text).is_err());
    }
}
