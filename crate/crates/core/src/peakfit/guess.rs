use super::model::{lorentzian_eval, LorentzianParams};
use crate::spectra::Spectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InitialGuess {
    pub peaks: Vec<LorentzianParams>,
    pub baseline: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    percentile(values, 0.5)
}

/// Width of the region around `peak` where `y` stays above `level`,
/// interpolating the crossings linearly.
fn crossing_width(x: &[f64], y: &[f64], peak: usize, level: f64) -> Option<f64> {
    let left = (1..=peak).rev().find(|&i| y[i - 1] < level).map(|i| {
        let t = (level - y[i - 1]) / (y[i] - y[i - 1]);
        x[i - 1] + t * (x[i] - x[i - 1])
    });
    let right = (peak..x.len() - 1).find(|&i| y[i + 1] < level).map(|i| {
        let t = (y[i] - level) / (y[i] - y[i + 1]);
        x[i] + t * (x[i + 1] - x[i])
    });
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[peak] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[peak])),
        (None, None) => None,
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    values
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best, (i, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
}

/// Starting point for [`fit_peaks`](super::fit_peaks).
///
/// The baseline is the 5th percentile of the intensities. The first peak
/// sits on the global maximum with its width read from the half-maximum
/// crossings; a second peak goes on the largest remaining residual at least
/// one estimated width away from the first.
pub fn initial_guess(s: &Spectrum, n_peaks: usize) -> Result<InitialGuess> {
    if !(1..=2).contains(&n_peaks) {
        return Err(Error::InvalidInput(format!(
            "n_peaks must be 1 or 2, got {n_peaks}"
        )));
    }
    let x = s.axis();
    let y = s.intensity();
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let baseline = percentile(&sorted, 0.05);
    let med = percentile(&sorted, 0.5);
    let mad = median(&mut y.iter().map(|v| (v - med).abs()).collect::<Vec<_>>());

    let (imax, ymax) = argmax(y.iter().copied()).expect("spectrum is non-empty");
    let amplitude = ymax - baseline;
    if !(amplitude > 3.0 * mad) {
        return Err(Error::NoPeak(format!(
            "peak height {amplitude:.3e} does not exceed 3x MAD {mad:.3e}"
        )));
    }
    let (lo, hi) = s.range();
    let step = (hi - lo) / (x.len() - 1) as f64;
    let fwhm = crossing_width(x, y, imax, baseline + 0.5 * amplitude)
        .unwrap_or((hi - lo) / 4.0)
        .max(step);
    let first = LorentzianParams::new(x[imax], fwhm, amplitude)?;
    if n_peaks == 1 {
        return Ok(InitialGuess {
            peaks: vec![first],
            baseline,
        });
    }

    let residual: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| yi - lorentzian_eval(&first, baseline, xi))
        .collect();
    let candidate = argmax(x.iter().zip(&residual).map(|(&xi, &ri)| {
        if (xi - first.center).abs() >= fwhm {
            ri
        } else {
            f64::NEG_INFINITY
        }
    }))
    .filter(|&(_, r)| r.is_finite());
    let second = match candidate {
        Some((i, r)) if r > 0.0 => LorentzianParams::new(x[i], fwhm, r)?,
        Some((i, _)) => LorentzianParams::new(x[i], fwhm, 0.5 * amplitude)?,
        None => {
            let c = if first.center - lo > hi - first.center {
                first.center - fwhm
            } else {
                first.center + fwhm
            };
            LorentzianParams::new(c, fwhm, 0.5 * amplitude)?
        }
    };
    let mut peaks = vec![first, second];
    peaks.sort_by(|a, b| a.center.total_cmp(&b.center));
    Ok(InitialGuess { peaks, baseline })
}

/// Doublet start for a blended line: two half-width components a quarter
/// of the blended width either side of the single-peak guess, splitting its
/// height.
pub fn split_guess(s: &Spectrum) -> Result<InitialGuess> {
    let single = initial_guess(s, 1)?;
    let p = single.peaks[0];
    let w = 0.5 * p.fwhm;
    let peaks = vec![
        LorentzianParams::new(p.center - 0.5 * w, w, 0.6 * p.amplitude)?,
        LorentzianParams::new(p.center + 0.5 * w, w, 0.6 * p.amplitude)?,
    ];
    Ok(InitialGuess {
        peaks,
        baseline: single.baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{synth_spectrum, AxisUnit, Grid};

    #[test]
    fn single_peak_on_fine_grid() {
        let g = Grid::new(1.60, 1.76, 321).unwrap();
        let p = LorentzianParams::new(1.6803, 0.02, 1000.0).unwrap();
        let s = synth_spectrum(&[p], 5.0, 0.0, 0, g).unwrap();
        let guess = initial_guess(&s, 1).unwrap();
        assert_eq!(guess.peaks.len(), 1);
        assert!((guess.peaks[0].center - 1.6803).abs() <= g.step());
        assert!((guess.peaks[0].fwhm - 0.02).abs() < 0.005);
    }

    #[test]
    fn constant_spectrum_has_no_peak() {
        let x: Vec<f64> = (0..50).map(|i| 1.6 + 0.001 * i as f64).collect();
        let s = Spectrum::new(AxisUnit::Electronvolt, x, vec![42.0; 50]).unwrap();
        assert!(matches!(initial_guess(&s, 1), Err(Error::NoPeak(_))));
        assert!(matches!(initial_guess(&s, 2), Err(Error::NoPeak(_))));
    }

    #[test]
    fn two_equal_peaks() {
        let g = Grid::new(2.20, 2.44, 241).unwrap();
        let peaks = [
            LorentzianParams::new(2.30, 0.02, 1000.0).unwrap(),
            LorentzianParams::new(2.34, 0.02, 1000.0).unwrap(),
        ];
        let s = synth_spectrum(&peaks, 0.0, 0.0, 0, g).unwrap();
        let guess = initial_guess(&s, 2).unwrap();
        assert!(
            (guess.peaks[0].center - 2.30).abs() <= g.step() + 1e-12,
            "{:?}",
            guess
        );
        assert!(
            (guess.peaks[1].center - 2.34).abs() <= g.step() + 1e-12,
            "{:?}",
            guess
        );
    }

    #[test]
    fn rejects_three_peaks() {
        let g = Grid::new(2.20, 2.44, 241).unwrap();
        let s = synth_spectrum(
            &[LorentzianParams::new(2.3, 0.02, 1.0).unwrap()],
            0.0,
            0.0,
            0,
            g,
        )
        .unwrap();
        assert!(initial_guess(&s, 3).is_err());
    }
}
