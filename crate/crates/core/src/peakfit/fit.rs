use nalgebra::{DMatrix, DVector};

use super::guess::{initial_guess, split_guess, InitialGuess};
use super::lm::{levenberg_marquardt, LeastSquaresProblem, LmSettings};
use super::model::{LorentzianModel, LorentzianParams};
use crate::spectra::{student_t_quantile, AxisUnit, MeasurementStat, Spectrum};
use crate::{Error, Result};

/// BIC improvement the two-peak model must achieve to be preferred.
pub const BIC_MARGIN: f64 = 10.0;

/// Normal matrices whose correlation form has a smaller eigenvalue than
/// this are treated as singular.
const SINGULAR_EIGENVALUE: f64 = 1e-12;

/// Outcome of a Lorentzian fit.
///
/// `covariance` is over the natural parameters in the order
/// `[center, fwhm, amplitude]` per peak (peaks ascending by center), then the
/// baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub peaks: Vec<LorentzianParams>,
    pub baseline: f64,
    pub covariance: DMatrix<f64>,
    pub residual_rms: f64,
    pub n_points: usize,
    pub n_iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn n_peaks(&self) -> usize {
        self.peaks.len()
    }

    pub fn n_params(&self) -> usize {
        3 * self.peaks.len() + 1
    }

    pub fn rss(&self) -> f64 {
        self.residual_rms * self.residual_rms * self.n_points as f64
    }

    pub fn center_sigma(&self, k: usize) -> f64 {
        self.covariance[(3 * k, 3 * k)].max(0.0).sqrt()
    }

    /// Model value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.baseline
            + self
                .peaks
                .iter()
                .map(|p| super::lorentzian_eval(p, 0.0, x))
                .sum::<f64>()
    }
}

struct PeakProblem<'a> {
    model: LorentzianModel,
    x: &'a [f64],
    y: &'a [f64],
}

impl LeastSquaresProblem for PeakProblem<'_> {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .zip(self.y)
                .map(|(&x, &y)| self.model.eval(p, x) - y),
        )
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        self.model.jacobian(p, self.x)
    }

    fn data_norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `s²(JᵀJ)⁻¹` with a conditioning check on the correlation form of `JᵀJ`.
fn covariance(jac: &DMatrix<f64>, residual_variance: f64) -> Result<DMatrix<f64>> {
    let jtj = jac.tr_mul(jac);
    let n = jtj.ncols();
    let diag: Vec<f64> = (0..n).map(|i| jtj[(i, i)]).collect();
    if diag.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Singular(
            "parameter with no influence on the model".into(),
        ));
    }
    let corr = DMatrix::from_fn(n, n, |i, j| jtj[(i, j)] / (diag[i] * diag[j]).sqrt());
    let min_eig = corr.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eig > SINGULAR_EIGENVALUE) {
        return Err(Error::Singular(format!(
            "normal matrix is ill-conditioned (min correlation eigenvalue {min_eig:.3e})"
        )));
    }
    let inv_corr = corr
        .cholesky()
        .ok_or_else(|| Error::Singular("normal matrix is not positive definite".into()))?
        .inverse();
    let mut cov = DMatrix::from_fn(n, n, |i, j| inv_corr[(i, j)] / (diag[i] * diag[j]).sqrt());
    cov *= residual_variance;
    cov = (&cov + cov.transpose()) * 0.5;
    Ok(cov)
}

/// Least-squares fit of `n_peaks` Lorentzians on a constant baseline.
///
/// An iteration-capped run is returned as `Ok` with `converged == false`.
/// A fit whose centres leave the spectrum window is also flagged
/// unconverged. Without an explicit start a doublet is fitted from both
/// [`initial_guess`] and [`split_guess`].
pub fn fit_peaks(s: &Spectrum, n_peaks: usize, init: Option<&InitialGuess>) -> Result<FitResult> {
    fit_peaks_with(s, n_peaks, init, &LmSettings::default())
}

pub(crate) fn fit_peaks_with(
    s: &Spectrum,
    n_peaks: usize,
    init: Option<&InitialGuess>,
    settings: &LmSettings,
) -> Result<FitResult> {
    if s.axis_unit() != AxisUnit::Electronvolt {
        return Err(Error::InvalidInput(format!(
            "peak fits run on an electronvolt axis, got {}",
            s.axis_unit()
        )));
    }
    if !(1..=2).contains(&n_peaks) {
        return Err(Error::InvalidInput(format!(
            "n_peaks must be 1 or 2, got {n_peaks}"
        )));
    }
    let model = LorentzianModel::new(n_peaks);
    if s.len() <= model.n_params() {
        return Err(Error::TooFewPoints {
            needed: model.n_params() + 1,
            got: s.len(),
        });
    }
    let guess = match init {
        Some(g) if g.peaks.len() == n_peaks => g.clone(),
        Some(g) => {
            return Err(Error::InvalidInput(format!(
                "initial guess has {} peaks, expected {n_peaks}",
                g.peaks.len()
            )))
        }
        None if n_peaks == 2 => return fit_doublet_multistart(s, settings),
        None => initial_guess(s, n_peaks)?,
    };
    fit_from(s, model, &guess, settings)
}

/// Runs the doublet fit from the residual-based and the split start and
/// keeps the converged result with the lower RSS.
fn fit_doublet_multistart(s: &Spectrum, settings: &LmSettings) -> Result<FitResult> {
    let model = LorentzianModel::new(2);
    let starts = [initial_guess(s, 2)?, split_guess(s)?];
    let mut best: Option<Result<FitResult>> = None;
    for guess in &starts {
        let candidate = fit_from(s, model, guess, settings);
        let better = match (&best, &candidate) {
            (None, _) => true,
            (Some(Err(_)), Ok(_)) => true,
            (Some(Ok(b)), Ok(c)) => (c.converged, -c.rss()) > (b.converged, -b.rss()),
            _ => false,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one start")
}

fn fit_from(
    s: &Spectrum,
    model: LorentzianModel,
    guess: &InitialGuess,
    settings: &LmSettings,
) -> Result<FitResult> {
    let n_peaks = model.n_peaks;
    let problem = PeakProblem {
        model,
        x: s.axis(),
        y: s.intensity(),
    };
    let start = model.pack(&guess.peaks, guess.baseline);
    let outcome = levenberg_marquardt(&problem, start, settings);

    let n = s.len();
    let rss = 2.0 * outcome.cost;
    let (mut peaks, baseline) = model.unpack(&outcome.params);
    let jac = model.natural_jacobian(&outcome.params, s.axis());
    let mut cov = covariance(&jac, rss / (n - model.n_params()) as f64)?;

    let mut order: Vec<usize> = (0..n_peaks).collect();
    order.sort_by(|&a, &b| peaks[a].center.total_cmp(&peaks[b].center));
    if order.iter().enumerate().any(|(i, &k)| i != k) {
        let perm: Vec<usize> = order
            .iter()
            .flat_map(|&k| [3 * k, 3 * k + 1, 3 * k + 2])
            .chain(std::iter::once(3 * n_peaks))
            .collect();
        cov = DMatrix::from_fn(perm.len(), perm.len(), |i, j| cov[(perm[i], perm[j])]);
        peaks = order.iter().map(|&k| peaks[k]).collect();
    }

    let (lo, hi) = s.range();
    let inside = peaks.iter().all(|p| p.center >= lo && p.center <= hi);
    Ok(FitResult {
        peaks,
        baseline,
        covariance: cov,
        residual_rms: (rss / n as f64).sqrt(),
        n_points: n,
        n_iterations: outcome.iterations,
        converged: outcome.converged && inside,
    })
}

/// `N ln(RSS/N) + k ln N`.
///
/// The RSS is floored at rounding level relative to `data_scale` so that
/// noiseless fits compare by their parameter count alone.
pub fn bic(rss: f64, n_points: usize, n_params: usize, data_scale: f64) -> f64 {
    let n = n_points as f64;
    let floor = n * (1e-12 * data_scale).powi(2);
    let rss = rss.max(floor).max(f64::MIN_POSITIVE);
    n * (rss / n).ln() + n_params as f64 * n.ln()
}

/// Fits one and two peaks and keeps the doublet only when its BIC beats the
/// singlet's by more than [`BIC_MARGIN`]. Any failure of the doublet fit
/// falls back to the singlet.
pub fn select_model(s: &Spectrum) -> Result<FitResult> {
    let single = fit_peaks(s, 1, None)?;
    let double = match fit_peaks(s, 2, None) {
        Ok(f) if f.converged && single.converged => f,
        _ => return Ok(single),
    };
    let scale = s.intensity().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bic1 = bic(single.rss(), single.n_points, single.n_params(), scale);
    let bic2 = bic(double.rss(), double.n_points, double.n_params(), scale);
    if bic2 < bic1 - BIC_MARGIN {
        Ok(double)
    } else {
        Ok(single)
    }
}

/// Line position and its standard deviation, before any confidence scaling.
///
/// A doublet reports the unweighted mean of its two centres with the
/// variance `(σ₁² + σ₂² + 2σ₁₂) / 4` taken from the fit covariance.
pub fn center_estimate(f: &FitResult) -> Result<(f64, f64)> {
    if !f.converged {
        return Err(Error::NotConverged {
            iterations: f.n_iterations,
        });
    }
    match f.peaks.as_slice() {
        [p] => Ok((p.center, f.center_sigma(0))),
        [a, b] => {
            let var =
                (f.covariance[(0, 0)] + f.covariance[(3, 3)] + 2.0 * f.covariance[(0, 3)]) / 4.0;
            Ok((0.5 * (a.center + b.center), var.max(0.0).sqrt()))
        }
        other => Err(Error::InvalidInput(format!(
            "fit with {} peaks",
            other.len()
        ))),
    }
}

/// Centre energy as a [`MeasurementStat`] whose half width is the Student-t
/// 95 % interval on the fit's residual degrees of freedom.
pub fn center_energy(f: &FitResult) -> Result<MeasurementStat> {
    let (mean, sigma) = center_estimate(f)?;
    let dof = f.n_points.saturating_sub(f.n_params()).max(1);
    let t = student_t_quantile(dof as f64, 0.975)?;
    Ok(MeasurementStat {
        mean,
        half_width_95: t * sigma,
        n: f.n_points,
    })
}
