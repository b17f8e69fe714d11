use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianParams {
    /// Line centre, eV.
    pub center: f64,
    /// Full width at half maximum, eV.
    pub fwhm: f64,
    /// Peak height above the baseline.
    pub amplitude: f64,
}

impl LorentzianParams {
    pub fn new(center: f64, fwhm: f64, amplitude: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidInput(format!(
                "peak center {center} is not finite"
            )));
        }
        if !(fwhm > 0.0 && fwhm.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "fwhm must be positive, got {fwhm}"
            )));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        Ok(Self {
            center,
            fwhm,
            amplitude,
        })
    }
}

/// `baseline + A (Γ/2)² / ((x - x0)² + (Γ/2)²)`.
pub fn lorentzian_eval(p: &LorentzianParams, baseline: f64, x: f64) -> f64 {
    let h2 = 0.25 * p.fwhm * p.fwhm;
    let d = x - p.center;
    baseline + p.amplitude * h2 / (d * d + h2)
}

/// Sum of `n_peaks` Lorentzians on a constant baseline, in the solver's
/// internal coordinates.
///
/// The parameter vector is `[x0, ln Γ, ln A]` per peak followed by the
/// baseline. Working in logarithms keeps width and height positive without
/// explicit constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LorentzianModel {
    pub n_peaks: usize,
}

impl LorentzianModel {
    pub fn new(n_peaks: usize) -> Self {
        Self { n_peaks }
    }

    pub fn n_params(&self) -> usize {
        3 * self.n_peaks + 1
    }

    pub fn pack(&self, peaks: &[LorentzianParams], baseline: f64) -> DVector<f64> {
        debug_assert_eq!(peaks.len(), self.n_peaks);
        let mut v = DVector::zeros(self.n_params());
        for (k, p) in peaks.iter().enumerate() {
            v[3 * k] = p.center;
            v[3 * k + 1] = p.fwhm.ln();
            v[3 * k + 2] = p.amplitude.ln();
        }
        v[3 * self.n_peaks] = baseline;
        v
    }

    pub fn unpack(&self, v: &DVector<f64>) -> (Vec<LorentzianParams>, f64) {
        let peaks = (0..self.n_peaks)
            .map(|k| LorentzianParams {
                center: v[3 * k],
                fwhm: v[3 * k + 1].exp(),
                amplitude: v[3 * k + 2].exp(),
            })
            .collect();
        (peaks, v[3 * self.n_peaks])
    }

    pub fn eval(&self, v: &DVector<f64>, x: f64) -> f64 {
        let mut y = v[3 * self.n_peaks];
        for k in 0..self.n_peaks {
            let fwhm = v[3 * k + 1].exp();
            let h2 = 0.25 * fwhm * fwhm;
            let d = x - v[3 * k];
            y += v[3 * k + 2].exp() * h2 / (d * d + h2);
        }
        y
    }

    /// Analytic derivatives of the model with respect to the internal
    /// parameters, one row per abscissa.
    pub fn jacobian(&self, v: &DVector<f64>, xs: &[f64]) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(xs.len(), self.n_params());
        for (i, &x) in xs.iter().enumerate() {
            for k in 0..self.n_peaks {
                let fwhm = v[3 * k + 1].exp();
                let amp = v[3 * k + 2].exp();
                let h2 = 0.25 * fwhm * fwhm;
                let d = x - v[3 * k];
                let denom = d * d + h2;
                let shape = h2 / denom;
                jac[(i, 3 * k)] = 2.0 * amp * h2 * d / (denom * denom);
                jac[(i, 3 * k + 1)] = 2.0 * amp * h2 * d * d / (denom * denom);
                jac[(i, 3 * k + 2)] = amp * shape;
            }
            jac[(i, 3 * self.n_peaks)] = 1.0;
        }
        jac
    }

    /// Jacobian with respect to the natural parameters
    /// `[x0, Γ, A]` per peak followed by the baseline.
    pub fn natural_jacobian(&self, v: &DVector<f64>, xs: &[f64]) -> DMatrix<f64> {
        let mut jac = self.jacobian(v, xs);
        for k in 0..self.n_peaks {
            let fwhm = v[3 * k + 1].exp();
            let amp = v[3 * k + 2].exp();
            jac.column_mut(3 * k + 1).scale_mut(1.0 / fwhm);
            jac.column_mut(3 * k + 2).scale_mut(1.0 / amp);
        }
        jac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_half_maximum() {
        let p = LorentzianParams::new(1.68, 0.02, 1000.0).unwrap();
        assert_eq!(lorentzian_eval(&p, 10.0, 1.68), 1010.0);
        assert!((lorentzian_eval(&p, 10.0, 1.67) - 510.0).abs() < 1e-9);
        assert!((lorentzian_eval(&p, 10.0, 1.69) - 510.0).abs() < 1e-9);
    }

    #[test]
    fn hand_evaluation_off_center() {
        // 10 + 1000 * 0.01^2 / (0.02^2 + 0.01^2) = 210
        let p = LorentzianParams::new(1.68, 0.02, 1000.0).unwrap();
        assert!((lorentzian_eval(&p, 10.0, 1.70) - 210.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_shape() {
        assert!(LorentzianParams::new(1.0, 0.0, 1.0).is_err());
        assert!(LorentzianParams::new(1.0, 0.1, -1.0).is_err());
    }

    #[test]
    fn pack_unpack_and_eval_agree() {
        let m = LorentzianModel::new(2);
        let peaks = [
            LorentzianParams::new(2.30, 0.02, 900.0).unwrap(),
            LorentzianParams::new(2.34, 0.03, 400.0).unwrap(),
        ];
        let v = m.pack(&peaks, 12.0);
        let (back, b) = m.unpack(&v);
        assert_eq!(b, 12.0);
        for (p, q) in peaks.iter().zip(&back) {
            assert!((p.fwhm - q.fwhm).abs() < 1e-15);
            assert!((p.amplitude - q.amplitude).abs() < 1e-10);
        }
        for x in [2.25, 2.31, 2.36] {
            let direct: f64 = peaks
                .iter()
                .map(|p| lorentzian_eval(p, 0.0, x))
                .sum::<f64>()
                + 12.0;
            assert!((m.eval(&v, x) - direct).abs() < 1e-9);
        }
    }
}
