use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// Mean of repeated measurements with a two-sided 95 % half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementStat {
    pub mean: f64,
    pub half_width_95: f64,
    pub n: usize,
}

/// Two-sided Student-t quantile `t_{dof, p}`.
pub fn student_t_quantile(dof: f64, p: f64) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidInput(format!("student t with {dof} dof: {e}")))?;
    Ok(dist.inverse_cdf(p))
}

/// Arithmetic mean and Student-t confidence half width at `level`.
///
/// A single value carries no dispersion estimate, so its half width is 0.
pub fn mean_with_ci(values: &[f64], level: f64) -> Result<MeasurementStat> {
    if values.is_empty() {
        return Err(Error::InvalidInput("mean of an empty list".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence level {level} not in (0, 1)"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite measurement".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(MeasurementStat {
            mean,
            half_width_95: 0.0,
            n,
        });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = student_t_quantile((n - 1) as f64, 0.5 + level / 2.0)?;
    Ok(MeasurementStat {
        mean,
        half_width_95: t * (var / n as f64).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance() {
        let s = mean_with_ci(&[1.68, 1.68, 1.68], 0.95).unwrap();
        assert!((s.mean - 1.68).abs() < 1e-15);
        assert!(s.half_width_95.abs() < 1e-12);
        assert_eq!(s.n, 3);
    }

    #[test]
    fn two_values_hand_evaluation() {
        // t_{1,0.975} = 12.7062, s = 0.70711
        let s = mean_with_ci(&[1.0, 2.0], 0.95).unwrap();
        assert_eq!(s.mean, 1.5);
        assert!((s.half_width_95 - 12.7062 * 0.707107 / 2f64.sqrt()).abs() < 1e-3);
        assert!((s.half_width_95 - 6.353).abs() < 1e-3);
    }

    #[test]
    fn single_value_has_no_width() {
        let s = mean_with_ci(&[2.06], 0.95).unwrap();
        assert_eq!(s.half_width_95, 0.0);
        assert_eq!(s.n, 1);
    }

    #[test]
    fn empty_is_error() {
        assert!(mean_with_ci(&[], 0.95).is_err());
    }

    #[test]
    fn half_width_scales_as_inverse_sqrt_n() {
        // Alternating ±1 has the same sample variance pattern for every even n;
        // rescale so the sample variance is exactly 1.
        let make = |n: usize| -> Vec<f64> {
            let raw: Vec<f64> = (0..n)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            let var = raw.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64;
            raw.iter().map(|v| v / var.sqrt()).collect()
        };
        for n in [4usize, 16, 64] {
            let s = mean_with_ci(&make(n), 0.95).unwrap();
            let t = student_t_quantile((n - 1) as f64, 0.975).unwrap();
            let normalized = s.half_width_95 * (n as f64).sqrt() / t;
            assert!((normalized - 1.0).abs() < 1e-12, "n = {n}: {normalized}");
        }
    }

    #[test]
    fn permutation_invariant() {
        let a = mean_with_ci(&[1.0, 4.0, 2.5, 3.0], 0.95).unwrap();
        let b = mean_with_ci(&[3.0, 2.5, 1.0, 4.0], 0.95).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-15);
        assert!((a.half_width_95 - b.half_width_95).abs() < 1e-14);
    }
}
