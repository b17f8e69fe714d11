//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson).

use crate::{Error, Result};

/// Shape-preserving cubic through strictly increasing abscissae.
///
/// Node slopes start from the weighted harmonic mean of the neighbouring
/// secants (zero at local extrema), and every interval is then checked
/// against the Fritsch-Carlson region `α² + β² ≤ 9`, rescaling when outside.
/// Monotone data therefore yield a monotone interpolant that passes through
/// every node.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidInput("x and y lengths differ".into()));
        }
        if n < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite interpolation node".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "abscissae must be strictly increasing".into(),
            ));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = y
            .windows(2)
            .zip(&h)
            .map(|(w, h)| (w[1] - w[0]) / h)
            .collect();

        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = delta[0];
            m[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 * d1 > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }

        for k in 0..n - 1 {
            if delta[k] == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let alpha = m[k] / delta[k];
            let beta = m[k + 1] / delta[k];
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                m[k] = tau * alpha * delta[k];
                m[k + 1] = tau * beta * delta[k];
            }
        }
        Ok(Self { x, y, slopes: m })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn node_slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value at `t`; outside the domain the end cubics are continued.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.interval(t);
        if t == self.x[k] {
            return self.y[k];
        }
        if t == self.x[k + 1] {
            return self.y[k + 1];
        }
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k]
            + h10 * h * self.slopes[k]
            + h01 * self.y[k + 1]
            + h11 * h * self.slopes[k + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let k = self.interval(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.y[k] + d10 * self.slopes[k] + d01 * self.y[k + 1] + d11 * self.slopes[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_affine_data() {
        let x = vec![0.0, 3.0, 10.0, 11.0, 25.0];
        let y: Vec<f64> = x.iter().map(|p| 1.68 + 0.001 * p).collect();
        let c = MonotoneCubic::new(x.clone(), y).unwrap();
        for w in x.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!((c.eval(mid) - (1.68 + 0.001 * mid)).abs() < 1e-12);
            assert!((c.derivative(mid) - 0.001).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_at_nodes() {
        let x = vec![1.0, 9.0, 20.0, 32.0];
        let y = vec![1.681, 1.689, 1.699, 1.708];
        let c = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(c.eval(*a), *b);
        }
    }

    #[test]
    fn flat_segment_stays_flat() {
        let c = MonotoneCubic::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        for i in 0..=100 {
            let t = 1.0 + i as f64 / 100.0;
            assert!((c.eval(t) - 1.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_give_monotone_curve(
            steps in prop::collection::vec((0.1f64..20.0, 1e-4f64..0.05), 2..15)
        ) {
            let mut x = vec![0.0];
            let mut y = vec![1.0];
            for (dx, dy) in &steps {
                x.push(x.last().unwrap() + dx);
                y.push(y.last().unwrap() + dy);
            }
            let c = MonotoneCubic::new(x.clone(), y).unwrap();
            let (lo, hi) = c.domain();
            let mut prev = c.eval(lo);
            for i in 1..=500 {
                let t = lo + (hi - lo) * i as f64 / 500.0;
                let v = c.eval(t);
                prop_assert!(v >= prev, "decrease at {}", t);
                prev = v;
            }
        }
    }
}
