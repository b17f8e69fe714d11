use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::spectrum::{AxisUnit, Spectrum, MIN_POINTS};
use crate::peakfit::{lorentzian_eval, LorentzianParams};
use crate::{Error, Result};

/// Uniform sampling grid `[lo, hi]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "grid bounds [{lo}, {hi}] invalid"
            )));
        }
        if n < MIN_POINTS {
            return Err(Error::TooFewPoints {
                needed: MIN_POINTS,
                got: n,
            });
        }
        Ok(Self { lo, hi, n })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

/// Sum of Lorentzians on a constant baseline plus seeded Gaussian noise, on
/// an eV axis. ChaCha20 is counter based, so a seed reproduces the trace
/// bit for bit on every platform.
pub fn synth_spectrum(
    peaks: &[LorentzianParams],
    baseline: f64,
    noise_sigma: f64,
    seed: u64,
    grid: Grid,
) -> Result<Spectrum> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise sigma {noise_sigma} must be >= 0"
        )));
    }
    let grid = Grid::new(grid.lo, grid.hi, grid.n)?;
    let axis = grid.nodes();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let intensity = axis
        .iter()
        .map(|&x| {
            let clean = baseline
                + peaks
                    .iter()
                    .map(|p| lorentzian_eval(p, 0.0, x))
                    .sum::<f64>();
            if noise_sigma > 0.0 {
                clean + noise.sample(&mut rng)
            } else {
                clean
            }
        })
        .collect();
    let mut s = Spectrum::new(AxisUnit::Electronvolt, axis, intensity)?;
    s.set_meta("generator", "synth");
    s.set_meta("seed", seed.to_string());
    Ok(s)
}
