//! Spectral analysis and pressure metrology for diamond-anvil-cell experiments.
//!
//! The crate turns photoluminescence and Raman spectra into pressure
//! estimates and builds invertible zero-phonon-line calibration curves for
//! group-IV-vacancy colour centres (SiV, GeV, SnV):
//!
//! - [`spectra`]: spectrum container, energy units, confidence intervals and a
//!   seeded synthetic-spectrum generator.
//! - [`peakfit`]: Lorentzian models and a Levenberg-Marquardt fitter with
//!   one-vs-two-peak selection.
//! - [`eos`]: Vinet equation of state of diamond.
//! - [`gauges`]: ruby, Raman-edge and ZPL pressure gauges.
//! - [`calib`]: monotone ZPL(P) calibrations, slope windows, theory alignment
//!   and Kohn-Sham level transforms.
//! - [`io`], [`datasets`], [`export`], [`pipeline`]: file formats, bundled
//!   tables, plot-ready exports and batch processing.

pub mod calib;
pub mod datasets;
pub mod eos;
mod error;
pub mod export;
pub mod gauges;
pub mod interp;
pub mod io;
pub mod peakfit;
pub mod pipeline;
pub mod roots;
pub mod spectra;

pub use error::{Error, Result};
