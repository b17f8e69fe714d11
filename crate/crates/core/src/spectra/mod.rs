//! Spectral data types, energy units, repeated-measurement statistics and
//! the synthetic spectrum generator used as a fitting oracle.

mod spectrum;
mod stats;
mod synth;
mod units;

pub use spectrum::{resample_to_energy, AxisUnit, Spectrum, MIN_POINTS};
pub use stats::{mean_with_ci, student_t_quantile, MeasurementStat};
pub use synth::{synth_spectrum, Grid};
pub use units::{convert_energy, EnergyQuantity, EnergyUnit, HC_EV_NM, H_MEV_PER_THZ};
