//! Lorentzian line-shape fitting.
//!
//! [`fit_peaks`] runs a Levenberg-Marquardt minimisation of the unweighted
//! residual sum of squares for one or two Lorentzians on a constant
//! baseline. [`select_model`] decides between the two with a BIC margin and
//! [`center_energy`] reduces a fit to a single line position.

mod fit;
mod guess;
mod lm;
mod model;

pub use fit::{
    bic, center_energy, center_estimate, fit_peaks, select_model, FitResult, BIC_MARGIN,
};
pub use guess::{initial_guess, split_guess, InitialGuess};
pub use lm::{levenberg_marquardt, LeastSquaresProblem, LmOutcome, LmSettings};
pub use model::{lorentzian_eval, LorentzianModel, LorentzianParams};
