use nalgebra::{DMatrix, DVector};

/// A nonlinear least-squares problem `min ½‖r(p)‖²`.
pub trait LeastSquaresProblem {
    fn residuals(&self, params: &DVector<f64>) -> DVector<f64>;
    /// `∂r/∂p`, one row per residual.
    fn jacobian(&self, params: &DVector<f64>) -> DMatrix<f64>;
    /// Scale of the data, used to recognise residuals at rounding level.
    fn data_norm(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub max_iterations: usize,
    pub initial_lambda: f64,
    pub lambda_down: f64,
    pub lambda_up: f64,
    /// Relative cost decrease below which an accepted step counts as small.
    pub cost_tolerance: f64,
    /// Scaled gradient max-norm below which an accepted step counts as small.
    pub gradient_tolerance: f64,
    /// Number of consecutive small accepted steps that declare convergence.
    pub small_steps: usize,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            initial_lambda: 1e-3,
            lambda_down: 0.3,
            lambda_up: 2.0,
            cost_tolerance: 1e-10,
            gradient_tolerance: 1e-8,
            small_steps: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: DVector<f64>,
    pub residuals: DVector<f64>,
    /// `½‖r‖²`
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

const LAMBDA_MAX: f64 = 1e16;

/// Gradient `Jᵀr` with each component divided by `‖J_j‖·‖r‖`, i.e. the
/// cosine between the residual and each Jacobian column.
fn scaled_gradient_norm(jac: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    let g = jac.tr_mul(r);
    (0..jac.ncols())
        .map(|j| {
            let cn = jac.column(j).norm();
            if cn == 0.0 {
                0.0
            } else {
                (g[j] / (cn * rn)).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Damped Gauss-Newton iteration with Marquardt diagonal scaling.
///
/// The damping starts at `initial_lambda`, shrinks by `lambda_down` after an
/// accepted step and grows by `lambda_up` after a rejected one. The run is
/// converged after `small_steps` consecutive accepted steps whose relative
/// cost decrease or scaled gradient is below tolerance, or when the residual
/// is already at rounding level relative to the data.
pub fn levenberg_marquardt<P: LeastSquaresProblem>(
    problem: &P,
    start: DVector<f64>,
    settings: &LmSettings,
) -> LmOutcome {
    let mut params = start;
    let mut r = problem.residuals(&params);
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = settings.initial_lambda;
    let mut small = 0usize;
    let exact_floor = 1e-12 * problem.data_norm();

    let mut jac = problem.jacobian(&params);
    let mut gnorm = scaled_gradient_norm(&jac, &r);
    let mut iterations = 0;

    let finish = |params, residuals, cost, iterations, converged, gradient_norm| LmOutcome {
        params,
        residuals,
        cost,
        iterations,
        converged,
        gradient_norm,
    };

    if !cost.is_finite() {
        return finish(params, r, cost, 0, false, gnorm);
    }

    while iterations < settings.max_iterations {
        iterations += 1;
        if (2.0 * cost).sqrt() <= exact_floor {
            return finish(params, r, cost, iterations, true, gnorm);
        }
        let jtj = jac.tr_mul(&jac);
        let grad = jac.tr_mul(&r);
        let max_diag = jtj.diagonal().max();
        let mut accepted = false;

        while lambda <= LAMBDA_MAX {
            let mut damped = jtj.clone();
            for j in 0..damped.ncols() {
                let d = jtj[(j, j)].max(1e-12 * max_diag);
                damped[(j, j)] += lambda * d;
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= settings.lambda_up;
                    continue;
                }
            };
            let trial = &params + &step;
            let trial_r = problem.residuals(&trial);
            let trial_cost = 0.5 * trial_r.norm_squared();
            if trial_cost.is_finite() && trial_cost < cost {
                let rel = (cost - trial_cost) / cost;
                params = trial;
                r = trial_r;
                cost = trial_cost;
                jac = problem.jacobian(&params);
                gnorm = scaled_gradient_norm(&jac, &r);
                lambda *= settings.lambda_down;
                if rel < settings.cost_tolerance || gnorm < settings.gradient_tolerance {
                    small += 1;
                } else {
                    small = 0;
                }
                accepted = true;
                break;
            }
            lambda *= settings.lambda_up;
        }

        if !accepted {
            // No descent direction left: a minimum up to rounding.
            let converged = small > 0
                || gnorm < settings.gradient_tolerance
                || (2.0 * cost).sqrt() <= exact_floor;
            return finish(params, r, cost, iterations, converged, gnorm);
        }
        if small >= settings.small_steps {
            return finish(params, r, cost, iterations, true, gnorm);
        }
    }
    let converged = (2.0 * cost).sqrt() <= exact_floor;
    finish(params, r, cost, iterations, converged, gnorm)
}
