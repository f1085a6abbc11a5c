//! Reconstruction of an HR volume from `y = D H x + n`.
//!
//! * [`tikhonov_fast`]: closed-form minimizer of
//!   `½‖y − DHx‖² + λ‖x − x̄‖²` with one forward and one inverse FFT.
//! * [`admm_l2l2`]: the same objective minimized iteratively; a baseline for
//!   speed comparisons.
//! * [`admm_tv`]: isotropic total-variation regularization by ADMM, whose
//!   x-update reuses the closed-form machinery.
//! * [`dense`]: explicit normal-equation solves for small grids.

mod admm_l2;
pub mod dense;
mod tikhonov;
mod tv;

use std::time::Instant;

pub use admm_l2::{admm_l2l2, AdmmL2Options};
pub use tikhonov::{
    normal_equation_residual, objective_tikhonov, tikhonov_fast, TikhonovConfig, TikhonovSolver,
};
pub use tv::{
    admm_tv, admm_tv_with_spectrum, objective_tv, tv_gamma, tv_shrink, tv_x_update, TvAdmmConfig,
    TvInit, TvXSolver,
};

/// Default Tikhonov weight. There is no reference value for the synthetic
/// experiment; this one is a convenience.
pub const DEFAULT_TIKHONOV_LAMBDA: f64 = 0.01;
/// TV weight, ADMM penalty and iteration count used for the TV solver.
pub const DEFAULT_TV_LAMBDA: f64 = 0.06;
pub const DEFAULT_MU: f64 = 0.1;
pub const DEFAULT_TV_ITERS: usize = 30;
pub const DEFAULT_TV_REL_TOL: f64 = 1e-6;
/// Default zero-frequency floor, relative to μ.
pub const DEFAULT_TAU_OVER_MU: f64 = 1e-8;

/// Convergence record of an iterative solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `objective[0]` is the initializer's objective, `objective[i]` the
    /// value after iteration `i`.
    pub objective: Vec<f64>,
    /// Splitting residual after each iteration.
    pub primal_residual: Vec<f64>,
    /// Relative change of `x` in each iteration.
    pub rel_change: Vec<f64>,
    pub seconds: f64,
    pub init: String,
    pub converged: bool,
}

impl SolveReport {
    fn start(init: impl Into<String>, initial_objective: f64) -> (Self, Instant) {
        let report = SolveReport {
            objective: vec![initial_objective],
            init: init.into(),
            ..Default::default()
        };
        (report, Instant::now())
    }

    fn record(&mut self, objective: f64, residual: f64, rel_change: f64) {
        self.iterations += 1;
        self.objective.push(objective);
        self.primal_residual.push(residual);
        self.rel_change.push(rel_change);
    }

    pub fn final_objective(&self) -> f64 {
        *self
            .objective
            .last()
            .expect("objective always holds the initializer")
    }
}

fn check_positive(name: &str, value: f64) -> crate::Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(crate::Error::Parameter(format!(
            "{name} must be positive, got {value}"
        )));
    }
    Ok(())
}
