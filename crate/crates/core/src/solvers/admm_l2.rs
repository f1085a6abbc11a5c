use num_complex::Complex64;

use super::{check_positive, SolveReport, TikhonovConfig, DEFAULT_MU};
use crate::error::{Error, Result};
use crate::operators::{blur_apply_with, decimate, decimate_adjoint, DecimationSpec, SpectrumDiag};
use crate::volume::{Fft3, Volume3D};

/// Controls of the iterative Tikhonov solver.
#[derive(Clone, Debug)]
pub struct AdmmL2Options {
    /// Penalty on the split `v = Hx`.
    pub mu: f64,
    pub max_iters: usize,
    /// Stop once `‖x_{i+1} − x_i‖ / ‖x_{i+1}‖` falls below this.
    pub rel_tol: f64,
    /// Start from this `x`, with `v` and the dual set to the values that make
    /// a minimizer a fixed point. Cold start (`x = 0`, `v = 0`, dual `0`)
    /// otherwise.
    pub warm_start: Option<Volume3D>,
}

impl Default for AdmmL2Options {
    fn default() -> Self {
        AdmmL2Options {
            mu: DEFAULT_MU,
            max_iters: 20_000,
            rel_tol: 1e-10,
            warm_start: None,
        }
    }
}

/// Minimizes `½‖y − DHx‖² + λ‖x − x̄‖²` by ADMM on the split `v = Hx`:
///
/// ```text
/// x ← argmin λ‖x − x̄‖² + (μ/2)‖Hx − v + w‖²          (diagonal in Fourier)
/// v ← argmin ½‖y − Dv‖² + (μ/2)‖Hx − v + w‖²          (diagonal in space)
/// w ← w + Hx − v
/// ```
///
/// Converges to the [`super::tikhonov_fast`] minimizer; it exists as the
/// slow reference the closed form is timed against.
pub fn admm_l2l2(
    y: &Volume3D,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
    opts: &AdmmL2Options,
) -> Result<(Volume3D, SolveReport)> {
    y.ensure_dims(spec.lr_dims())?;
    lambda.values().ensure_dims(spec.hr_dims())?;
    cfg.validate(spec)?;
    check_positive("mu", opts.mu)?;
    if opts.max_iters == 0 {
        return Err(Error::param("max_iters must be at least 1"));
    }
    let hr = spec.hr_dims();
    let fft = Fft3::new(hr);
    let mu = opts.mu;
    let two_lambda = 2.0 * cfg.lambda;
    let lam = lambda.as_slice();

    let dty = decimate_adjoint(y, spec)?;
    let mask = decimate_adjoint(&Volume3D::filled(spec.lr_dims(), 1.0), spec)?;
    let xbar_term: Vec<Complex64> = fft
        .forward(&cfg.xbar)
        .as_slice()
        .iter()
        .map(|v| v * two_lambda)
        .collect();
    let denom: Vec<f64> = lam.iter().map(|l| two_lambda + mu * l.norm_sqr()).collect();

    let objective = |x: &Volume3D, hx: &Volume3D| -> Result<f64> {
        let r = decimate(hx, spec)?.axpy(-1.0, y);
        Ok(0.5 * r.norm_sq() + cfg.lambda * x.axpy(-1.0, &cfg.xbar).norm_sq())
    };

    let (mut x, mut v, mut w, init) = match &opts.warm_start {
        Some(x0) => {
            x0.ensure_dims(hr)?;
            let hx = blur_apply_with(&fft, x0, lambda, false)?;
            // Dual that balances the v-update at v = Hx.
            let masked = decimate_adjoint(&decimate(&hx, spec)?, spec)?;
            let w = masked.axpy(-1.0, &dty).scaled(1.0 / mu);
            (x0.clone(), hx, w, "warm")
        }
        None => (
            Volume3D::zeros(hr),
            Volume3D::zeros(hr),
            Volume3D::zeros(hr),
            "zero",
        ),
    };
    let hx0 = blur_apply_with(&fft, &x, lambda, false)?;
    let (mut report, started) = SolveReport::start(init, objective(&x, &hx0)?);

    for _ in 0..opts.max_iters {
        // x-update.
        let target = v.axpy(-1.0, &w);
        let t_hat = fft.forward(&target);
        let x_hat: Vec<Complex64> = t_hat
            .as_slice()
            .iter()
            .zip(lam)
            .zip(&xbar_term)
            .zip(&denom)
            .map(|(((t, l), xb), den)| (xb + mu * l.conj() * t) / den)
            .collect();
        let hx_hat: Vec<Complex64> = x_hat.iter().zip(lam).map(|(x, l)| x * l).collect();
        let (x_new, hx) = fft.inverse_real_pair(&x_hat, &hx_hat);

        // v-update: (D^H D + μI) v = D^H y + μ(Hx + w).
        let vs: Vec<f64> = hx
            .as_slice()
            .iter()
            .zip(w.as_slice())
            .zip(dty.as_slice())
            .zip(mask.as_slice())
            .map(|(((h, w), d), m)| (d + mu * (h + w)) / (m + mu))
            .collect();
        v = Volume3D::from_vec(hr, vs)?;

        let primal = hx.axpy(-1.0, &v);
        w = w.axpy(1.0, &primal);

        let change = x_new.rel_diff(&x);
        x = x_new;
        report.record(objective(&x, &hx)?, primal.norm(), change);
        if change < opts.rel_tol {
            report.converged = true;
            break;
        }
    }
    report.seconds = started.elapsed().as_secs_f64();
    Ok((x, report))
}
