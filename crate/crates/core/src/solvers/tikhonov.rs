use num_complex::Complex64;

use super::check_positive;
use crate::error::Result;
use crate::operators::{blur_apply_with, decimate, decimate_adjoint, DecimationSpec, SpectrumDiag};
use crate::spectral::{fold_lambda, FoldedSpectrum};
use crate::volume::{Fft3, Volume, Volume3D};

/// Weight and prior of `½‖y − DHx‖² + λ‖x − x̄‖²`.
#[derive(Clone, Debug)]
pub struct TikhonovConfig {
    pub lambda: f64,
    pub xbar: Volume3D,
}

impl TikhonovConfig {
    pub fn new(lambda: f64, xbar: Volume3D) -> Self {
        TikhonovConfig { lambda, xbar }
    }

    pub(crate) fn validate(&self, spec: &DecimationSpec) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        self.xbar.ensure_dims(spec.hr_dims())
    }
}

/// Precomputed state of the closed-form solver for one blur and decimation.
#[derive(Clone, Debug)]
pub struct TikhonovSolver {
    spec: DecimationSpec,
    fft: Fft3,
    lambda: SpectrumDiag,
    folded: FoldedSpectrum,
    gram: Volume3D,
}

impl TikhonovSolver {
    pub fn new(lambda: &SpectrumDiag, spec: &DecimationSpec) -> Result<Self> {
        let folded = fold_lambda(lambda, spec)?;
        Ok(Self::with_folded(lambda, folded))
    }

    /// Uses a caller-supplied folded spectrum. The solver trusts that it was
    /// computed from `lambda`.
    pub fn with_folded(lambda: &SpectrumDiag, folded: FoldedSpectrum) -> Self {
        let spec = *folded.spec();
        TikhonovSolver {
            spec,
            fft: Fft3::new(spec.hr_dims()),
            lambda: lambda.clone(),
            gram: folded.gram_diag(),
            folded,
        }
    }

    pub fn solve(&self, y: &Volume3D, cfg: &TikhonovConfig) -> Result<Volume3D> {
        y.ensure_dims(self.spec.lr_dims())?;
        cfg.validate(&self.spec)?;
        let two_lambda = 2.0 * cfg.lambda;
        let shift = two_lambda * self.spec.factor() as f64;

        // F k = Λ^H F D^H y + 2λ F x̄, both spectra from one transform of
        // D^H y + i x̄.
        let mut k: Vec<Complex64> = cfg
            .xbar
            .as_slice()
            .iter()
            .map(|&x| Complex64::new(0.0, x))
            .collect();
        let (hr, lr) = (self.spec.hr_dims(), self.spec.lr_dims());
        let [dr, dc, ds] = self.spec.rates();
        for gs in 0..lr.s {
            for gc in 0..lr.n {
                for gr in 0..lr.m {
                    k[hr.idx(gr * dr, gc * dc, gs * ds)].re = *y.get(gr, gc, gs);
                }
            }
        }
        let lam = self.lambda.as_slice();
        self.fft.forward_pair_combine(&mut k, |f, dty, xbar| {
            lam[f].conj() * dty + two_lambda * xbar
        });
        let k_hat = Volume::from_parts(hr, k);

        let mut w = self.folded.apply(&k_hat)?;
        for (w, g) in w.as_mut_slice().iter_mut().zip(self.gram.as_slice()) {
            *w /= shift + g;
        }
        let mut x_hat = k_hat.into_vec();
        self.folded.subtract_adjoint(w.as_slice(), &mut x_hat);
        let inv = 1.0 / two_lambda;
        x_hat.iter_mut().for_each(|v| *v *= inv);
        self.fft.inverse_real(x_hat)
    }
}

/// Closed-form minimizer of `½‖y − DHx‖² + λ‖x − x̄‖²`.
pub fn tikhonov_fast(
    y: &Volume3D,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
) -> Result<Volume3D> {
    TikhonovSolver::new(lambda, spec)?.solve(y, cfg)
}

/// `½‖y − DHx‖² + λ‖x − x̄‖²`.
pub fn objective_tikhonov(
    x: &Volume3D,
    y: &Volume3D,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
) -> Result<f64> {
    let fft = Fft3::new(spec.hr_dims());
    let hx = blur_apply_with(&fft, x, lambda, false)?;
    let residual = decimate(&hx, spec)?.axpy(-1.0, y);
    Ok(0.5 * residual.norm_sq() + cfg.lambda * x.axpy(-1.0, &cfg.xbar).norm_sq())
}

/// Residual of the normal equations, `‖(H^H D^H D H + 2λI)x − rhs‖ / ‖rhs‖`.
pub fn normal_equation_residual(
    x: &Volume3D,
    y: &Volume3D,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
) -> Result<f64> {
    let fft = Fft3::new(spec.hr_dims());
    let hx = blur_apply_with(&fft, x, lambda, false)?;
    let masked = decimate_adjoint(&decimate(&hx, spec)?, spec)?;
    let lhs = blur_apply_with(&fft, &masked, lambda, true)?.axpy(2.0 * cfg.lambda, x);
    let rhs = blur_apply_with(&fft, &decimate_adjoint(y, spec)?, lambda, true)?
        .axpy(2.0 * cfg.lambda, &cfg.xbar);
    Ok(lhs.rel_diff(&rhs))
}
