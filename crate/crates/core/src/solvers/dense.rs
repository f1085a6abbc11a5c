//! Normal-equation solves with explicit matrices, for grids of at most
//! [`DENSE_LIMIT`](crate::operators::dense::DENSE_LIMIT) voxels.

use nalgebra::{DMatrix, DVector};

use super::TikhonovConfig;
use crate::error::{Error, Result};
use crate::operators::dense::{build_dense_blur, build_dense_decimation, build_dense_gradient};
use crate::operators::DecimationSpec;
use crate::volume::Volume3D;

/// `D H` as an `N_l x N_h` matrix.
fn dense_forward(psf: &Volume3D, spec: &DecimationSpec) -> Result<DMatrix<f64>> {
    psf.ensure_dims(spec.hr_dims())?;
    let h = build_dense_blur(psf)?;
    let d = build_dense_decimation(spec)?;
    Ok(d * h)
}

fn assert_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Numeric(format!(
            "system matrix is not symmetric (deviation {asym:.3e})"
        )));
    }
    Ok(())
}

/// Solves a symmetric positive definite system by Cholesky, failing if the
/// factorization does not exist.
pub fn solve_spd(m: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    assert_symmetric(&m)?;
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Singular("system matrix is not positive definite".into()))?;
    Ok(chol.solve(rhs))
}

fn to_volume(v: DVector<f64>, like: &Volume3D) -> Result<Volume3D> {
    Volume3D::from_vec(like.dims(), v.as_slice().to_vec())
}

/// The Tikhonov system `(H^H D^H D H + 2λI) x = H^H D^H y + 2λ x̄` and its
/// right-hand side.
pub fn dense_tikhonov_system(
    y: &Volume3D,
    psf: &Volume3D,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    y.ensure_dims(spec.lr_dims())?;
    cfg.validate(spec)?;
    let a = dense_forward(psf, spec)?;
    let n = spec.hr_dims().len();
    let two_lambda = 2.0 * cfg.lambda;
    let m = a.tr_mul(&a) + DMatrix::identity(n, n) * two_lambda;
    let rhs = a.tr_mul(&DVector::from_column_slice(y.as_slice()))
        + DVector::from_column_slice(cfg.xbar.as_slice()) * two_lambda;
    Ok((m, rhs))
}

pub fn dense_tikhonov(
    y: &Volume3D,
    psf: &Volume3D,
    spec: &DecimationSpec,
    cfg: &TikhonovConfig,
) -> Result<Volume3D> {
    let (m, rhs) = dense_tikhonov_system(y, psf, spec, cfg)?;
    to_volume(solve_spd(m, &rhs)?, &cfg.xbar)
}

/// The TV x-subproblem with the zero-frequency floor:
/// `(H^H D^H D H + μ L^H L + μτ I) x = H^H D^H y + μ Θ`.
pub fn dense_tv_x_update(
    y: &Volume3D,
    psf: &Volume3D,
    spec: &DecimationSpec,
    mu: f64,
    tau: f64,
    theta: &Volume3D,
) -> Result<Volume3D> {
    y.ensure_dims(spec.lr_dims())?;
    theta.ensure_dims(spec.hr_dims())?;
    let a = dense_forward(psf, spec)?;
    let l = build_dense_gradient(spec.hr_dims())?;
    let n = spec.hr_dims().len();
    let m = a.tr_mul(&a) + l.tr_mul(&l) * mu + DMatrix::identity(n, n) * (mu * tau);
    let rhs = a.tr_mul(&DVector::from_column_slice(y.as_slice()))
        + DVector::from_column_slice(theta.as_slice()) * mu;
    to_volume(solve_spd(m, &rhs)?, theta)
}

/// `½‖y − DHx‖² + λ Σ_j ‖(Lx)[j]‖₂` from dense matrices.
pub fn dense_objective_tv(
    x: &Volume3D,
    y: &Volume3D,
    psf: &Volume3D,
    spec: &DecimationSpec,
    lambda: f64,
) -> Result<f64> {
    let a = dense_forward(psf, spec)?;
    let l = build_dense_gradient(spec.hr_dims())?;
    let xv = DVector::from_column_slice(x.as_slice());
    let r = &a * &xv - DVector::from_column_slice(y.as_slice());
    let g = &l * &xv;
    let n = x.len();
    let tv: f64 = (0..n)
        .map(|j| (g[j].powi(2) + g[n + j].powi(2) + g[2 * n + j].powi(2)).sqrt())
        .sum();
    Ok(0.5 * r.norm_squared() + lambda * tv)
}
