//! Explicit matrices for small grids. These back the brute-force checks of
//! the fast spectral operators and are never used by the solvers.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Axis, DecimationSpec};
use crate::error::{Error, Result};
use crate::volume::{Dims, Volume3D};

/// Largest HR voxel count accepted by the dense builders.
pub const DENSE_LIMIT: usize = 4096;

pub fn check_dense_size(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

/// `N_l x N_h` selection matrix of [`super::decimate`].
pub fn build_dense_decimation(spec: &DecimationSpec) -> Result<DMatrix<f64>> {
    let (hr, lr) = (spec.hr_dims(), spec.lr_dims());
    check_dense_size(hr.len())?;
    let mut d = DMatrix::zeros(lr.len(), hr.len());
    for k in 0..lr.s {
        for j in 0..lr.n {
            for i in 0..lr.m {
                d[(lr.idx(i, j, k), spec.retained_index(i, j, k))] = 1.0;
            }
        }
    }
    Ok(d)
}

/// Circulant blur matrix with `H[p, q] = psf[(p - q) mod dims]`; column `q`
/// is the PSF shifted to voxel `q`.
pub fn build_dense_blur(psf: &Volume3D) -> Result<DMatrix<f64>> {
    let d = psf.dims();
    check_dense_size(d.len())?;
    let n = d.len();
    let mut h = DMatrix::zeros(n, n);
    for q in 0..n {
        let (qi, qj, qk) = d.coords(q);
        for p in 0..n {
            let (pi, pj, pk) = d.coords(p);
            h[(p, q)] = *psf.get(
                (pi + d.m - qi) % d.m,
                (pj + d.n - qj) % d.n,
                (pk + d.s - qk) % d.s,
            );
        }
    }
    Ok(h)
}

/// Periodic forward-difference matrix along `axis`.
pub fn build_dense_difference(dims: Dims, axis: Axis) -> Result<DMatrix<f64>> {
    check_dense_size(dims.len())?;
    let n = dims.len();
    let mut m = DMatrix::zeros(n, n);
    for p in 0..n {
        let (i, j, k) = dims.coords(p);
        let next = match axis {
            Axis::H => dims.idx((i + 1) % dims.m, j, k),
            Axis::V => dims.idx(i, (j + 1) % dims.n, k),
            Axis::S => dims.idx(i, j, (k + 1) % dims.s),
        };
        m[(p, p)] -= 1.0;
        m[(p, next)] += 1.0;
    }
    Ok(m)
}

/// `L = [D_h; D_v; D_s]`, a `3N x N` matrix.
pub fn build_dense_gradient(dims: Dims) -> Result<DMatrix<f64>> {
    let n = dims.len();
    let mut l = DMatrix::zeros(3 * n, n);
    for axis in Axis::ALL {
        let block = build_dense_difference(dims, axis)?;
        l.view_mut((axis.index() * n, 0), (n, n)).copy_from(&block);
    }
    Ok(l)
}

/// Unitary 3D DFT matrix evaluated from its definition,
/// `F[f, x] = exp(-2πi <f, x / dims>) / sqrt(N)` with both indices
/// lexicographic.
pub fn build_dense_fourier(dims: Dims) -> Result<DMatrix<Complex64>> {
    check_dense_size(dims.len())?;
    let n = dims.len();
    let norm = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |f, x| {
        let (f1, f2, f3) = dims.coords(f);
        let (x1, x2, x3) = dims.coords(x);
        let turns = ((f1 * x1) % dims.m) as f64 / dims.m as f64
            + ((f2 * x2) % dims.n) as f64 / dims.n as f64
            + ((f3 * x3) % dims.s) as f64 / dims.s as f64;
        Complex64::from_polar(norm, -2.0 * PI * turns)
    }))
}

pub fn mat_vec(m: &DMatrix<f64>, x: &Volume3D, out_dims: Dims) -> Volume3D {
    let v = DVector::from_column_slice(x.as_slice());
    let out = m * v;
    Volume3D::from_vec(out_dims, out.as_slice().to_vec()).expect("dense product shape")
}

pub fn mat_t_vec(m: &DMatrix<f64>, x: &Volume3D, out_dims: Dims) -> Volume3D {
    let v = DVector::from_column_slice(x.as_slice());
    let out = m.tr_mul(&v);
    Volume3D::from_vec(out_dims, out.as_slice().to_vec()).expect("dense product shape")
}
