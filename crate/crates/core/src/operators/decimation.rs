use crate::error::{Error, Result};
use crate::volume::{Dims, Volume, Volume3D};

/// Integer decimation rates binding an HR grid to an LR grid.
///
/// Decimation keeps voxel `(0, 0, 0)` and every `rate`-th voxel after it
/// along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecimationSpec {
    rates: [usize; 3],
    hr: Dims,
    lr: Dims,
}

impl DecimationSpec {
    pub fn new(rates: [usize; 3], hr: Dims) -> Result<Self> {
        hr.validate()?;
        let hr_lens = hr.as_array();
        let mut lr = [0; 3];
        for axis in 0..3 {
            let (len, rate) = (hr_lens[axis], rates[axis]);
            if rate == 0 {
                return Err(Error::param(format!(
                    "axis {}: decimation rate must be positive",
                    axis + 1
                )));
            }
            if len % rate != 0 {
                return Err(Error::Divisibility {
                    axis: axis + 1,
                    len,
                    rate,
                });
            }
            lr[axis] = len / rate;
        }
        Ok(DecimationSpec {
            rates,
            hr,
            lr: Dims::from_array(lr),
        })
    }

    pub fn from_lr(rates: [usize; 3], lr: Dims) -> Result<Self> {
        lr.validate()?;
        if rates.contains(&0) {
            return Err(Error::param("decimation rates must be positive"));
        }
        let hr = Dims::new(lr.m * rates[0], lr.n * rates[1], lr.s * rates[2]);
        Self::new(rates, hr)
    }

    pub fn identity(dims: Dims) -> Result<Self> {
        Self::new([1, 1, 1], dims)
    }

    pub fn rates(&self) -> [usize; 3] {
        self.rates
    }

    pub fn hr_dims(&self) -> Dims {
        self.hr
    }

    pub fn lr_dims(&self) -> Dims {
        self.lr
    }

    /// Total rate `d = d_r * d_c * d_s`, so that `N_h = d * N_l`.
    pub fn factor(&self) -> usize {
        self.rates.iter().product()
    }

    /// HR flat index of the voxel retained for LR voxel `(i, j, k)`.
    #[inline]
    pub fn retained_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [dr, dc, ds] = self.rates;
        self.hr.idx(i * dr, j * dc, k * ds)
    }
}

/// `D x`: strided selection of the retained voxels.
pub fn decimate(x: &Volume3D, spec: &DecimationSpec) -> Result<Volume3D> {
    x.ensure_dims(spec.hr_dims())?;
    let data = x.as_slice();
    Ok(Volume::from_fn(spec.lr_dims(), |i, j, k| {
        data[spec.retained_index(i, j, k)]
    }))
}

/// `D^H y`: places the LR samples at the retained positions, zeros elsewhere.
pub fn decimate_adjoint(y: &Volume3D, spec: &DecimationSpec) -> Result<Volume3D> {
    y.ensure_dims(spec.lr_dims())?;
    let lr = spec.lr_dims();
    let mut out = Volume3D::zeros(spec.hr_dims());
    let dst = out.as_mut_slice();
    for k in 0..lr.s {
        for j in 0..lr.n {
            for i in 0..lr.m {
                dst[spec.retained_index(i, j, k)] = *y.get(i, j, k);
            }
        }
    }
    Ok(out)
}

/// `d * D^H y`: zero-fill upsampling rescaled to preserve the mean.
pub fn upsample_zero_fill(y: &Volume3D, spec: &DecimationSpec) -> Result<Volume3D> {
    Ok(decimate_adjoint(y, spec)?.scaled(spec.factor() as f64))
}

/// Nearest-neighbour (sample-and-hold) upsampling.
pub fn upsample_nearest(y: &Volume3D, spec: &DecimationSpec) -> Result<Volume3D> {
    y.ensure_dims(spec.lr_dims())?;
    let [dr, dc, ds] = spec.rates();
    Ok(Volume::from_fn(spec.hr_dims(), |i, j, k| {
        *y.get(i / dr, j / dc, k / ds)
    }))
}
