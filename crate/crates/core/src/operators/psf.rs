use crate::error::{Error, Result};
use crate::volume::{Dims, Volume, Volume3D};

/// Generating kernel of the blur operator.
#[derive(Clone, Debug, PartialEq)]
pub enum PsfSpec {
    /// Separable Gaussian sampled at integer offsets from the kernel centre.
    /// A zero standard deviation degenerates to a delta along that axis.
    Gaussian { size: [usize; 3], sigma: [f64; 3] },
    /// Explicit nonnegative weights over a `size` grid in lexicographic
    /// order, centre at `size / 2`. Normalized to unit sum on use.
    Kernel { size: [usize; 3], weights: Vec<f64> },
}

impl PsfSpec {
    pub fn gaussian(size: [usize; 3], sigma: [f64; 3]) -> Self {
        PsfSpec::Gaussian { size, sigma }
    }

    /// Kernel of size one: the identity blur.
    pub fn delta() -> Self {
        PsfSpec::Gaussian {
            size: [1, 1, 1],
            sigma: [0.0; 3],
        }
    }

    pub fn size(&self) -> [usize; 3] {
        match self {
            PsfSpec::Gaussian { size, .. } | PsfSpec::Kernel { size, .. } => *size,
        }
    }

    /// Normalized kernel weights on the `size` grid.
    pub fn kernel(&self) -> Result<Volume3D> {
        let size = self.size();
        for (axis, &len) in size.iter().enumerate() {
            if len == 0 || len % 2 == 0 {
                return Err(Error::param(format!(
                    "axis {}: kernel size must be odd and positive, got {len}",
                    axis + 1
                )));
            }
        }
        let kdims = Dims::from_array(size);
        let raw = match self {
            PsfSpec::Gaussian { sigma, .. } => {
                if let Some(s) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                    return Err(Error::param(format!(
                        "Gaussian standard deviation must be nonnegative, got {s}"
                    )));
                }
                let profiles: Vec<Vec<f64>> = (0..3)
                    .map(|a| gaussian_profile(size[a], sigma[a]))
                    .collect();
                Volume::from_fn(kdims, |i, j, k| {
                    profiles[0][i] * profiles[1][j] * profiles[2][k]
                })
            }
            PsfSpec::Kernel { weights, .. } => {
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(Error::param(
                        "kernel weights must be finite and nonnegative",
                    ));
                }
                Volume3D::from_vec(kdims, weights.clone())?
            }
        };
        let total: f64 = raw.as_slice().iter().sum();
        if total <= 0.0 {
            return Err(Error::param("kernel weights sum to zero"));
        }
        Ok(raw.scaled(1.0 / total))
    }
}

fn gaussian_profile(len: usize, sigma: f64) -> Vec<f64> {
    let half = (len / 2) as isize;
    (0..len as isize)
        .map(|p| {
            let offset = (p - half) as f64;
            if sigma == 0.0 {
                if offset == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-offset * offset / (2.0 * sigma * sigma)).exp()
            }
        })
        .collect()
}

/// Zero-padded PSF on the HR grid with the kernel centre circularly shifted
/// to voxel `(0, 0, 0)`, i.e. the first column of the circulant `H`.
pub fn make_psf(spec: &PsfSpec, hr_dims: Dims) -> Result<Volume3D> {
    let kernel = spec.kernel()?;
    let size = spec.size();
    let hr = hr_dims.as_array();
    for axis in 0..3 {
        if size[axis] > hr[axis] {
            return Err(Error::param(format!(
                "axis {}: kernel size {} exceeds volume length {}",
                axis + 1,
                size[axis],
                hr[axis]
            )));
        }
    }
    let mut out = Volume3D::zeros(hr_dims);
    let wrap = |p: usize, axis: usize| -> usize {
        let offset = p as isize - (size[axis] / 2) as isize;
        offset.rem_euclid(hr[axis] as isize) as usize
    };
    let kd = kernel.dims();
    for k in 0..kd.s {
        for j in 0..kd.n {
            for i in 0..kd.m {
                *out.get_mut(wrap(i, 0), wrap(j, 1), wrap(k, 2)) += *kernel.get(i, j, k);
            }
        }
    }
    Ok(out)
}

/// Gaussian PSF of the given kernel size and per-axis standard deviations.
pub fn make_gaussian_psf(size: [usize; 3], sigma: [f64; 3], hr_dims: Dims) -> Result<Volume3D> {
    make_psf(&PsfSpec::gaussian(size, sigma), hr_dims)
}
