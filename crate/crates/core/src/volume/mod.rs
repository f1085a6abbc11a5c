//! Voxel grids in lexicographic order.
//!
//! A volume of dims `(m, n, s)` stores voxel `(i, j, k)` at flat index
//! `i + m*j + m*n*k`: the first axis varies fastest and the third axis is the
//! slowest. The frequency-domain block structure used by the solvers relies on
//! this ordering, so every flat index in the crate goes through [`Dims`].

mod fft;
mod io;
mod metrics;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use fft::{fft3, fft3_complex, fft3_real_pair, ifft3, ifft3_real, Fft3};
pub use io::{read_volume, write_volume, DType};
pub use metrics::{psnr, Peak};

/// Voxels per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub s: usize,
}

impl Dims {
    pub const fn new(m: usize, n: usize, s: usize) -> Self {
        Dims { m, n, s }
    }

    pub const fn cube(len: usize) -> Self {
        Dims::new(len, len, len)
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.m, self.n, self.s]
    }

    pub fn from_array(a: [usize; 3]) -> Self {
        Dims::new(a[0], a[1], a[2])
    }

    pub fn len(&self) -> usize {
        self.m * self.n * self.s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::param(format!("dims {self} must be positive")));
        }
        Ok(())
    }

    /// Checked flat index of voxel `(i, j, k)`.
    pub fn lex_index(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        if i >= self.m || j >= self.n || k >= self.s {
            return Err(Error::Bounds {
                i,
                j,
                k,
                dims: *self,
            });
        }
        Ok(self.idx(i, j, k))
    }

    /// Flat index without the bounds check.
    #[inline(always)]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.m && j < self.n && k < self.s);
        i + self.m * (j + self.n * k)
    }

    /// Inverse of [`Dims::idx`].
    #[inline]
    pub fn coords(&self, flat: usize) -> (usize, usize, usize) {
        let i = flat % self.m;
        let rest = flat / self.m;
        (i, rest % self.n, rest / self.n)
    }

    /// Flat index of the voxel at `(-i, -j, -k)` modulo the grid.
    #[inline]
    pub fn negated(&self, flat: usize) -> usize {
        let (i, j, k) = self.coords(flat);
        self.idx(
            (self.m - i) % self.m,
            (self.n - j) % self.n,
            (self.s - k) % self.s,
        )
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.s)
    }
}

/// Dense 3D grid of scalars in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume<T> {
    dims: Dims,
    data: Vec<T>,
}

pub type Volume3D = Volume<f64>;
pub type ComplexVolume3D = Volume<Complex64>;

impl<T: Copy + Default> Volume<T> {
    pub fn zeros(dims: Dims) -> Self {
        Volume {
            dims,
            data: vec![T::default(); dims.len()],
        }
    }

    pub fn filled(dims: Dims, value: T) -> Self {
        Volume {
            dims,
            data: vec![value; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for k in 0..dims.s {
            for j in 0..dims.n {
                for i in 0..dims.m {
                    data.push(f(i, j, k));
                }
            }
        }
        Volume { dims, data }
    }
}

impl<T> Volume<T> {
    /// Wraps `data` without the finiteness scan; used internally where the
    /// values come from arithmetic on already-validated volumes.
    pub(crate) fn from_parts(dims: Dims, data: Vec<T>) -> Self {
        debug_assert_eq!(dims.len(), data.len());
        Volume { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[self.dims.idx(i, j, k)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut T {
        let idx = self.dims.idx(i, j, k);
        &mut self.data[idx]
    }

    pub fn ensure_dims(&self, expected: Dims) -> Result<()> {
        if self.dims != expected {
            return Err(Error::Shape {
                expected,
                actual: self.dims,
            });
        }
        Ok(())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Volume<U> {
        Volume {
            dims: self.dims,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl Volume3D {
    /// Builds a real volume, rejecting wrong lengths and non-finite values.
    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::Length {
                dims,
                len: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Volume { dims, data })
    }

    pub fn to_complex(&self) -> ComplexVolume3D {
        self.map(|&v| Complex64::new(v, 0.0))
    }

    pub fn dot(&self, other: &Volume3D) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population variance of the voxel values.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `self + alpha * other`, voxelwise.
    pub fn axpy(&self, alpha: f64, other: &Volume3D) -> Volume3D {
        debug_assert_eq!(self.dims, other.dims);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Volume::from_parts(self.dims, data)
    }

    pub fn scaled(&self, alpha: f64) -> Volume3D {
        self.map(|v| alpha * v)
    }

    /// ‖self − other‖ / ‖other‖, or the absolute difference norm when
    /// `other` is zero.
    pub fn rel_diff(&self, other: &Volume3D) -> f64 {
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = other.norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// Extracts the axis-aligned plane `index` normal to `axis` (1, 2 or 3)
    /// as a volume with a singleton third dimension.
    pub fn slice(&self, axis: usize, index: usize) -> Result<Volume3D> {
        let d = self.dims;
        let (rows, cols) = match axis {
            1 => (d.n, d.s),
            2 => (d.m, d.s),
            3 => (d.m, d.n),
            _ => {
                return Err(Error::param(format!(
                    "slice axis must be 1, 2 or 3, got {axis}"
                )))
            }
        };
        let axis_len = d.as_array()[axis - 1];
        if index >= axis_len {
            return Err(Error::param(format!(
                "slice index {index} out of range for axis {axis} of length {axis_len}"
            )));
        }
        let out = Volume::from_fn(Dims::new(rows, cols, 1), |a, b, _| match axis {
            1 => *self.get(index, a, b),
            2 => *self.get(a, index, b),
            _ => *self.get(a, b, index),
        });
        Ok(out)
    }
}

impl ComplexVolume3D {
    pub fn dot(&self, other: &ComplexVolume3D) -> Complex64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn real_part(&self) -> Volume3D {
        self.map(|v| v.re)
    }
}
