//! Unitary 3D discrete Fourier transform.
//!
//! Both directions are scaled by `1/sqrt(N)`, so the forward transform is the
//! unitary matrix `F` with `F^H = F^-1` and Parseval holds exactly. Lines along
//! each axis are transformed in parallel; every line is independent so the
//! result does not depend on the thread count.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{ComplexVolume3D, Dims, Volume, Volume3D};
use crate::error::{Error, Result};

/// Relative imaginary residue tolerated when a spectrum is expected to
/// transform back to a real volume.
pub const REAL_RESIDUE_TOL: f64 = 1e-8;

/// Adjacent lines gathered per transform call on the strided axes.
const LINE_GROUP: usize = 16;
/// Adjacent lines per group on the slice axis, where runs between lines are
/// a whole slab apart and longer runs pay off.
const DEEP_GROUP: usize = 64;

/// Forward and inverse plans for one grid size.
#[derive(Clone)]
pub struct Fft3 {
    dims: Dims,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
    scale: f64,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("dims", &self.dims).finish()
    }
}

impl Fft3 {
    pub fn new(dims: Dims) -> Self {
        let mut planner = FftPlanner::new();
        let lens = dims.as_array();
        let forward = lens.map(|l| planner.plan_fft_forward(l));
        let inverse = lens.map(|l| planner.plan_fft_inverse(l));
        Fft3 {
            dims,
            forward,
            inverse,
            scale: 1.0 / (dims.len() as f64).sqrt(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    pub fn forward(&self, v: &Volume3D) -> ComplexVolume3D {
        let mut out = v.to_complex();
        self.forward_in_place(out.as_mut_slice());
        out
    }

    pub fn forward_complex(&self, v: &ComplexVolume3D) -> ComplexVolume3D {
        let mut out = v.clone();
        self.forward_in_place(out.as_mut_slice());
        out
    }

    pub fn inverse(&self, v: &ComplexVolume3D) -> ComplexVolume3D {
        let mut out = v.clone();
        self.inverse_in_place(out.as_mut_slice());
        out
    }

    /// Inverse transform of a spectrum that must be Hermitian-symmetric.
    /// Fails if the imaginary residue exceeds [`REAL_RESIDUE_TOL`] relative
    /// to the output norm.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Result<Volume3D> {
        assert_eq!(spectrum.len(), self.dims.len());
        self.inverse_in_place(&mut spectrum);
        into_real(self.dims, spectrum)
    }

    /// Spectra of two real volumes from a single complex transform of
    /// `a + i*b`, separated through conjugate symmetry.
    pub fn forward_real_pair(
        &self,
        a: &Volume3D,
        b: &Volume3D,
    ) -> (ComplexVolume3D, ComplexVolume3D) {
        assert_eq!(a.dims(), self.dims);
        assert_eq!(b.dims(), self.dims);
        let mut z: Vec<Complex64> = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        self.forward_in_place(&mut z);
        let dims = self.dims;
        let Dims { m, n, s } = dims;
        let mut sa = Vec::with_capacity(z.len());
        let mut sb = Vec::with_capacity(z.len());
        for k in 0..s {
            let nk = (s - k) % s;
            for j in 0..n {
                let nj = (n - j) % n;
                let row = m * (j + n * k);
                let neg_row = m * (nj + n * nk);
                for i in 0..m {
                    let zf = z[row + i];
                    let zn = z[neg_row + (m - i) % m].conj();
                    sa.push((zf + zn) * 0.5);
                    // (zf - zn) / (2i)
                    let d = (zf - zn) * 0.5;
                    sb.push(Complex64::new(d.im, -d.re));
                }
            }
        }
        (Volume::from_parts(dims, sa), Volume::from_parts(dims, sb))
    }

    /// Transforms `a + i*b` in place and replaces every entry by
    /// `combine(f, A[f], B[f])`, where `A` and `B` are the spectra of the
    /// real volumes `a` and `b`. Saves the two extra spectrum buffers of
    /// [`Fft3::forward_real_pair`].
    pub fn forward_pair_combine(
        &self,
        z: &mut [Complex64],
        mut combine: impl FnMut(usize, Complex64, Complex64) -> Complex64,
    ) {
        assert_eq!(z.len(), self.dims.len());
        self.forward_in_place(z);
        let Dims { m, n, s } = self.dims;
        let split = |zf: Complex64, zn: Complex64| {
            let zn = zn.conj();
            let d = (zf - zn) * 0.5;
            ((zf + zn) * 0.5, Complex64::new(d.im, -d.re))
        };
        for k in 0..s {
            let nk = (s - k) % s;
            for j in 0..n {
                let nj = (n - j) % n;
                let row = m * (j + n * k);
                let neg_row = m * (nj + n * nk);
                for i in 0..m {
                    let f = row + i;
                    let nf = neg_row + if i == 0 { 0 } else { m - i };
                    if nf < f {
                        continue;
                    }
                    let (zf, zn) = (z[f], z[nf]);
                    let (af, bf) = split(zf, zn);
                    z[f] = combine(f, af, bf);
                    if nf != f {
                        let (an, bn) = split(zn, zf);
                        z[nf] = combine(nf, an, bn);
                    }
                }
            }
        }
    }

    /// Inverse transforms of two Hermitian-symmetric spectra from a single
    /// complex transform of `a + i*b`. No residue check is possible here, so
    /// callers must only pass spectra of real volumes.
    pub fn inverse_real_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Volume3D, Volume3D) {
        assert_eq!(a.len(), self.dims.len());
        assert_eq!(b.len(), self.dims.len());
        let mut z: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(x, y)| x + Complex64::new(-y.im, y.re))
            .collect();
        self.inverse_in_place(&mut z);
        let re = z.iter().map(|v| v.re).collect();
        let im = z.iter().map(|v| v.im).collect();
        (
            Volume::from_parts(self.dims, re),
            Volume::from_parts(self.dims, im),
        )
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let Dims { m, n, s } = self.dims;
        assert_eq!(data.len(), m * n * s, "buffer does not match plan dims");
        let slab = m * n;

        // Axis 1: contiguous lines, one slab of n lines per task.
        if m > 1 {
            let plan = &plans[0];
            data.par_chunks_mut(slab).for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(chunk, &mut scratch);
            });
        }

        // Axis 2: within each slab, gather groups of adjacent columns so the
        // lines become contiguous.
        if n > 1 {
            let plan = &plans[1];
            data.par_chunks_mut(slab).for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                let mut buf = vec![Complex64::default(); LINE_GROUP * n];
                for i0 in (0..m).step_by(LINE_GROUP) {
                    let width = LINE_GROUP.min(m - i0);
                    let buf = &mut buf[..width * n];
                    for j in 0..n {
                        let row = &chunk[i0 + m * j..i0 + m * j + width];
                        for (b, v) in row.iter().enumerate() {
                            buf[b * n + j] = *v;
                        }
                    }
                    plan.process_with_scratch(buf, &mut scratch);
                    for j in 0..n {
                        let row = &mut chunk[i0 + m * j..i0 + m * j + width];
                        for (b, v) in row.iter_mut().enumerate() {
                            *v = buf[b * n + j];
                        }
                    }
                }
            });
        }

        // Axis 3: lines are a whole slab apart. Each worker gathers a group of
        // adjacent lines into its own buffer and transforms it; the batch is
        // then written back in place.
        if s > 1 {
            let plan = &plans[2];
            let groups = slab.div_ceil(DEEP_GROUP);
            let workers = rayon::current_num_threads().clamp(1, groups);
            let mut bufs = vec![vec![Complex64::default(); DEEP_GROUP * s]; workers];
            for first in (0..groups).step_by(workers) {
                let src = &*data;
                bufs.par_iter_mut().enumerate().for_each(|(w, buf)| {
                    let p0 = (first + w) * DEEP_GROUP;
                    if p0 >= slab {
                        return;
                    }
                    let width = DEEP_GROUP.min(slab - p0);
                    let buf = &mut buf[..width * s];
                    for k in 0..s {
                        let run = &src[p0 + slab * k..p0 + slab * k + width];
                        for (b, v) in run.iter().enumerate() {
                            buf[b * s + k] = *v;
                        }
                    }
                    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                    plan.process_with_scratch(buf, &mut scratch);
                });
                for (w, buf) in bufs.iter().enumerate() {
                    let p0 = (first + w) * DEEP_GROUP;
                    if p0 >= slab {
                        break;
                    }
                    let width = DEEP_GROUP.min(slab - p0);
                    for k in 0..s {
                        let run = &mut data[p0 + slab * k..p0 + slab * k + width];
                        for (b, v) in run.iter_mut().enumerate() {
                            *v = buf[b * s + k];
                        }
                    }
                }
            }
        }

        let scale = self.scale;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }
}

fn into_real(dims: Dims, data: Vec<Complex64>) -> Result<Volume3D> {
    let (mut re_sq, mut im_sq) = (0.0, 0.0);
    for v in &data {
        re_sq += v.re * v.re;
        im_sq += v.im * v.im;
    }
    let total = re_sq + im_sq;
    if total > 0.0 && (im_sq / total).sqrt() > REAL_RESIDUE_TOL {
        return Err(Error::Numeric(format!(
            "inverse transform left a relative imaginary residue of {:.3e}",
            (im_sq / total).sqrt()
        )));
    }
    let real: Vec<f64> = data.into_iter().map(|v| v.re).collect();
    Volume3D::from_vec(dims, real)
}

/// Unitary forward transform of a real volume.
pub fn fft3(v: &Volume3D) -> ComplexVolume3D {
    Fft3::new(v.dims()).forward(v)
}

pub fn fft3_complex(v: &ComplexVolume3D) -> ComplexVolume3D {
    Fft3::new(v.dims()).forward_complex(v)
}

/// Unitary inverse transform.
pub fn ifft3(v: &ComplexVolume3D) -> ComplexVolume3D {
    Fft3::new(v.dims()).inverse(v)
}

/// Unitary inverse transform with the imaginary residue checked and dropped.
pub fn ifft3_real(v: &ComplexVolume3D) -> Result<Volume3D> {
    Fft3::new(v.dims()).inverse_real(v.as_slice().to_vec())
}

pub fn fft3_real_pair(a: &Volume3D, b: &Volume3D) -> (ComplexVolume3D, ComplexVolume3D) {
    Fft3::new(a.dims()).forward_real_pair(a, b)
}
