//! Forward-model operators: cyclic blur `H`, decimation `D`, periodic
//! first differences, and their adjoints.
//!
//! Every circulant operator is represented by its [`SpectrumDiag`]: the
//! unnormalized DFT of its generating kernel. Combined with the unitary
//! transform of [`crate::volume::Fft3`], applying an operator is
//! `F^H diag(spectrum) F`.

mod decimation;
pub mod dense;
mod diff;
mod psf;

use num_complex::Complex64;

use crate::error::Result;
use crate::volume::{ComplexVolume3D, Dims, Fft3, Volume3D};

pub use decimation::{
    decimate, decimate_adjoint, upsample_nearest, upsample_zero_fill, DecimationSpec,
};
pub use diff::{finite_diff_spectra, gradient, gradient_adjoint, Axis};
pub use psf::{make_gaussian_psf, make_psf, PsfSpec};

/// Per-frequency eigenvalues of a circulant operator on an HR grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumDiag(ComplexVolume3D);

impl SpectrumDiag {
    pub fn new(values: ComplexVolume3D) -> Self {
        SpectrumDiag(values)
    }

    /// The identity operator.
    pub fn ones(dims: Dims) -> Self {
        SpectrumDiag(ComplexVolume3D::filled(dims, Complex64::new(1.0, 0.0)))
    }

    pub fn dims(&self) -> Dims {
        self.0.dims()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn values(&self) -> &ComplexVolume3D {
        &self.0
    }

    pub fn conj(&self) -> SpectrumDiag {
        SpectrumDiag(self.0.map(|v| v.conj()))
    }
}

/// Eigenvalues of the cyclic convolution with `psf`, whose origin sits at
/// voxel `(0, 0, 0)`. This is the plain (unnormalized) DFT of the kernel, so
/// the zero-frequency entry equals the kernel sum.
pub fn psf_to_spectrum(psf: &Volume3D) -> SpectrumDiag {
    let fft = Fft3::new(psf.dims());
    let mut spec = fft.forward(psf);
    let scale = (psf.dims().len() as f64).sqrt();
    spec.as_mut_slice().iter_mut().for_each(|v| *v *= scale);
    SpectrumDiag(spec)
}

/// `H x` (or `H^H x` when `conjugate` is set) as `F^H Λ F x`.
pub fn blur_apply(x: &Volume3D, lambda: &SpectrumDiag, conjugate: bool) -> Result<Volume3D> {
    x.ensure_dims(lambda.dims())?;
    blur_apply_with(&Fft3::new(x.dims()), x, lambda, conjugate)
}

/// [`blur_apply`] with a caller-owned transform plan.
pub fn blur_apply_with(
    fft: &Fft3,
    x: &Volume3D,
    lambda: &SpectrumDiag,
    conjugate: bool,
) -> Result<Volume3D> {
    x.ensure_dims(lambda.dims())?;
    let mut spec = fft.forward(x);
    multiply_spectrum(&mut spec, lambda, conjugate);
    fft.inverse_real(spec.into_vec())
}

pub(crate) fn multiply_spectrum(
    spec: &mut ComplexVolume3D,
    lambda: &SpectrumDiag,
    conjugate: bool,
) {
    let values = lambda.as_slice();
    if conjugate {
        for (v, l) in spec.as_mut_slice().iter_mut().zip(values) {
            *v *= l.conj();
        }
    } else {
        for (v, l) in spec.as_mut_slice().iter_mut().zip(values) {
            *v *= l;
        }
    }
}
