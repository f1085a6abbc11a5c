//! Frequency-domain structure of decimation.
//!
//! With the unitary transform `F` and lexicographic ordering, the mask
//! `D^H D` that keeps the retained voxels satisfies
//!
//! ```text
//! F D^H D F^H = (1/d_s)(J_ds ⊗ I_sl) ⊗ (1/d_c)(J_dc ⊗ I_nl) ⊗ (1/d_r)(J_dr ⊗ I_ml)
//! ```
//!
//! where `J_u` is the `u x u` matrix of ones. Each HR frequency axis of
//! length `l * d` therefore splits into `d` contiguous blocks of length `l`,
//! and the HR frequencies that alias onto the same LR frequency are exactly
//! one entry from every block. [`alias_fold`] sums over those entries
//! (the structural matrix `S = (1^T ⊗ I) ⊗ (1^T ⊗ I) ⊗ (1^T ⊗ I)`) and
//! [`alias_expand`] is its adjoint, so `F D^H D F^H = S^H S / d`.
//!
//! [`FoldedSpectrum`] is `S Λ` for a blur spectrum `Λ`, kept as `d` blocks
//! of length `N_l` rather than as an `N_l x N_h` matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::dense::{build_dense_decimation, build_dense_fourier, check_dense_size};
use crate::operators::{DecimationSpec, SpectrumDiag};
use crate::volume::{ComplexVolume3D, Dims, Volume, Volume3D};

/// HR flat index of every (block, LR frequency) pair, block-major.
fn block_indices(spec: &DecimationSpec) -> Vec<usize> {
    let [dr, dc, ds] = spec.rates();
    let (hr, lr) = (spec.hr_dims(), spec.lr_dims());
    let mut out = Vec::with_capacity(hr.len());
    for bs in 0..ds {
        for bc in 0..dc {
            for br in 0..dr {
                for gs in 0..lr.s {
                    for gc in 0..lr.n {
                        for gr in 0..lr.m {
                            out.push(hr.idx(gr + br * lr.m, gc + bc * lr.n, gs + bs * lr.s));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Sums each HR spectrum entry into the LR frequency it aliases onto.
pub fn alias_fold(hr_spectrum: &ComplexVolume3D, spec: &DecimationSpec) -> Result<ComplexVolume3D> {
    hr_spectrum.ensure_dims(spec.hr_dims())?;
    let nl = spec.lr_dims().len();
    let src = hr_spectrum.as_slice();
    let mut out = vec![Complex64::default(); nl];
    for (pos, &hr_idx) in block_indices(spec).iter().enumerate() {
        out[pos % nl] += src[hr_idx];
    }
    Ok(Volume::from_parts(spec.lr_dims(), out))
}

/// Replicates an LR spectrum into every aliasing block; adjoint of
/// [`alias_fold`].
pub fn alias_expand(
    lr_spectrum: &ComplexVolume3D,
    spec: &DecimationSpec,
) -> Result<ComplexVolume3D> {
    lr_spectrum.ensure_dims(spec.lr_dims())?;
    let nl = spec.lr_dims().len();
    let src = lr_spectrum.as_slice();
    let mut out = vec![Complex64::default(); spec.hr_dims().len()];
    for (pos, &hr_idx) in block_indices(spec).iter().enumerate() {
        out[hr_idx] = src[pos % nl];
    }
    Ok(Volume::from_parts(spec.hr_dims(), out))
}

/// The folded blur spectrum `S Λ`.
///
/// The HR index of block `b`, LR frequency `g` is `bases[b] + offsets[g]`:
/// HR coordinates are LR coordinates shifted by whole blocks, and the
/// lexicographic index is linear in the coordinates.
#[derive(Clone, Debug)]
pub struct FoldedSpectrum {
    spec: DecimationSpec,
    /// Block-major: entry `b * N_l + g` is Λ at HR index `bases[b] + offsets[g]`.
    blocks: Vec<Complex64>,
    bases: Vec<usize>,
    offsets: Vec<usize>,
}

/// Computes the folded spectrum for `lambda`.
pub fn fold_lambda(lambda: &SpectrumDiag, spec: &DecimationSpec) -> Result<FoldedSpectrum> {
    lambda.values().ensure_dims(spec.hr_dims())?;
    let [dr, dc, ds] = spec.rates();
    let (hr, lr) = (spec.hr_dims(), spec.lr_dims());
    let mut bases = Vec::with_capacity(spec.factor());
    for bs in 0..ds {
        for bc in 0..dc {
            for br in 0..dr {
                bases.push(hr.idx(br * lr.m, bc * lr.n, bs * lr.s));
            }
        }
    }
    let mut offsets = Vec::with_capacity(lr.len());
    for gs in 0..lr.s {
        for gc in 0..lr.n {
            for gr in 0..lr.m {
                offsets.push(hr.idx(gr, gc, gs));
            }
        }
    }
    let values = lambda.as_slice();
    let blocks = bases
        .iter()
        .flat_map(|&base| offsets.iter().map(move |&o| values[base + o]))
        .collect();
    Ok(FoldedSpectrum {
        spec: *spec,
        blocks,
        bases,
        offsets,
    })
}

impl FoldedSpectrum {
    pub fn spec(&self) -> &DecimationSpec {
        &self.spec
    }

    pub fn block_count(&self) -> usize {
        self.spec.factor()
    }

    /// Block with offsets `(b_r, b_c, b_s)`, indexed by LR frequency.
    pub fn block(&self, br: usize, bc: usize, bs: usize) -> &[Complex64] {
        let [dr, dc, _] = self.spec.rates();
        let b = br + dr * (bc + dc * bs);
        let nl = self.spec.lr_dims().len();
        &self.blocks[b * nl..(b + 1) * nl]
    }

    /// The same spectrum with its blocks in reverse order. Only useful to
    /// confirm that the consistency checks detect a block-order error.
    pub fn with_reversed_blocks(&self) -> FoldedSpectrum {
        let nl = self.spec.lr_dims().len();
        let blocks = self
            .blocks
            .chunks(nl)
            .rev()
            .flat_map(|c| c.iter().copied())
            .collect();
        FoldedSpectrum {
            spec: self.spec,
            blocks,
            bases: self.bases.clone(),
            offsets: self.offsets.clone(),
        }
    }

    fn nl(&self) -> usize {
        self.spec.lr_dims().len()
    }

    /// Block `b` of the spectrum paired with the HR index of each entry.
    fn block_entries(&self, b: usize) -> impl Iterator<Item = (usize, &Complex64)> + '_ {
        let nl = self.nl();
        let base = self.bases[b];
        self.offsets
            .iter()
            .map(move |o| base + o)
            .zip(&self.blocks[b * nl..(b + 1) * nl])
    }

    /// `S Λ v`: blur then fold an HR spectrum.
    pub fn apply(&self, v: &ComplexVolume3D) -> Result<ComplexVolume3D> {
        v.ensure_dims(self.spec.hr_dims())?;
        let src = v.as_slice();
        let mut out = vec![Complex64::default(); self.nl()];
        for b in 0..self.block_count() {
            for (o, (hr_idx, lam)) in out.iter_mut().zip(self.block_entries(b)) {
                *o += lam * src[hr_idx];
            }
        }
        Ok(Volume::from_parts(self.spec.lr_dims(), out))
    }

    /// `Λ^H S^H w`: expand an LR spectrum and apply the conjugate blur.
    pub fn apply_adjoint(&self, w: &ComplexVolume3D) -> Result<ComplexVolume3D> {
        w.ensure_dims(self.spec.lr_dims())?;
        let mut out = vec![Complex64::default(); self.spec.hr_dims().len()];
        self.subtract_adjoint(w.as_slice(), &mut out);
        for v in &mut out {
            *v = -*v;
        }
        Ok(Volume::from_parts(self.spec.hr_dims(), out))
    }

    /// `target -= Λ^H S^H w` without allocating an HR buffer.
    pub(crate) fn subtract_adjoint(&self, w: &[Complex64], target: &mut [Complex64]) {
        for b in 0..self.block_count() {
            for (wg, (hr_idx, lam)) in w.iter().zip(self.block_entries(b)) {
                target[hr_idx] -= lam.conj() * wg;
            }
        }
    }

    /// Diagonal of `S Λ Λ^H S^H`: the sum of `|Λ|^2` over each aliasing set.
    pub fn gram_diag(&self) -> Volume3D {
        let nl = self.nl();
        let mut out = vec![0.0; nl];
        for block in self.blocks.chunks(nl) {
            for (o, lam) in out.iter_mut().zip(block) {
                *o += lam.norm_sqr();
            }
        }
        Volume::from_parts(self.spec.lr_dims(), out)
    }

    /// Applies `Γ - Γ Λ̲^H (shift I + Λ̲ Γ Λ̲^H)^{-1} Λ̲ Γ` to an HR spectrum,
    /// with `Λ̲ = S Λ` and `Γ` a positive diagonal (`None` for the identity).
    ///
    /// The LR system is diagonal, so each LR frequency couples only the `d`
    /// entries of its aliasing set. Per set, with `a = Γ`, `c = Λ`, the
    /// output is `a_b (k_b Δ_b - conj(c_b) σ_b) / (shift + Σ a|c|^2)` where
    /// `Δ_b` and `σ_b` are `shift + Σ a|c|^2` and `Σ c a k` with entry `b` left
    /// out. This is algebraically identical to the direct form but never
    /// subtracts two terms of size `Γ`, which matters when `Γ` is huge at a
    /// nearly singular frequency.
    pub fn inverse_lemma_apply(
        &self,
        weights: Option<&[f64]>,
        shift: f64,
        rhs: &ComplexVolume3D,
    ) -> Result<ComplexVolume3D> {
        rhs.ensure_dims(self.spec.hr_dims())?;
        if shift.is_nan() || shift <= 0.0 {
            return Err(Error::param(format!(
                "inverse-lemma shift must be positive, got {shift}"
            )));
        }
        if let Some(w) = weights {
            if w.len() != rhs.len() {
                return Err(Error::param("weight length does not match the HR grid"));
            }
        }
        let nl = self.nl();
        let d = self.block_count();
        let k = rhs.as_slice();
        let mut out = vec![Complex64::default(); k.len()];

        let mut a = vec![0.0; d];
        let mut e = vec![0.0; d];
        let mut t = vec![Complex64::default(); d];
        // Exclusive prefix/suffix sums of e and t.
        let mut pe = vec![0.0; d + 1];
        let mut se = vec![0.0; d + 1];
        let mut pt = vec![Complex64::default(); d + 1];
        let mut st = vec![Complex64::default(); d + 1];

        for g in 0..nl {
            for b in 0..d {
                let pos = b * nl + g;
                let hr = self.bases[b] + self.offsets[g];
                let c = self.blocks[pos];
                a[b] = weights.map_or(1.0, |w| w[hr]);
                e[b] = a[b] * c.norm_sqr();
                t[b] = c * a[b] * k[hr];
            }
            for b in 0..d {
                pe[b + 1] = pe[b] + e[b];
                pt[b + 1] = pt[b] + t[b];
            }
            for b in (0..d).rev() {
                se[b] = se[b + 1] + e[b];
                st[b] = st[b + 1] + t[b];
            }
            let den = shift + pe[d];
            for b in 0..d {
                let pos = b * nl + g;
                let hr = self.bases[b] + self.offsets[g];
                let c = self.blocks[pos];
                let den_ex = shift + (pe[b] + se[b + 1]);
                let sum_ex = pt[b] + st[b + 1];
                out[hr] = (k[hr] * den_ex - c.conj() * sum_ex) * (a[b] / den);
            }
        }
        Ok(Volume::from_parts(self.spec.hr_dims(), out))
    }
}

/// Dense structural matrix `S = (1^T ⊗ I_sl) ⊗ (1^T ⊗ I_nl) ⊗ (1^T ⊗ I_ml)`.
pub fn dense_structural_matrix(spec: &DecimationSpec) -> Result<DMatrix<f64>> {
    check_dense_size(spec.hr_dims().len())?;
    let lr = spec.lr_dims().as_array();
    let rates = spec.rates();
    let axis = |a: usize| {
        DMatrix::from_element(1, rates[a], 1.0).kronecker(&DMatrix::identity(lr[a], lr[a]))
    };
    Ok(axis(2).kronecker(&axis(1)).kronecker(&axis(0)))
}

/// Right-hand side of the decimation identity with per-axis `1/d_a`
/// factors, slice axis outermost.
pub fn dense_decimation_kronecker(spec: &DecimationSpec) -> Result<DMatrix<f64>> {
    check_dense_size(spec.hr_dims().len())?;
    let lr = spec.lr_dims().as_array();
    let rates = spec.rates();
    let axis = |a: usize| {
        DMatrix::from_element(rates[a], rates[a], 1.0 / rates[a] as f64)
            .kronecker(&DMatrix::identity(lr[a], lr[a]))
    };
    Ok(axis(2).kronecker(&axis(1)).kronecker(&axis(0)))
}

/// `F D^H D F^H` from dense matrices.
pub fn dense_masked_fourier_gram(spec: &DecimationSpec) -> Result<DMatrix<Complex64>> {
    let hr = spec.hr_dims();
    let f = build_dense_fourier(hr)?;
    let d = build_dense_decimation(spec)?;
    // D^H D is a 0/1 diagonal, so F D^H D F^H = G G^H with G the retained
    // columns of F.
    let retained: Vec<usize> = (0..hr.len())
        .filter(|&q| d.column(q).iter().any(|v| *v != 0.0))
        .collect();
    let g = f.select_columns(retained.iter());
    Ok(&g * g.adjoint())
}

/// Largest entrywise deviation between `F D^H D F^H` and its Kronecker form,
/// both built densely.
pub fn verify_eq8(spec: &DecimationSpec) -> Result<f64> {
    let lhs = dense_masked_fourier_gram(spec)?;
    let rhs = dense_decimation_kronecker(spec)?;
    Ok(lhs
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| (a - Complex64::new(*b, 0.0)).norm())
        .fold(0.0, f64::max))
}

/// Enumerates every decimation of grids with axis lengths from `lens` and
/// rates from `rates` that divide them.
pub fn small_spec_sweep(lens: &[usize], rates: &[usize]) -> Vec<DecimationSpec> {
    let mut out = Vec::new();
    for &m in lens {
        for &n in lens {
            for &s in lens {
                for &dr in rates {
                    for &dc in rates {
                        for &ds in rates {
                            if let Ok(spec) = DecimationSpec::new([dr, dc, ds], Dims::new(m, n, s))
                            {
                                out.push(spec);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_complex(dims: Dims, rng: &mut ChaCha8Rng) -> ComplexVolume3D {
        Volume::from_fn(dims, |_, _, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn to_dvec(v: &ComplexVolume3D) -> DVector<Complex64> {
        DVector::from_column_slice(v.as_slice())
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn fold_one_axis_example() {
        let spec = DecimationSpec::new([2, 1, 1], Dims::new(4, 1, 1)).unwrap();
        let c = |v: f64| Complex64::new(v, 0.0);
        let x = Volume::from_parts(Dims::new(4, 1, 1), vec![c(1.0), c(2.0), c(3.0), c(5.0)]);
        let y = alias_fold(&x, &spec).unwrap();
        assert_eq!(y.as_slice(), &[c(4.0), c(7.0)]);
    }

    #[test]
    fn fold_identity_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dims = Dims::new(3, 4, 2);
        let spec = DecimationSpec::identity(dims).unwrap();
        let x = random_complex(dims, &mut rng);
        assert_eq!(alias_fold(&x, &spec).unwrap(), x);
        assert_eq!(alias_expand(&x, &spec).unwrap(), x);
    }

    #[test]
    fn fold_matches_dense_structural_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = DecimationSpec::new([2, 2, 1], Dims::new(4, 4, 2)).unwrap();
        let s = dense_structural_matrix(&spec)
            .unwrap()
            .map(|v| Complex64::new(v, 0.0));
        let x = random_complex(spec.hr_dims(), &mut rng);
        let expected = &s * to_dvec(&x);
        let got = alias_fold(&x, &spec).unwrap();
        assert!(max_abs_diff(got.as_slice(), expected.as_slice()) < 1e-14);
    }

    #[test]
    fn expand_is_adjoint_of_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in small_spec_sweep(&[2, 4, 6], &[1, 2, 3])
            .into_iter()
            .step_by(7)
        {
            let x = random_complex(spec.hr_dims(), &mut rng);
            let y = random_complex(spec.lr_dims(), &mut rng);
            let lhs = alias_fold(&x, &spec).unwrap().dot(&y);
            let rhs = x.dot(&alias_expand(&y, &spec).unwrap());
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));

            let folded = alias_fold(&alias_expand(&y, &spec).unwrap(), &spec).unwrap();
            let d = spec.factor() as f64;
            for (a, b) in folded.as_slice().iter().zip(y.as_slice()) {
                assert!((a - b * d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expand_of_dc_delta_hits_block_origins() {
        let spec = DecimationSpec::new([2, 3, 1], Dims::new(4, 6, 2)).unwrap();
        let mut y = ComplexVolume3D::zeros(spec.lr_dims());
        y.as_mut_slice()[0] = Complex64::new(1.0, 0.0);
        let x = alias_expand(&y, &spec).unwrap();
        let hr = spec.hr_dims();
        for p in 0..hr.len() {
            let (i, j, k) = hr.coords(p);
            let at_origin = i % 2 == 0 && j % 2 == 0 && k == 0;
            let expected = if at_origin { 1.0 } else { 0.0 };
            assert_eq!(x.as_slice()[p], Complex64::new(expected, 0.0));
        }
        assert_eq!(x.as_slice().iter().filter(|v| v.re != 0.0).count(), 6);
    }

    #[test]
    fn block_layout_follows_contiguous_frequency_chunks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = DecimationSpec::new([2, 3, 2], Dims::new(4, 6, 4)).unwrap();
        let lambda = SpectrumDiag::new(random_complex(spec.hr_dims(), &mut rng));
        let folded = fold_lambda(&lambda, &spec).unwrap();
        let lr = spec.lr_dims();
        for bs in 0..2 {
            for bc in 0..3 {
                for br in 0..2 {
                    let block = folded.block(br, bc, bs);
                    for g in 0..lr.len() {
                        let (gr, gc, gs) = lr.coords(g);
                        let expected =
                            *lambda
                                .values()
                                .get(gr + br * lr.m, gc + bc * lr.n, gs + bs * lr.s);
                        assert_eq!(block[g], expected);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_lambda_gram_is_d() {
        let spec = DecimationSpec::new([2, 1, 3], Dims::new(4, 2, 6)).unwrap();
        let folded = fold_lambda(&SpectrumDiag::ones(spec.hr_dims()), &spec).unwrap();
        assert!(folded.gram_diag().as_slice().iter().all(|v| *v == 6.0));
    }

    #[test]
    fn single_entry_gram() {
        let spec = DecimationSpec::new([2, 2, 1], Dims::new(4, 4, 1)).unwrap();
        let mut lam = ComplexVolume3D::zeros(spec.hr_dims());
        *lam.get_mut(3, 1, 0) = Complex64::new(0.0, 3.0);
        let gram = fold_lambda(&SpectrumDiag::new(lam), &spec)
            .unwrap()
            .gram_diag();
        let lr = spec.lr_dims();
        for g in 0..lr.len() {
            let expected = if lr.coords(g) == (1, 1, 0) { 9.0 } else { 0.0 };
            assert_eq!(gram.as_slice()[g], expected);
        }
    }

    #[test]
    fn folded_operator_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in small_spec_sweep(&[2, 4], &[1, 2]) {
            if spec.hr_dims().len() > 256 {
                continue;
            }
            let lam = SpectrumDiag::new(random_complex(spec.hr_dims(), &mut rng));
            let folded = fold_lambda(&lam, &spec).unwrap();
            let s = dense_structural_matrix(&spec)
                .unwrap()
                .map(|v| Complex64::new(v, 0.0));
            let dense = &s * DMatrix::from_diagonal(&to_dvec(lam.values()));

            let v = random_complex(spec.hr_dims(), &mut rng);
            let expected = &dense * to_dvec(&v);
            let got = folded.apply(&v).unwrap();
            let scale = expected.norm();
            assert!(max_abs_diff(got.as_slice(), expected.as_slice()) / scale < 1e-12);

            let w = random_complex(spec.lr_dims(), &mut rng);
            let expected = dense.adjoint() * to_dvec(&w);
            let got = folded.apply_adjoint(&w).unwrap();
            assert!(max_abs_diff(got.as_slice(), expected.as_slice()) / expected.norm() < 1e-12);

            let gram = &dense * dense.adjoint();
            for (g, v) in folded.gram_diag().as_slice().iter().enumerate() {
                assert!((gram[(g, g)].re - v).abs() < 1e-12 * v.max(1.0));
                assert!(gram[(g, g)].im.abs() < 1e-12);
            }
            // The gram is diagonal: distinct LR frequencies never mix.
            for r in 0..gram.nrows() {
                for c in 0..gram.ncols() {
                    if r != c {
                        assert!(gram[(r, c)].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn per_axis_and_single_factor_forms_agree() {
        for spec in small_spec_sweep(&[2, 4, 6], &[1, 2, 3])
            .into_iter()
            .step_by(5)
        {
            if spec.hr_dims().len() > 512 {
                continue;
            }
            let kron = dense_decimation_kronecker(&spec).unwrap();
            let s = dense_structural_matrix(&spec).unwrap();
            let single = s.transpose() * &s / spec.factor() as f64;
            assert!((kron - single).amax() < 1e-15);
        }
    }

    #[test]
    fn eq8_examples() {
        let spec = DecimationSpec::new([2, 1, 2], Dims::new(4, 2, 2)).unwrap();
        assert!(verify_eq8(&spec).unwrap() < 1e-10);
        let spec = DecimationSpec::identity(Dims::new(2, 4, 2)).unwrap();
        assert!(verify_eq8(&spec).unwrap() < 1e-12);
        let spec = DecimationSpec::new([3, 2, 1], Dims::new(6, 4, 2)).unwrap();
        assert!(verify_eq8(&spec).unwrap() < 1e-10);
    }

    #[test]
    fn eq8_detects_wrong_factor_order() {
        // Swapping the row and slice factors must break the identity on an
        // anisotropic spec.
        let spec = DecimationSpec::new([2, 1, 1], Dims::new(4, 2, 2)).unwrap();
        let lhs = dense_masked_fourier_gram(&spec).unwrap();
        let lr = spec.lr_dims().as_array();
        let rates = spec.rates();
        let axis = |a: usize| {
            DMatrix::from_element(rates[a], rates[a], 1.0 / rates[a] as f64)
                .kronecker(&DMatrix::identity(lr[a], lr[a]))
        };
        let wrong = axis(0).kronecker(&axis(1)).kronecker(&axis(2));
        let dev = lhs
            .iter()
            .zip(wrong.iter())
            .map(|(a, b)| (a - Complex64::new(*b, 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(dev > 0.1);
    }

    #[test]
    fn blurred_mask_substitution() {
        // (1/d) Λ̲^H Λ̲ = Λ^H F D^H D F^H Λ.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for spec in small_spec_sweep(&[2, 4], &[1, 2]).into_iter().step_by(3) {
            let lam = SpectrumDiag::new(random_complex(spec.hr_dims(), &mut rng));
            let lam_d = DMatrix::from_diagonal(&to_dvec(lam.values()));
            let gram = dense_masked_fourier_gram(&spec).unwrap();
            let lhs = lam_d.adjoint() * gram * &lam_d;
            let s = dense_structural_matrix(&spec)
                .unwrap()
                .map(|v| Complex64::new(v, 0.0));
            let folded = &s * &lam_d;
            let rhs = folded.adjoint() * folded / Complex64::new(spec.factor() as f64, 0.0);
            let dev = lhs
                .iter()
                .zip(rhs.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "{spec:?}: {dev}");
        }
    }

    #[test]
    fn inverse_lemma_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in small_spec_sweep(&[2, 4], &[1, 2]).into_iter().step_by(4) {
            let n = spec.hr_dims().len();
            let lam = SpectrumDiag::new(random_complex(spec.hr_dims(), &mut rng));
            let gamma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
            let shift = rng.gen_range(0.05..2.0);
            let folded = fold_lambda(&lam, &spec).unwrap();
            let k = random_complex(spec.hr_dims(), &mut rng);
            let got = folded.inverse_lemma_apply(Some(&gamma), shift, &k).unwrap();

            // Dense: (Γ^{-1} + Λ̲^H Λ̲ / shift)^{-1} equals the lemma form.
            let s = dense_structural_matrix(&spec)
                .unwrap()
                .map(|v| Complex64::new(v, 0.0));
            let lb = &s * DMatrix::from_diagonal(&to_dvec(lam.values()));
            let ginv = DMatrix::from_fn(n, n, |r, c| {
                Complex64::new(if r == c { 1.0 / gamma[r] } else { 0.0 }, 0.0)
            });
            let m = ginv + lb.adjoint() * &lb / Complex64::new(shift, 0.0);
            let expected = m.lu().solve(&to_dvec(&k)).unwrap();
            let err = max_abs_diff(got.as_slice(), expected.as_slice()) / expected.norm();
            assert!(err < 1e-12, "{spec:?}: {err}");
        }
    }

    #[test]
    fn reversed_blocks_change_the_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = DecimationSpec::new([2, 2, 2], Dims::cube(4)).unwrap();
        let lam = SpectrumDiag::new(random_complex(spec.hr_dims(), &mut rng));
        let folded = fold_lambda(&lam, &spec).unwrap();
        let v = random_complex(spec.hr_dims(), &mut rng);
        let a = folded.apply(&v).unwrap();
        let b = folded.with_reversed_blocks().apply(&v).unwrap();
        assert!(max_abs_diff(a.as_slice(), b.as_slice()) > 1e-3);
    }

    #[test]
    fn dims_mismatch_errors() {
        let spec = DecimationSpec::new([2, 1, 1], Dims::new(4, 2, 2)).unwrap();
        let wrong = ComplexVolume3D::zeros(Dims::cube(3));
        assert!(alias_fold(&wrong, &spec).is_err());
        assert!(alias_expand(&wrong, &spec).is_err());
        assert!(fold_lambda(&SpectrumDiag::ones(Dims::cube(3)), &spec).is_err());
    }
}
