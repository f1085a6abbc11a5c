use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpectrumDiag;
use crate::volume::{ComplexVolume3D, Dims, Volume, Volume3D};

/// Axis of a first-order difference: `H` along the first lexicographic axis,
/// `V` along the second and `S` along the third (slice) axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    H,
    V,
    S,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::H, Axis::V, Axis::S];

    pub fn index(self) -> usize {
        match self {
            Axis::H => 0,
            Axis::V => 1,
            Axis::S => 2,
        }
    }
}

/// Spectra `(Σ_h, Σ_v, Σ_s)` of the periodic forward differences
/// `x[p + 1] - x[p]` along each axis: `exp(2πi f / len) - 1`.
pub fn finite_diff_spectra(dims: Dims) -> [SpectrumDiag; 3] {
    let lens = dims.as_array();
    Axis::ALL.map(|axis| {
        let a = axis.index();
        let len = lens[a];
        let per_freq: Vec<Complex64> = (0..len)
            .map(|f| Complex64::from_polar(1.0, 2.0 * PI * f as f64 / len as f64) - 1.0)
            .collect();
        SpectrumDiag::new(ComplexVolume3D::from_fn(dims, |i, j, k| {
            per_freq[[i, j, k][a]]
        }))
    })
}

/// Periodic forward differences along the three axes.
pub fn gradient(x: &Volume3D) -> [Volume3D; 3] {
    let d = x.dims();
    let data = x.as_slice();
    let Dims { m, n, s } = d;
    let dh = Volume::from_fn(d, |i, j, k| {
        data[d.idx((i + 1) % m, j, k)] - data[d.idx(i, j, k)]
    });
    let dv = Volume::from_fn(d, |i, j, k| {
        data[d.idx(i, (j + 1) % n, k)] - data[d.idx(i, j, k)]
    });
    let ds = Volume::from_fn(d, |i, j, k| {
        data[d.idx(i, j, (k + 1) % s)] - data[d.idx(i, j, k)]
    });
    [dh, dv, ds]
}

/// `D_h^T g_h + D_v^T g_v + D_s^T g_s`.
pub fn gradient_adjoint(g: &[Volume3D; 3]) -> Volume3D {
    let d = g[0].dims();
    let Dims { m, n, s } = d;
    let (gh, gv, gs) = (g[0].as_slice(), g[1].as_slice(), g[2].as_slice());
    Volume::from_fn(d, |i, j, k| {
        let p = d.idx(i, j, k);
        (gh[d.idx((i + m - 1) % m, j, k)] - gh[p])
            + (gv[d.idx(i, (j + n - 1) % n, k)] - gv[p])
            + (gs[d.idx(i, j, (k + s - 1) % s)] - gs[p])
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::operators::{blur_apply, dense};

    fn random_volume(dims: Dims, seed: u64) -> Volume3D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Volume::from_fn(dims, |_, _, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn constant_has_zero_gradient() {
        let v = Volume3D::filled(Dims::new(4, 5, 3), 2.5);
        for g in gradient(&v) {
            assert!(g.as_slice().iter().all(|x| *x == 0.0));
        }
        for (axis, sigma) in finite_diff_spectra(Dims::new(4, 5, 3)).iter().enumerate() {
            let out = blur_apply(&v, sigma, false).unwrap();
            assert!(out.norm() < 1e-12, "axis {axis}");
        }
    }

    #[test]
    fn one_dimensional_magnitudes() {
        let [sh, _, _] = finite_diff_spectra(Dims::new(4, 1, 1));
        for f in 0..4 {
            let expected = 2.0 * (PI * f as f64 / 4.0).sin().abs();
            assert!((sh.as_slice()[f].norm() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn spectra_vanish_at_dc() {
        for sigma in finite_diff_spectra(Dims::new(6, 5, 4)) {
            assert_eq!(sigma.as_slice()[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn spectral_application_matches_stencil() {
        for dims in [Dims::cube(8), Dims::new(5, 6, 7)] {
            let x = random_volume(dims, 11);
            let direct = gradient(&x);
            let spectra = finite_diff_spectra(dims);
            for axis in 0..3 {
                let fast = blur_apply(&x, &spectra[axis], false).unwrap();
                assert!(fast.rel_diff(&direct[axis]) < 1e-10);
            }
            let g = [
                random_volume(dims, 1),
                random_volume(dims, 2),
                random_volume(dims, 3),
            ];
            let adj = gradient_adjoint(&g);
            let mut fast_adj = Volume3D::zeros(dims);
            for axis in 0..3 {
                fast_adj = fast_adj.axpy(1.0, &blur_apply(&g[axis], &spectra[axis], true).unwrap());
            }
            assert!(fast_adj.rel_diff(&adj) < 1e-10);
        }
    }

    #[test]
    fn stencils_are_adjoint() {
        let dims = Dims::new(7, 4, 5);
        let x = random_volume(dims, 20);
        let g = [
            random_volume(dims, 21),
            random_volume(dims, 22),
            random_volume(dims, 23),
        ];
        let gx = gradient(&x);
        let lhs: f64 = (0..3).map(|a| gx[a].dot(&g[a])).sum();
        let rhs = x.dot(&gradient_adjoint(&g));
        assert!((lhs - rhs).abs() / lhs.abs() < 1e-10);
    }

    #[test]
    fn stencils_match_dense_difference_matrices() {
        let dims = Dims::new(4, 3, 5);
        let x = random_volume(dims, 30);
        let gx = gradient(&x);
        for axis in Axis::ALL {
            let m = dense::build_dense_difference(dims, axis).unwrap();
            let expected = dense::mat_vec(&m, &x, dims);
            assert!(gx[axis.index()].rel_diff(&expected) < 1e-14);
        }
    }
}
