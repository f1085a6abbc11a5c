//! Dense-oracle consistency checks bundled for the `selftest` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operators::dense::{build_dense_blur, build_dense_decimation, build_dense_gradient};
use crate::operators::{
    blur_apply, decimate, decimate_adjoint, gradient, gradient_adjoint, psf_to_spectrum,
    DecimationSpec,
};
use crate::solvers::dense::{dense_tikhonov, dense_tv_x_update};
use crate::solvers::{tv_gamma, TikhonovConfig, TikhonovSolver, TvXSolver};
use crate::spectral::{fold_lambda, small_spec_sweep, verify_eq8};
use crate::volume::{fft3, ifft3_real, Dims, Volume, Volume3D};

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    /// Reverse the block order of every folded spectrum fed to the fast
    /// solvers. The solver checks must then fail.
    pub perturb_block_order: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// Number of instances the deviation is the maximum over.
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// Grids and rates for the solver comparisons, anisotropic ones included.
const SOLVER_CASES: [([usize; 3], [usize; 3]); 5] = [
    ([8, 8, 8], [2, 2, 2]),
    ([6, 4, 6], [3, 2, 1]),
    ([4, 6, 6], [1, 3, 2]),
    ([12, 8, 4], [2, 4, 2]),
    ([9, 6, 8], [3, 1, 4]),
];

fn random_volume(dims: Dims, rng: &mut ChaCha8Rng) -> Volume3D {
    Volume::from_fn(dims, |_, _, _| rng.gen_range(-1.0..1.0))
}

fn random_psf(dims: Dims, rng: &mut ChaCha8Rng) -> Volume3D {
    let v = Volume::from_fn(dims, |_, _, _| rng.gen_range(0.0..1.0));
    let total: f64 = v.as_slice().iter().sum();
    v.scaled(1.0 / total)
}

fn check(name: &'static str, tolerance: f64, deviations: &[f64]) -> CheckResult {
    CheckResult {
        name,
        instances: deviations.len(),
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        tolerance,
    }
}

/// Relative deviation from the oracle; a numeric failure of the fast path
/// (for instance a complex result where a real one is expected) counts as an
/// infinite deviation instead of aborting the run.
fn deviation(fast: Result<Volume3D>, oracle: &Volume3D) -> Result<f64> {
    match fast {
        Ok(v) => Ok(v.rel_diff(oracle)),
        Err(e) if e.is_numeric() => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn rel_inner_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn run_selftest(opts: &SelftestOptions) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();

    let sweep: Result<Vec<f64>> = small_spec_sweep(&[2, 4, 6], &[1, 2, 3])
        .iter()
        .map(verify_eq8)
        .collect();
    checks.push(check("eq8_kronecker", 1e-10, &sweep?));

    let mut tik = Vec::new();
    let mut tv = Vec::new();
    for (dims, rates) in SOLVER_CASES {
        let spec = DecimationSpec::new(rates, Dims::from_array(dims))?;
        let psf = random_psf(spec.hr_dims(), &mut rng);
        let lambda = psf_to_spectrum(&psf);
        let mut folded = fold_lambda(&lambda, &spec)?;
        if opts.perturb_block_order {
            folded = folded.with_reversed_blocks();
        }
        let y = random_volume(spec.lr_dims(), &mut rng);

        let cfg = TikhonovConfig::new(
            rng.gen_range(0.005..0.1),
            random_volume(spec.hr_dims(), &mut rng),
        );
        let dense = dense_tikhonov(&y, &psf, &spec, &cfg)?;
        tik.push(deviation(
            TikhonovSolver::with_folded(&lambda, folded.clone()).solve(&y, &cfg),
            &dense,
        )?);

        let (mu, tau) = (0.1, 1e-9);
        let theta = gradient_adjoint(&[0; 3].map(|_| random_volume(spec.hr_dims(), &mut rng)));
        let solver = TvXSolver::new(&y, &lambda, folded, mu, tv_gamma(spec.hr_dims(), tau)?)?;
        let dense = dense_tv_x_update(&y, &psf, &spec, mu, tau, &theta)?;
        tv.push(deviation(solver.solve(&fft3(&theta)), &dense)?);
    }
    checks.push(check("tikhonov_vs_dense", 1e-8, &tik));
    checks.push(check("tv_x_update_vs_dense", 1e-6, &tv));

    let mut adjoint = Vec::new();
    let mut dense_match = Vec::new();
    for (dims, rates) in SOLVER_CASES {
        let spec = DecimationSpec::new(rates, Dims::from_array(dims))?;
        let hr = spec.hr_dims();
        let (x, x2) = (random_volume(hr, &mut rng), random_volume(hr, &mut rng));
        let y = random_volume(spec.lr_dims(), &mut rng);
        let lambda = psf_to_spectrum(&random_psf(hr, &mut rng));

        adjoint.push(rel_inner_gap(
            blur_apply(&x, &lambda, false)?.dot(&x2),
            x.dot(&blur_apply(&x2, &lambda, true)?),
        ));
        adjoint.push(rel_inner_gap(
            decimate(&x, &spec)?.dot(&y),
            x.dot(&decimate_adjoint(&y, &spec)?),
        ));
        let g = [0; 3].map(|_| random_volume(hr, &mut rng));
        let lhs: f64 = gradient(&x).iter().zip(&g).map(|(a, b)| a.dot(b)).sum();
        adjoint.push(rel_inner_gap(lhs, x.dot(&gradient_adjoint(&g))));

        let psf = random_psf(hr, &mut rng);
        let dense_h = build_dense_blur(&psf)?;
        let hx = blur_apply(&x, &psf_to_spectrum(&psf), false)?;
        let dense_hx = &dense_h * nalgebra::DVector::from_column_slice(x.as_slice());
        dense_match.push(hx.rel_diff(&Volume3D::from_vec(hr, dense_hx.as_slice().to_vec())?));
        let dense_d = build_dense_decimation(&spec)?;
        let dx = &dense_d * nalgebra::DVector::from_column_slice(x.as_slice());
        dense_match.push(
            decimate(&x, &spec)?
                .rel_diff(&Volume3D::from_vec(spec.lr_dims(), dx.as_slice().to_vec())?),
        );
        let dense_l = build_dense_gradient(hr)?;
        let lx = &dense_l * nalgebra::DVector::from_column_slice(x.as_slice());
        let n = hr.len();
        let grad = gradient(&x);
        for (a, part) in grad.iter().enumerate() {
            let slice = lx.as_slice()[a * n..(a + 1) * n].to_vec();
            dense_match.push(part.rel_diff(&Volume3D::from_vec(hr, slice)?));
        }
    }
    checks.push(check("adjoint_inner_products", 1e-10, &adjoint));
    checks.push(check("operators_vs_dense", 1e-10, &dense_match));

    let mut round_trip = Vec::new();
    for dims in [
        Dims::new(8, 6, 5),
        Dims::new(16, 16, 16),
        Dims::new(7, 9, 4),
    ] {
        let x = random_volume(dims, &mut rng);
        round_trip.push(ifft3_real(&fft3(&x))?.rel_diff(&x));
    }
    checks.push(check("fft_round_trip", 1e-12, &round_trip));

    Ok(SelftestReport { checks })
}
