use num_complex::Complex64;

use super::{
    check_positive, SolveReport, DEFAULT_MU, DEFAULT_TAU_OVER_MU, DEFAULT_TV_ITERS,
    DEFAULT_TV_LAMBDA, DEFAULT_TV_REL_TOL,
};
use crate::error::{Error, Result};
use crate::operators::{
    blur_apply_with, decimate, decimate_adjoint, finite_diff_spectra, gradient, gradient_adjoint,
    psf_to_spectrum, upsample_nearest, DecimationSpec, SpectrumDiag,
};
use crate::spectral::{fold_lambda, FoldedSpectrum};
use crate::volume::{ComplexVolume3D, Dims, Fft3, Volume, Volume3D};

/// Starting point of the TV solver.
#[derive(Clone, Debug, Default)]
pub enum TvInit {
    /// `u = 0`, dual `0`; the first x-update produces `x`.
    #[default]
    Zero,
    /// Nearest-neighbour upsampled observation, with `u = L x0`.
    UpsampledObservation,
    Provided(Volume3D),
}

impl TvInit {
    pub fn label(&self) -> &'static str {
        match self {
            TvInit::Zero => "zero",
            TvInit::UpsampledObservation => "upsampled",
            TvInit::Provided(_) => "provided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TvAdmmConfig {
    /// TV weight.
    pub lambda: f64,
    /// ADMM penalty.
    pub mu: f64,
    pub max_iters: usize,
    /// Stop once `‖x_{i+1} − x_i‖ / ‖x_{i+1}‖` falls below this.
    pub rel_tol: f64,
    /// Floor added to `Σ|Σ_a|^2` before inversion; `None` means `1e-8 μ`.
    pub tau: Option<f64>,
    pub init: TvInit,
}

impl Default for TvAdmmConfig {
    fn default() -> Self {
        TvAdmmConfig {
            lambda: DEFAULT_TV_LAMBDA,
            mu: DEFAULT_MU,
            max_iters: DEFAULT_TV_ITERS,
            rel_tol: DEFAULT_TV_REL_TOL,
            tau: None,
            init: TvInit::Zero,
        }
    }
}

impl TvAdmmConfig {
    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(DEFAULT_TAU_OVER_MU * self.mu)
    }

    fn validate(&self) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        check_positive("mu", self.mu)?;
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if self.rel_tol.is_nan() || self.rel_tol < 0.0 {
            return Err(Error::param(format!(
                "rel_tol must be nonnegative, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// `Γ = (|Σ_h|^2 + |Σ_v|^2 + |Σ_s|^2 + τ)^{-1}` over the HR grid.
///
/// The difference spectra vanish at the zero frequency, so `τ` must be
/// positive.
pub fn tv_gamma(dims: Dims, tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Singular(format!(
            "the difference operators vanish at the zero frequency; tau must be positive, got {tau}"
        )));
    }
    let [sh, sv, ss] = finite_diff_spectra(dims);
    Ok(sh
        .as_slice()
        .iter()
        .zip(sv.as_slice())
        .zip(ss.as_slice())
        .map(|((a, b), c)| 1.0 / (a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + tau))
        .collect())
}

fn check_gamma(gamma: &[f64]) -> Result<()> {
    if let Some(pos) = gamma.iter().position(|g| !(*g > 0.0 && g.is_finite())) {
        let hint = if pos == 0 {
            " (zero frequency: the difference operators vanish there, add a positive tau)"
        } else {
            ""
        };
        return Err(Error::Singular(format!(
            "gamma entry {pos} is {}{hint}",
            gamma[pos]
        )));
    }
    Ok(())
}

/// Precomputed state of the TV x-subproblem
/// `argmin ½‖y − DHx‖² + (μ/2)‖Lx − ρ‖² + (μτ/2)‖x‖²`.
#[derive(Clone, Debug)]
pub struct TvXSolver {
    spec: DecimationSpec,
    fft: Fft3,
    folded: FoldedSpectrum,
    gamma: Vec<f64>,
    /// `Λ^H F D^H y`.
    data_hat: Vec<Complex64>,
    mu: f64,
}

impl TvXSolver {
    pub fn new(
        y: &Volume3D,
        lambda: &SpectrumDiag,
        folded: FoldedSpectrum,
        mu: f64,
        gamma: Vec<f64>,
    ) -> Result<Self> {
        let spec = *folded.spec();
        y.ensure_dims(spec.lr_dims())?;
        lambda.values().ensure_dims(spec.hr_dims())?;
        check_positive("mu", mu)?;
        if gamma.len() != spec.hr_dims().len() {
            return Err(Error::param("gamma length does not match the HR grid"));
        }
        check_gamma(&gamma)?;
        let fft = Fft3::new(spec.hr_dims());
        let dty_hat = fft.forward(&decimate_adjoint(y, &spec)?);
        let data_hat = dty_hat
            .as_slice()
            .iter()
            .zip(lambda.as_slice())
            .map(|(d, l)| l.conj() * d)
            .collect();
        Ok(TvXSolver {
            spec,
            fft,
            folded,
            gamma,
            data_hat,
            mu,
        })
    }

    /// Spectrum of the minimizer for `Θ̂ = F L^H ρ`.
    pub fn solve_spectrum(&self, theta_hat: &ComplexVolume3D) -> Result<ComplexVolume3D> {
        theta_hat.ensure_dims(self.spec.hr_dims())?;
        let k_hat: Vec<Complex64> = self
            .data_hat
            .iter()
            .zip(theta_hat.as_slice())
            .map(|(d, t)| d + self.mu * t)
            .collect();
        let k_hat = Volume::from_parts(self.spec.hr_dims(), k_hat);
        let shift = self.mu * self.spec.factor() as f64;
        let mut x_hat = self
            .folded
            .inverse_lemma_apply(Some(&self.gamma), shift, &k_hat)?;
        let inv_mu = 1.0 / self.mu;
        x_hat.as_mut_slice().iter_mut().for_each(|v| *v *= inv_mu);
        Ok(x_hat)
    }

    pub fn solve(&self, theta_hat: &ComplexVolume3D) -> Result<Volume3D> {
        let x_hat = self.solve_spectrum(theta_hat)?;
        self.fft.inverse_real(x_hat.into_vec())
    }
}

/// One TV x-update from the spectrum `Θ̂` of `D_h^H ρ_h + D_v^H ρ_v + D_s^H ρ_s`.
pub fn tv_x_update(
    y: &Volume3D,
    folded: &FoldedSpectrum,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    mu: f64,
    theta_hat: &ComplexVolume3D,
    gamma: &[f64],
) -> Result<Volume3D> {
    if folded.spec() != spec {
        return Err(Error::param(
            "folded spectrum was built for a different decimation",
        ));
    }
    TvXSolver::new(y, lambda, folded.clone(), mu, gamma.to_vec())?.solve(theta_hat)
}

/// Isotropic soft-thresholding: each voxel's 3-vector `ν[j]` is scaled by
/// `max(0, ‖ν[j]‖ − t) / ‖ν[j]‖`, with zero mapped to zero.
pub fn tv_shrink(nu: &[Volume3D; 3], threshold: f64) -> [Volume3D; 3] {
    assert!(threshold >= 0.0, "shrinkage threshold must be nonnegative");
    let dims = nu[0].dims();
    let (a, b, c) = (nu[0].as_slice(), nu[1].as_slice(), nu[2].as_slice());
    let n = a.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for j in 0..n {
        let mag = (a[j] * a[j] + b[j] * b[j] + c[j] * c[j]).sqrt();
        if mag > threshold {
            let scale = (mag - threshold) / mag;
            out[0][j] = a[j] * scale;
            out[1][j] = b[j] * scale;
            out[2][j] = c[j] * scale;
        }
    }
    out.map(|v| Volume::from_parts(dims, v))
}

fn isotropic_tv(g: &[Volume3D; 3]) -> f64 {
    let (a, b, c) = (g[0].as_slice(), g[1].as_slice(), g[2].as_slice());
    (0..a.len())
        .map(|j| (a[j] * a[j] + b[j] * b[j] + c[j] * c[j]).sqrt())
        .sum()
}

fn tv_objective_parts(
    y: &Volume3D,
    hx: &Volume3D,
    g: &[Volume3D; 3],
    spec: &DecimationSpec,
    lambda: f64,
) -> Result<f64> {
    let r = decimate(hx, spec)?.axpy(-1.0, y);
    Ok(0.5 * r.norm_sq() + lambda * isotropic_tv(g))
}

/// `½‖y − DHx‖² + λ Σ_j ‖(D_h x, D_v x, D_s x)[j]‖₂`.
pub fn objective_tv(
    x: &Volume3D,
    y: &Volume3D,
    lambda_spec: &SpectrumDiag,
    spec: &DecimationSpec,
    lambda: f64,
) -> Result<f64> {
    x.ensure_dims(spec.hr_dims())?;
    y.ensure_dims(spec.lr_dims())?;
    let hx = blur_apply_with(&Fft3::new(spec.hr_dims()), x, lambda_spec, false)?;
    tv_objective_parts(y, &hx, &gradient(x), spec, lambda)
}

/// ADMM for `½‖y − DHx‖² + λ TV(x)` with the split `u = Lx`.
pub fn admm_tv(
    y: &Volume3D,
    psf: &Volume3D,
    spec: &DecimationSpec,
    cfg: &TvAdmmConfig,
) -> Result<(Volume3D, SolveReport)> {
    psf.ensure_dims(spec.hr_dims())?;
    admm_tv_with_spectrum(y, &psf_to_spectrum(psf), spec, cfg)
}

pub fn admm_tv_with_spectrum(
    y: &Volume3D,
    lambda: &SpectrumDiag,
    spec: &DecimationSpec,
    cfg: &TvAdmmConfig,
) -> Result<(Volume3D, SolveReport)> {
    cfg.validate()?;
    y.ensure_dims(spec.lr_dims())?;
    let hr = spec.hr_dims();
    let mu = cfg.mu;

    let folded = fold_lambda(lambda, spec)?;
    let gamma = tv_gamma(hr, cfg.tau())?;
    let solver = TvXSolver::new(y, lambda, folded, mu, gamma)?;
    let fft = &solver.fft;

    let x0 = match &cfg.init {
        TvInit::Zero => Volume3D::zeros(hr),
        TvInit::UpsampledObservation => upsample_nearest(y, spec)?,
        TvInit::Provided(v) => {
            v.ensure_dims(hr)?;
            v.clone()
        }
    };
    let g0 = gradient(&x0);
    let hx0 = blur_apply_with(fft, &x0, lambda, false)?;
    let (mut report, started) = SolveReport::start(
        cfg.init.label(),
        tv_objective_parts(y, &hx0, &g0, spec, cfg.lambda)?,
    );

    let mut u = match cfg.init {
        TvInit::Zero => [
            Volume3D::zeros(hr),
            Volume3D::zeros(hr),
            Volume3D::zeros(hr),
        ],
        _ => g0,
    };
    let mut dual = [
        Volume3D::zeros(hr),
        Volume3D::zeros(hr),
        Volume3D::zeros(hr),
    ];
    let mut x = x0;
    let threshold = cfg.lambda / mu;
    let lam = lambda.as_slice();

    for _ in 0..cfg.max_iters {
        let rho = [0, 1, 2].map(|a| u[a].axpy(-1.0, &dual[a]));
        let theta_hat = fft.forward(&gradient_adjoint(&rho));
        let x_hat = solver.solve_spectrum(&theta_hat)?;
        let hx_hat: Vec<Complex64> = x_hat
            .as_slice()
            .iter()
            .zip(lam)
            .map(|(x, l)| x * l)
            .collect();
        let (x_new, hx) = fft.inverse_real_pair(x_hat.as_slice(), &hx_hat);
        if let Some(index) = x_new.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }

        let g = gradient(&x_new);
        let nu = [0, 1, 2].map(|a| g[a].axpy(1.0, &dual[a]));
        u = tv_shrink(&nu, threshold);
        let residual = [0, 1, 2].map(|a| g[a].axpy(-1.0, &u[a]));
        for a in 0..3 {
            dual[a] = dual[a].axpy(1.0, &residual[a]);
        }
        let primal = residual.iter().map(|r| r.norm_sq()).sum::<f64>().sqrt();

        let change = x_new.rel_diff(&x);
        let objective = tv_objective_parts(y, &hx, &g, spec, cfg.lambda)?;
        x = x_new;
        report.record(objective, primal, change);
        if change < cfg.rel_tol {
            report.converged = true;
            break;
        }
    }
    report.seconds = started.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::operators::dense::build_dense_gradient;
    use crate::solvers::dense::{dense_objective_tv, dense_tv_x_update};
    use crate::volume::fft3;

    fn random_volume(dims: Dims, rng: &mut ChaCha8Rng) -> Volume3D {
        Volume::from_fn(dims, |_, _, _| rng.gen_range(-1.0..1.0))
    }

    fn random_psf(dims: Dims, rng: &mut ChaCha8Rng) -> Volume3D {
        let v = Volume::from_fn(dims, |_, _, _| rng.gen_range(0.0..1.0));
        let total: f64 = v.as_slice().iter().sum();
        v.scaled(1.0 / total)
    }

    /// Θ = L^T ρ through the dense gradient, independent of the stencils.
    fn dense_theta(rho: &[Volume3D; 3]) -> Volume3D {
        let dims = rho[0].dims();
        let l = build_dense_gradient(dims).unwrap();
        let stacked: Vec<f64> = rho
            .iter()
            .flat_map(|r| r.as_slice().iter().copied())
            .collect();
        let out = l.tr_mul(&nalgebra::DVector::from_vec(stacked));
        Volume3D::from_vec(dims, out.as_slice().to_vec()).unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        let spec = DecimationSpec::new([2, 2, 2], Dims::cube(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lambda = psf_to_spectrum(&random_psf(spec.hr_dims(), &mut rng));
        let folded = fold_lambda(&lambda, &spec).unwrap();
        let gamma = tv_gamma(spec.hr_dims(), 1e-9).unwrap();
        let x = tv_x_update(
            &Volume3D::zeros(spec.lr_dims()),
            &folded,
            &lambda,
            &spec,
            0.1,
            &ComplexVolume3D::zeros(spec.hr_dims()),
            &gamma,
        )
        .unwrap();
        assert_eq!(x.norm(), 0.0);
    }

    #[test]
    fn x_update_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = DecimationSpec::new([2, 2, 2], Dims::cube(8)).unwrap();
        let hr = spec.hr_dims();
        let psf = random_psf(hr, &mut rng);
        let lambda = psf_to_spectrum(&psf);
        let y = random_volume(spec.lr_dims(), &mut rng);
        let rho = [
            random_volume(hr, &mut rng),
            random_volume(hr, &mut rng),
            random_volume(hr, &mut rng),
        ];
        let theta = dense_theta(&rho);
        let (mu, tau) = (0.1, 1e-9);
        let folded = fold_lambda(&lambda, &spec).unwrap();
        let gamma = tv_gamma(hr, tau).unwrap();
        let fast = tv_x_update(&y, &folded, &lambda, &spec, mu, &fft3(&theta), &gamma).unwrap();
        let slow = dense_tv_x_update(&y, &psf, &spec, mu, tau, &theta).unwrap();
        assert!(fast.rel_diff(&slow) < 1e-8, "{}", fast.rel_diff(&slow));
    }

    #[test]
    fn x_update_identity_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dims = Dims::new(4, 4, 4);
        let spec = DecimationSpec::identity(dims).unwrap();
        let mut psf = Volume3D::zeros(dims);
        psf.as_mut_slice()[0] = 1.0;
        let lambda = psf_to_spectrum(&psf);
        let y = random_volume(dims, &mut rng);
        let rho = [
            random_volume(dims, &mut rng),
            random_volume(dims, &mut rng),
            random_volume(dims, &mut rng),
        ];
        let theta = dense_theta(&rho);
        let folded = fold_lambda(&lambda, &spec).unwrap();
        let gamma = tv_gamma(dims, 1e-8).unwrap();
        let fast = tv_x_update(&y, &folded, &lambda, &spec, 1.0, &fft3(&theta), &gamma).unwrap();
        let slow = dense_tv_x_update(&y, &psf, &spec, 1.0, 1e-8, &theta).unwrap();
        let max_dev = fast
            .as_slice()
            .iter()
            .zip(slow.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-6);
    }

    #[test]
    fn zero_tau_is_singular() {
        let err = tv_gamma(Dims::cube(4), 0.0).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
        assert!(err.to_string().contains("zero frequency"));

        let spec = DecimationSpec::identity(Dims::cube(4)).unwrap();
        let lambda = SpectrumDiag::ones(spec.hr_dims());
        let folded = fold_lambda(&lambda, &spec).unwrap();
        let mut gamma = tv_gamma(spec.hr_dims(), 1e-3).unwrap();
        gamma[0] = f64::INFINITY;
        let err = tv_x_update(
            &Volume3D::zeros(spec.lr_dims()),
            &folded,
            &lambda,
            &spec,
            0.1,
            &ComplexVolume3D::zeros(spec.hr_dims()),
            &gamma,
        )
        .unwrap_err();
        assert!(err.to_string().contains("zero frequency"));
    }

    #[test]
    fn shrink_examples() {
        let d = Dims::new(2, 1, 1);
        let nu = [
            Volume3D::from_vec(d, vec![3.0, 0.3]).unwrap(),
            Volume3D::from_vec(d, vec![0.0, 0.4]).unwrap(),
            Volume3D::from_vec(d, vec![0.0, 0.0]).unwrap(),
        ];
        let out = tv_shrink(&nu, 1.0);
        assert!((out[0].as_slice()[0] - 2.0).abs() < 1e-12);
        assert_eq!(out[1].as_slice()[0], 0.0);
        assert_eq!(out[2].as_slice()[0], 0.0);
        // |(0.3, 0.4, 0)| = 0.5 <= 1: fully shrunk.
        for a in 0..3 {
            assert_eq!(out[a].as_slice()[1], 0.0);
        }
        let zero = [Volume3D::zeros(d), Volume3D::zeros(d), Volume3D::zeros(d)];
        let out = tv_shrink(&zero, 0.0);
        assert!(out.iter().all(|v| v.as_slice().iter().all(|x| *x == 0.0)));
    }

    /// Brute-force prox of `t‖·‖₂` for one voxel by a coarse-to-fine grid search.
    fn prox_by_search(v: [f64; 3], t: f64) -> [f64; 3] {
        let cost = |u: [f64; 3]| {
            let d: f64 = (0..3).map(|a| (u[a] - v[a]).powi(2)).sum();
            0.5 * d + t * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
        };
        let mut best = [0.0; 3];
        let mut step = 0.5;
        for _ in 0..30 {
            let centre = best;
            for a in -4..=4 {
                for b in -4..=4 {
                    for c in -4..=4 {
                        let u = [
                            centre[0] + a as f64 * step,
                            centre[1] + b as f64 * step,
                            centre[2] + c as f64 * step,
                        ];
                        if cost(u) < cost(best) {
                            best = u;
                        }
                    }
                }
            }
            step *= 0.5;
        }
        best
    }

    #[test]
    fn shrink_matches_brute_force_prox() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = Dims::new(1, 1, 1);
        for _ in 0..20 {
            let v = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let t = rng.gen_range(0.0..1.5);
            let nu = v.map(|x| Volume3D::from_vec(d, vec![x]).unwrap());
            let out = tv_shrink(&nu, t);
            let oracle = prox_by_search(v, t);
            for a in 0..3 {
                assert!((out[a].as_slice()[0] - oracle[a]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn shrink_is_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = Dims::new(3, 2, 2);
        for _ in 0..50 {
            let p = [0; 3].map(|_| random_volume(d, &mut rng));
            let q = [0; 3].map(|_| random_volume(d, &mut rng));
            let t = rng.gen_range(0.0..1.0);
            let (sp, sq) = (tv_shrink(&p, t), tv_shrink(&q, t));
            let dist = |a: &[Volume3D; 3], b: &[Volume3D; 3]| -> f64 {
                (0..3)
                    .map(|i| a[i].axpy(-1.0, &b[i]).norm_sq())
                    .sum::<f64>()
                    .sqrt()
            };
            assert!(dist(&sp, &sq) <= dist(&p, &q) + 1e-12);
        }
    }

    #[test]
    fn objective_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = DecimationSpec::new([2, 1, 2], Dims::new(4, 4, 4)).unwrap();
        let psf = random_psf(spec.hr_dims(), &mut rng);
        let lambda = psf_to_spectrum(&psf);

        let x = Volume3D::filled(spec.hr_dims(), 0.3);
        let y = decimate(
            &blur_apply_with(&Fft3::new(spec.hr_dims()), &x, &lambda, false).unwrap(),
            &spec,
        )
        .unwrap();
        assert!(objective_tv(&x, &y, &lambda, &spec, 0.5).unwrap() < 1e-24);

        let x = random_volume(spec.hr_dims(), &mut rng);
        let y = random_volume(spec.lr_dims(), &mut rng);
        let fast = objective_tv(&x, &y, &lambda, &spec, 0.0).unwrap();
        let dense = dense_objective_tv(&x, &y, &psf, &spec, 0.0).unwrap();
        assert!((fast - dense).abs() / dense < 1e-10);
        let fast = objective_tv(&x, &y, &lambda, &spec, 0.7).unwrap();
        let dense = dense_objective_tv(&x, &y, &psf, &spec, 0.7).unwrap();
        assert!((fast - dense).abs() / dense < 1e-10);
    }

    #[test]
    fn near_identity_problem_recovers_observation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = Dims::new(8, 8, 6);
        let spec = DecimationSpec::identity(dims).unwrap();
        let mut psf = Volume3D::zeros(dims);
        psf.as_mut_slice()[0] = 1.0;
        let y = Volume::from_fn(dims, |_, _, _| rng.gen_range(0.0..1.0));
        let cfg = TvAdmmConfig {
            lambda: 1e-6,
            ..Default::default()
        };
        let (x, report) = admm_tv(&y, &psf, &spec, &cfg).unwrap();
        assert!(x.rel_diff(&y) < 1e-3, "{}", x.rel_diff(&y));
        assert!(report.final_objective() <= report.objective[0]);
    }

    #[test]
    fn report_is_consistent_and_residual_drops() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = DecimationSpec::new([2, 2, 2], Dims::cube(16)).unwrap();
        let psf = crate::operators::make_gaussian_psf([5, 5, 5], [1.0; 3], spec.hr_dims()).unwrap();
        let truth = Volume::from_fn(spec.hr_dims(), |i, j, k| {
            if (4..12).contains(&i) && (4..12).contains(&j) && (2..10).contains(&k) {
                1.0
            } else {
                0.1
            }
        });
        let lambda = psf_to_spectrum(&psf);
        let y = decimate(
            &blur_apply_with(&Fft3::new(spec.hr_dims()), &truth, &lambda, false).unwrap(),
            &spec,
        )
        .unwrap()
        .map(|v| v + rng.gen_range(-0.01..0.01));
        let cfg = TvAdmmConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        let (_, report) = admm_tv(&y, &psf, &spec, &cfg).unwrap();
        assert_eq!(report.iterations, 30);
        assert_eq!(report.objective.len(), 31);
        assert_eq!(report.primal_residual.len(), 30);
        assert!(report.primal_residual[29] < report.primal_residual[0]);
        assert!(report.final_objective() <= report.objective[0]);
    }

    #[test]
    fn config_validation() {
        let spec = DecimationSpec::identity(Dims::cube(4)).unwrap();
        let psf = Volume3D::filled(spec.hr_dims(), 1.0 / 64.0);
        let y = Volume3D::zeros(spec.lr_dims());
        for cfg in [
            TvAdmmConfig {
                lambda: 0.0,
                ..Default::default()
            },
            TvAdmmConfig {
                mu: -1.0,
                ..Default::default()
            },
            TvAdmmConfig {
                max_iters: 0,
                ..Default::default()
            },
            TvAdmmConfig {
                tau: Some(0.0),
                ..Default::default()
            },
        ] {
            assert!(admm_tv(&y, &psf, &spec, &cfg).is_err());
        }
        assert_eq!(TvAdmmConfig::default().tau(), 1e-9);
    }
}
