use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use fsr3d::operators::{make_psf, psf_to_spectrum, upsample_zero_fill, DecimationSpec};
use fsr3d::selftest::{run_selftest, SelftestOptions};
use fsr3d::sim::{degrade, make_phantom, DegradationRecipe, PhantomKind, RNG_ALGORITHM};
use fsr3d::solvers::{
    admm_l2l2, admm_tv_with_spectrum, objective_tikhonov, AdmmL2Options, TikhonovConfig,
    TikhonovSolver, TvAdmmConfig, TvInit,
};
use fsr3d::volume::{psnr, read_volume, write_volume, Dims, Peak, Volume3D};

use crate::args::*;
use crate::manifest::Manifest;

fn load(path: &Path) -> Result<Volume3D> {
    Ok(read_volume(path)?)
}

fn save(out: &Output, v: &Volume3D, m: &mut Manifest) -> Result<()> {
    write_volume(&out.out, v, out.dtype)?;
    m.push("out", out.out.display());
    m.push("out_dims", v.dims());
    m.push("dtype", out.dtype.as_str());
    Ok(())
}

fn push_model(m: &mut Manifest, model: &Model) {
    m.push("psf_size", model.psf_size);
    m.push("psf_sigma", model.psf_sigma);
    m.push("decim", model.decim);
}

fn push_psnr(m: &mut Manifest, reference: Option<&Path>, est: &Volume3D) -> Result<()> {
    if let Some(path) = reference {
        let truth = load(path)?;
        m.push("ref", path.display());
        m.push("psnr_db", psnr(&truth, est, Peak::ReferenceMax)?);
    }
    Ok(())
}

pub fn phantom(a: &PhantomArgs) -> Result<Manifest> {
    let mut m = Manifest::new("phantom");
    let dims = Dims::from_array(a.dims.0);
    let kind = match a.kind {
        PhantomChoice::Ellipsoids => PhantomKind::NestedEllipsoids,
        PhantomChoice::Random => PhantomKind::RandomSmooth { seed: a.seed },
        PhantomChoice::Constant => PhantomKind::Constant(a.value),
    };
    m.push("kind", format!("{:?}", a.kind).to_lowercase());
    match kind {
        PhantomKind::RandomSmooth { seed } => m.push("seed", seed),
        PhantomKind::Constant(v) => m.push("value", v),
        PhantomKind::NestedEllipsoids => {}
    }
    let v = make_phantom(dims, &kind)?;
    save(&a.output, &v, &mut m)?;
    Ok(m)
}

pub fn degrade_cmd(a: &DegradeArgs) -> Result<Manifest> {
    let mut m = Manifest::new("degrade");
    let started = Instant::now();
    let x = load(&a.input)?;
    m.push("in", a.input.display());
    m.push("in_dims", x.dims());
    push_model(&mut m, &a.model);
    m.push("bsnr", a.bsnr);
    m.push("seed", a.seed);
    m.push("rng", RNG_ALGORITHM);
    let recipe = DegradationRecipe {
        psf: a.model.psf(),
        spec: a.model.spec_from_hr(x.dims())?,
        bsnr_db: a.bsnr.0,
        rng_seed: a.seed,
    };
    let y = degrade(&x, &recipe)?;
    save(&a.output, &y, &mut m)?;
    m.push("seconds", started.elapsed().as_secs_f64());
    Ok(m)
}

pub fn tikhonov(a: &TikhonovArgs) -> Result<Manifest> {
    let mut m = Manifest::new("tikhonov");
    let y = load(&a.input)?;
    m.push("in", a.input.display());
    m.push("in_dims", y.dims());
    push_model(&mut m, &a.model);
    m.push("lambda", a.lambda);
    m.push("xbar", &a.xbar);
    let spec = a.model.spec_from_lr(y.dims())?;
    let xbar = match &a.xbar {
        Xbar::ZeroFill => upsample_zero_fill(&y, &spec)?,
        Xbar::File(p) => load(p)?,
    };
    let cfg = TikhonovConfig::new(a.lambda, xbar);
    let lambda = psf_to_spectrum(&make_psf(&a.model.psf(), spec.hr_dims())?);

    let started = Instant::now();
    let x = TikhonovSolver::new(&lambda, &spec)?.solve(&y, &cfg)?;
    let seconds = started.elapsed().as_secs_f64();

    m.push(
        "objective",
        objective_tikhonov(&x, &y, &lambda, &spec, &cfg)?,
    );
    push_psnr(&mut m, a.reference.as_deref(), &x)?;
    save(&a.output, &x, &mut m)?;
    m.push("seconds", seconds);
    Ok(m)
}

pub fn tv(a: &TvArgs) -> Result<Manifest> {
    let mut m = Manifest::new("tv");
    let y = load(&a.input)?;
    m.push("in", a.input.display());
    m.push("in_dims", y.dims());
    push_model(&mut m, &a.model);
    let cfg = TvAdmmConfig {
        lambda: a.lambda,
        mu: a.mu,
        max_iters: a.iters,
        rel_tol: a.tol,
        tau: a.tau,
        init: match a.init {
            InitChoice::Zero => TvInit::Zero,
            InitChoice::Upsampled => TvInit::UpsampledObservation,
        },
    };
    m.push("lambda", cfg.lambda);
    m.push("mu", cfg.mu);
    m.push("iters", cfg.max_iters);
    m.push("tol", cfg.rel_tol);
    m.push("tau", cfg.tau());
    m.push("init", cfg.init.label());
    let spec = a.model.spec_from_lr(y.dims())?;
    let lambda = psf_to_spectrum(&make_psf(&a.model.psf(), spec.hr_dims())?);
    let (x, report) = admm_tv_with_spectrum(&y, &lambda, &spec, &cfg)?;

    m.push("iterations", report.iterations);
    m.push("converged", report.converged);
    m.push("initial_objective", report.objective[0]);
    m.push("objective", report.final_objective());
    if let Some(r) = report.primal_residual.last() {
        m.push("primal_residual", r);
    }
    push_psnr(&mut m, a.reference.as_deref(), &x)?;
    save(&a.output, &x, &mut m)?;
    m.push("seconds", report.seconds);
    Ok(m)
}

pub fn psnr_cmd(a: &PsnrArgs) -> Result<Manifest> {
    let mut m = Manifest::new("psnr");
    let reference = load(&a.reference)?;
    let est = load(&a.est)?;
    m.push("ref", a.reference.display());
    m.push("est", a.est.display());
    let peak = match a.peak {
        Some(p) => {
            m.push("peak", p);
            Peak::Fixed(p)
        }
        None => {
            m.push("peak", "reference_max");
            Peak::ReferenceMax
        }
    };
    m.push("psnr_db", psnr(&reference, &est, peak)?);
    Ok(m)
}

fn time_best<T>(repeats: usize, mut f: impl FnMut() -> fsr3d::Result<T>) -> Result<(T, f64)> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let started = Instant::now();
        let out = f()?;
        best = best.min(started.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((last.expect("at least one repetition"), best))
}

pub fn bench(a: &BenchArgs) -> Result<Manifest> {
    let mut m = Manifest::new("bench");
    let mut sizes = a.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        bail!("no sizes to benchmark");
    }
    m.push(
        "sizes",
        sizes
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    push_model(&mut m, &a.model);
    m.push("bsnr", a.bsnr);
    m.push("seed", a.seed);
    m.push("lambda", a.lambda);
    m.push("repeats", a.repeats);
    m.push("admm_mu", a.admm_mu);
    m.push("admm_tol", a.admm_tol);

    let mut previous: Option<(usize, f64)> = None;
    for &n in &sizes {
        let spec = DecimationSpec::new(a.model.decim.0, Dims::cube(n))?;
        let truth = make_phantom(spec.hr_dims(), &PhantomKind::NestedEllipsoids)?;
        let recipe = DegradationRecipe {
            psf: a.model.psf(),
            spec,
            bsnr_db: a.bsnr.0,
            rng_seed: a.seed,
        };
        let y = degrade(&truth, &recipe)?;
        let lambda = psf_to_spectrum(&make_psf(&recipe.psf, spec.hr_dims())?);
        let cfg = TikhonovConfig::new(a.lambda, upsample_zero_fill(&y, &spec)?);

        let (fast, seconds) = time_best(a.repeats, || {
            fsr3d::solvers::tikhonov_fast(&y, &lambda, &spec, &cfg)
        })?;
        let key = format!("bench.{n}");
        m.push(format!("{key}.tikhonov_seconds"), seconds);
        let fast_psnr = psnr(&truth, &fast, Peak::ReferenceMax)?;
        m.push(format!("{key}.tikhonov_psnr_db"), fast_psnr);

        if n <= a.admm_max_size {
            let opts = AdmmL2Options {
                mu: a.admm_mu,
                max_iters: a.admm_max_iters,
                rel_tol: a.admm_tol,
                warm_start: None,
            };
            let (slow, report) = admm_l2l2(&y, &lambda, &spec, &cfg, &opts)?;
            let slow_psnr = psnr(&truth, &slow, Peak::ReferenceMax)?;
            m.push(format!("{key}.admm_iterations"), report.iterations);
            m.push(format!("{key}.admm_converged"), report.converged);
            m.push(format!("{key}.admm_seconds"), report.seconds);
            m.push(format!("{key}.admm_psnr_db"), slow_psnr);
            m.push(format!("{key}.psnr_gap_db"), (fast_psnr - slow_psnr).abs());
            m.push(format!("{key}.speedup"), report.seconds / seconds);
        }
        if let Some((prev_n, prev_s)) = previous {
            m.push(
                format!("bench.{prev_n}_to_{n}.time_ratio"),
                seconds / prev_s,
            );
        }
        previous = Some((n, seconds));
    }
    Ok(m)
}

pub fn selftest(a: &SelftestArgs) -> Result<(Manifest, bool)> {
    let mut m = Manifest::new("selftest");
    m.push("perturb_block_order", a.perturb_block_order);
    m.push("seed", a.seed);
    let report = run_selftest(&SelftestOptions {
        perturb_block_order: a.perturb_block_order,
        seed: a.seed,
    })?;
    for c in &report.checks {
        m.push(format!("check.{}.instances", c.name), c.instances);
        m.push(
            format!("check.{}.max_deviation", c.name),
            format!("{:e}", c.max_deviation),
        );
        m.push(
            format!("check.{}.tolerance", c.name),
            format!("{:e}", c.tolerance),
        );
        m.push(
            format!("check.{}.status", c.name),
            if c.passed() { "pass" } else { "fail" },
        );
    }
    let ok = report.all_passed();
    m.push("status", if ok { "pass" } else { "fail" });
    Ok((m, ok))
}

pub fn slice(a: &SliceArgs) -> Result<Manifest> {
    let mut m = Manifest::new("slice");
    let v = load(&a.input)?;
    m.push("in", a.input.display());
    m.push("in_dims", v.dims());
    m.push("axis", a.axis);
    m.push("index", a.index);
    let plane = v
        .slice(a.axis, a.index)
        .with_context(|| format!("cannot slice {}", a.input.display()))?;
    save(&a.output, &plane, &mut m)?;
    Ok(m)
}
