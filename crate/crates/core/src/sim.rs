//! Synthetic phantoms and the blur, decimate, add-noise degradation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::{blur_apply, decimate, make_psf, psf_to_spectrum, DecimationSpec, PsfSpec};
use crate::volume::{Dims, Volume, Volume3D};

/// Identifier of the noise generator: ChaCha with 8 rounds seeded through
/// `SeedableRng::seed_from_u64`, standard normals drawn in lexicographic
/// voxel order.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Intensities of the nested-ellipsoid phantom: background, canal, lesion,
/// dentin, enamel.
pub const PHANTOM_PALETTE: [f64; 5] = [0.0, 0.15, 0.45, 0.75, 1.0];

#[derive(Clone, Debug, PartialEq)]
pub enum PhantomKind {
    /// Tooth-like nesting: a bright enamel shell around a dentin core, a dark
    /// canal along the slice axis and two mid-grey lesions. Values come from
    /// [`PHANTOM_PALETTE`].
    NestedEllipsoids,
    /// Seeded white noise, Gaussian low-passed and rescaled to `[0, 1]`.
    RandomSmooth {
        seed: u64,
    },
    Constant(f64),
}

pub fn make_phantom(dims: Dims, kind: &PhantomKind) -> Result<Volume3D> {
    dims.validate()?;
    match kind {
        PhantomKind::Constant(v) => {
            if !v.is_finite() {
                return Err(Error::param(format!(
                    "constant phantom value must be finite, got {v}"
                )));
            }
            Ok(Volume3D::filled(dims, *v))
        }
        PhantomKind::NestedEllipsoids => nested_ellipsoids(dims),
        PhantomKind::RandomSmooth { seed } => random_smooth(dims, *seed),
    }
}

fn nested_ellipsoids(dims: Dims) -> Result<Volume3D> {
    let [m, n, s] = dims.as_array();
    if m < 8 || n < 8 || s < 8 {
        return Err(Error::param(format!(
            "nested-ellipsoid phantom needs at least 8x8x8 voxels, got {dims}"
        )));
    }
    let centred = |i: usize, len: usize| 2.0 * (i as f64 + 0.5) / len as f64 - 1.0;
    let p = PHANTOM_PALETTE;
    Ok(Volume::from_fn(dims, |i, j, k| {
        let (u, v, w) = (centred(i, m), centred(j, n), centred(k, s));
        let inside = |cu: f64, cv: f64, cw: f64, ru: f64, rv: f64, rw: f64| {
            ((u - cu) / ru).powi(2) + ((v - cv) / rv).powi(2) + ((w - cw) / rw).powi(2) <= 1.0
        };
        let channel =
            ((u - 0.05) / 0.14).powi(2) + ((v + 0.05) / 0.14).powi(2) <= 1.0 && w.abs() <= 0.7;
        if !inside(0.0, 0.0, 0.0, 0.85, 0.7, 0.9) {
            p[0]
        } else if channel {
            p[1]
        } else if inside(-0.3, 0.2, 0.35, 0.15, 0.12, 0.2)
            || inside(0.45, -0.35, -0.5, 0.2, 0.18, 0.25)
        {
            p[2]
        } else if inside(0.0, 0.0, 0.0, 0.55, 0.45, 0.75) {
            p[3]
        } else {
            p[4]
        }
    }))
}

fn random_smooth(dims: Dims, seed: u64) -> Result<Volume3D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..dims.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let noise = Volume3D::from_vec(dims, noise)?;
    let size = dims
        .as_array()
        .map(|len| if len % 2 == 1 { len } else { len - 1 }.min(9));
    let sigma = size.map(|s| s as f64 / 4.0);
    let psf = make_psf(&PsfSpec::gaussian(size, sigma), dims)?;
    let smooth = blur_apply(&noise, &psf_to_spectrum(&psf), false)?;
    let (lo, hi) = (smooth.min(), smooth.max());
    if hi > lo {
        Ok(smooth.map(|v| (v - lo) / (hi - lo)))
    } else {
        Ok(Volume3D::filled(dims, 0.5))
    }
}

/// Everything needed to reproduce `y = DHx + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegradationRecipe {
    pub psf: PsfSpec,
    pub spec: DecimationSpec,
    /// Blurred signal-to-noise ratio in dB; `None` for a noiseless observation.
    pub bsnr_db: Option<f64>,
    pub rng_seed: u64,
}

impl DegradationRecipe {
    pub fn rng_algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }
}

/// Noise standard deviation giving `10 log10(var(clean) / σ²) = bsnr_db`,
/// where `var` is the population variance over voxels.
pub fn noise_sigma(clean: &Volume3D, bsnr_db: f64) -> Result<f64> {
    if !bsnr_db.is_finite() {
        return Err(Error::param(format!("BSNR must be finite, got {bsnr_db}")));
    }
    Ok((clean.variance() / 10f64.powf(bsnr_db / 10.0)).sqrt())
}

/// Noise-free observation `DHx`.
pub fn degrade_clean(x: &Volume3D, psf: &PsfSpec, spec: &DecimationSpec) -> Result<Volume3D> {
    x.ensure_dims(spec.hr_dims())?;
    let h = make_psf(psf, spec.hr_dims())?;
    decimate(&blur_apply(x, &psf_to_spectrum(&h), false)?, spec)
}

pub fn degrade(x: &Volume3D, recipe: &DegradationRecipe) -> Result<Volume3D> {
    let clean = degrade_clean(x, &recipe.psf, &recipe.spec)?;
    let Some(bsnr) = recipe.bsnr_db else {
        return Ok(clean);
    };
    let sigma = noise_sigma(&clean, bsnr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.rng_seed);
    Ok(clean.map(|v| {
        let z: f64 = StandardNormal.sample(&mut rng);
        v + sigma * z
    }))
}
