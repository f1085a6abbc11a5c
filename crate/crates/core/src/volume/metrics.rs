use super::Volume3D;
use crate::error::{Error, Result};

/// Peak value used by [`psnr`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Peak {
    /// Maximum voxel value of the reference volume.
    #[default]
    ReferenceMax,
    Fixed(f64),
}

/// Peak signal-to-noise ratio in decibels, `10 log10(peak^2 / MSE)`.
/// Identical volumes give `+inf`.
pub fn psnr(reference: &Volume3D, estimate: &Volume3D, peak: Peak) -> Result<f64> {
    estimate.ensure_dims(reference.dims())?;
    let peak = match peak {
        Peak::ReferenceMax => reference.max(),
        Peak::Fixed(p) => p,
    };
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::param(format!(
            "PSNR peak must be positive, got {peak}"
        )));
    }
    let mse = reference
        .as_slice()
        .iter()
        .zip(estimate.as_slice())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}
