use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsr3d::operators::{DecimationSpec, PsfSpec};
use fsr3d::solvers::{
    DEFAULT_MU, DEFAULT_TIKHONOV_LAMBDA, DEFAULT_TV_ITERS, DEFAULT_TV_LAMBDA, DEFAULT_TV_REL_TOL,
};
use fsr3d::volume::{DType, Dims};

#[derive(Debug, Parser)]
#[command(
    name = "fsr3d",
    version,
    about = "Fast 3D single-image super-resolution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic ground-truth volume.
    Phantom(PhantomArgs),
    /// Blur, decimate and add noise to an HR volume.
    Degrade(DegradeArgs),
    /// Closed-form Tikhonov super-resolution.
    Tikhonov(TikhonovArgs),
    /// ADMM total-variation super-resolution.
    Tv(TvArgs),
    /// PSNR of an estimate against a reference volume.
    Psnr(PsnrArgs),
    /// Time the closed form against the iterative Tikhonov solver.
    Bench(BenchArgs),
    /// Run the dense-oracle consistency checks.
    Selftest(SelftestArgs),
    /// Extract an axis-aligned plane.
    Slice(SliceArgs),
}

/// Comma-separated triple such as `9,9,9`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triple<T>(pub [T; 3]);

impl<T: FromStr + Copy> FromStr for Triple<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated values, got '{s}'"));
        }
        let mut out = Vec::with_capacity(3);
        for p in parts {
            out.push(p.parse::<T>().map_err(|e| format!("'{p}': {e}"))?);
        }
        Ok(Triple([out[0], out[1], out[2]]))
    }
}

impl<T: std::fmt::Display> std::fmt::Display for Triple<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// `--bsnr 30` or `--bsnr none`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bsnr(pub Option<f64>);

impl FromStr for Bsnr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Bsnr(None));
        }
        let db: f64 = s
            .parse()
            .map_err(|_| format!("expected a number of dB or 'none', got '{s}'"))?;
        if !db.is_finite() {
            return Err(format!("BSNR must be finite, got {s}"));
        }
        Ok(Bsnr(Some(db)))
    }
}

impl std::fmt::Display for Bsnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(db) => write!(f, "{db}"),
            None => f.write_str("none"),
        }
    }
}

/// Prior of the Tikhonov solver.
#[derive(Clone, Debug, PartialEq)]
pub enum Xbar {
    ZeroFill,
    File(PathBuf),
}

impl FromStr for Xbar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(if s == "zerofill" {
            Xbar::ZeroFill
        } else {
            Xbar::File(PathBuf::from(s))
        })
    }
}

impl std::fmt::Display for Xbar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Xbar::ZeroFill => f.write_str("zerofill"),
            Xbar::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhantomChoice {
    Ellipsoids,
    Random,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitChoice {
    Zero,
    Upsampled,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Also write the manifest to this file.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output volume (`.vol` payload plus `.volhdr` header).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Payload element type of the output.
    #[arg(long, default_value = "f64")]
    pub dtype: DType,
}

/// Blur and decimation of the forward model.
#[derive(Debug, Args)]
pub struct Model {
    #[arg(long, default_value = "9,9,9", value_name = "R,C,S")]
    pub psf_size: Triple<usize>,
    #[arg(long, default_value = "3,3,3", value_name = "A,B,C")]
    pub psf_sigma: Triple<f64>,
    #[arg(long, default_value = "2,2,2", value_name = "DR,DC,DS")]
    pub decim: Triple<usize>,
}

impl Model {
    pub fn psf(&self) -> PsfSpec {
        PsfSpec::gaussian(self.psf_size.0, self.psf_sigma.0)
    }

    pub fn spec_from_hr(&self, hr: Dims) -> fsr3d::Result<DecimationSpec> {
        DecimationSpec::new(self.decim.0, hr)
    }

    pub fn spec_from_lr(&self, lr: Dims) -> fsr3d::Result<DecimationSpec> {
        DecimationSpec::from_lr(self.decim.0, lr)
    }
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, default_value = "64,64,64", value_name = "M,N,S")]
    pub dims: Triple<usize>,
    #[arg(long, value_enum, default_value_t = PhantomChoice::Ellipsoids)]
    pub kind: PhantomChoice,
    /// Seed of the random-smooth phantom.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value of the constant phantom.
    #[arg(long, default_value_t = 0.5)]
    pub value: f64,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    /// HR input volume.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub model: Model,
    /// Blurred signal-to-noise ratio in dB, or `none`.
    #[arg(long, default_value = "30")]
    pub bsnr: Bsnr,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TikhonovArgs {
    /// LR observation.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = DEFAULT_TIKHONOV_LAMBDA)]
    pub lambda: f64,
    /// Prior volume, or `zerofill` for the rescaled zero-filled observation.
    #[arg(long, default_value = "zerofill", value_name = "PATH|zerofill")]
    pub xbar: Xbar,
    /// Ground truth for a PSNR entry in the manifest.
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TvArgs {
    /// LR observation.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = DEFAULT_TV_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = DEFAULT_MU)]
    pub mu: f64,
    #[arg(long, default_value_t = DEFAULT_TV_ITERS)]
    pub iters: usize,
    /// Relative-change stopping tolerance.
    #[arg(long, default_value_t = DEFAULT_TV_REL_TOL)]
    pub tol: f64,
    /// Zero-frequency floor; defaults to 1e-8 * mu.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = InitChoice::Zero)]
    pub init: InitChoice,
    /// Ground truth for a PSNR entry in the manifest.
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PsnrArgs {
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub est: PathBuf,
    /// Fixed peak; the reference maximum otherwise.
    #[arg(long)]
    pub peak: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// HR cube edge lengths.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value = "30")]
    pub bsnr: Bsnr,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TIKHONOV_LAMBDA)]
    pub lambda: f64,
    /// Timed repetitions of the closed form; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Largest size at which the iterative solver is also run.
    #[arg(long, default_value_t = 64)]
    pub admm_max_size: usize,
    #[arg(long, default_value_t = DEFAULT_MU)]
    pub admm_mu: f64,
    /// Relative-change tolerance that counts as converged.
    #[arg(long, default_value_t = 1e-8)]
    pub admm_tol: f64,
    #[arg(long, default_value_t = 20_000)]
    pub admm_max_iters: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Reverse the folded-spectrum block order; the run must then fail.
    #[arg(long)]
    pub perturb_block_order: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: Output,
    /// 1 fixes the row index, 2 the column, 3 the slice.
    #[arg(long, default_value_t = 3)]
    pub axis: usize,
    #[arg(long)]
    pub index: usize,
    #[command(flatten)]
    pub common: Common,
}
